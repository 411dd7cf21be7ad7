#include "kirchhoff/fft.hpp"

#include "kirchhoff/errors.hpp"

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace kirchhoff::fft {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void transform(std::span<cplx> data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) throw ParameterError("fft: length must be a power of two");
    if (n == 1) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    // Twiddles from cos/sin directly, not by repeated multiplication.
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cplx> twiddle(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        twiddle[k] = cplx{std::cos(angle), std::sin(angle)};
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cplx t = twiddle[k * stride] * data[start + k + half];
                const cplx u = data[start + k];
                data[start + k] = u + t;
                data[start + k + half] = u - t;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (cplx& v : data) v *= scale;
    }
}

void transform_2d(std::span<cplx> data, int nx, int ny, bool inverse) {
    if (nx < 1 || ny < 1 || data.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
        throw ParameterError("fft: 2-D shape does not match data");
    for (int iy = 0; iy < ny; ++iy) transform(data.subspan(static_cast<std::size_t>(iy) * nx, nx), inverse);
    std::vector<cplx> column(static_cast<std::size_t>(ny));
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) column[iy] = data[static_cast<std::size_t>(iy) * nx + ix];
        transform(column, inverse);
        for (int iy = 0; iy < ny; ++iy) data[static_cast<std::size_t>(iy) * nx + ix] = column[iy];
    }
}

} // namespace kirchhoff::fft
