#include "kirchhoff/paraxial.hpp"

#include "kirchhoff/errors.hpp"
#include "kirchhoff/fft.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

namespace kirchhoff::paraxial {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angular wavenumber of FFT bin i on an n-point grid with spacing h.
double wavenumber(int i, int n, double h) {
    const int f = i < n / 2 ? i : i - n;
    return kTwoPi * f / (n * h);
}

} // namespace

void BeamField::validate() const {
    if (grid.nx < 16 || grid.ny < 16 || !fft::is_power_of_two(static_cast<std::size_t>(grid.nx)) ||
        !fft::is_power_of_two(static_cast<std::size_t>(grid.ny)))
        throw ParameterError("beam grid: nx and ny must be powers of two >= 16");
    if (!(grid.dx > 0.0) || !(grid.dy > 0.0)) throw ParameterError("beam grid: spacings must be > 0");
    if (!(k > 0.0) || !std::isfinite(k)) throw ParameterError("beam: wavenumber must be > 0");
    if (!std::isfinite(z)) throw ParameterError("beam: non-finite z");
    if (grid.data.size() != static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny))
        throw ParameterError("beam: sample count does not match grid");
    for (const cplx& v : grid.data) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ParameterError("beam: non-finite amplitude");
    }
}

void LGModeSpec::validate() const {
    if (p < 0) throw ParameterError("LG mode: p must be >= 0");
    if (!(w0 > 0.0) || !std::isfinite(w0)) throw ParameterError("LG mode: waist must be > 0");
}

double generalized_laguerre(int p, double alpha, double x) {
    if (p < 0) throw ParameterError("generalized_laguerre: degree must be >= 0");
    double prev = 1.0;
    if (p == 0) return prev;
    double cur = 1.0 + alpha - x;
    for (int n = 1; n < p; ++n) {
        const double next = ((2.0 * n + 1.0 + alpha - x) * cur - (n + alpha) * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

cplx lg_amplitude(const LGModeSpec& spec, double x, double y) {
    const double r2 = x * x + y * y;
    const double w2 = spec.w0 * spec.w0;
    const int al = std::abs(spec.ell);
    const double radial = std::pow(std::sqrt(2.0 * r2 / w2), al) * generalized_laguerre(spec.p, al, 2.0 * r2 / w2) *
                          std::exp(-r2 / w2);
    const double phi = std::atan2(y, x);
    return std::polar(radial, spec.ell * phi);
}

BeamField lg_mode(const LGModeSpec& spec, const GridSpec& g) {
    spec.validate();
    if (g.dx > spec.w0 / 8.0 || g.dy > spec.w0 / 8.0)
        throw ParameterError(fmt::format("LG mode: grid spacing must resolve the waist (w0/dx >= 8, got {:.3g})",
                                         spec.w0 / std::max(g.dx, g.dy)));
    if (g.nx * g.dx < 6.0 * spec.w0 || g.ny * g.dy < 6.0 * spec.w0)
        throw ParameterError("LG mode: grid extent must be at least 6 w0");
    BeamField field;
    field.k = g.k;
    field.z = 0.0;
    field.grid = ComplexGrid::sample(g.nx, g.ny, g.dx, g.dy, [&](double x, double y) { return lg_amplitude(spec, x, y); });
    field.validate();
    const double norm = std::sqrt(field.grid.norm2());
    for (cplx& v : field.grid.data) v /= norm;
    return field;
}

double edge_energy_fraction(const BeamField& field) {
    field.validate();
    std::vector<cplx> spec = field.grid.data;
    fft::transform_2d(spec, field.grid.nx, field.grid.ny, false);
    const double kx_cut = 0.75 * std::numbers::pi / field.grid.dx;
    const double ky_cut = 0.75 * std::numbers::pi / field.grid.dy;
    double total = 0.0, edge = 0.0;
    for (int iy = 0; iy < field.grid.ny; ++iy) {
        const double ky = std::abs(wavenumber(iy, field.grid.ny, field.grid.dy));
        for (int ix = 0; ix < field.grid.nx; ++ix) {
            const double kx = std::abs(wavenumber(ix, field.grid.nx, field.grid.dx));
            const double e = std::norm(spec[static_cast<std::size_t>(iy) * field.grid.nx + ix]);
            total += e;
            if (kx > kx_cut || ky > ky_cut) edge += e;
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

BeamField propagate(const BeamField& field, double dz, int steps) {
    field.validate();
    if (!std::isfinite(dz) || steps < 0) throw ParameterError("propagate: need finite dz and steps >= 0");
    const double fraction = edge_energy_fraction(field);
    if (fraction > kAliasingLimit)
        throw AliasingError(fmt::format("propagate: {:.3g}% of spectral energy near Nyquist", 100.0 * fraction));

    const int nx = field.grid.nx, ny = field.grid.ny;
    std::vector<cplx> phase(field.grid.data.size());
    for (int iy = 0; iy < ny; ++iy) {
        const double ky = wavenumber(iy, ny, field.grid.dy);
        for (int ix = 0; ix < nx; ++ix) {
            const double kx = wavenumber(ix, nx, field.grid.dx);
            phase[static_cast<std::size_t>(iy) * nx + ix] = std::polar(1.0, -(kx * kx + ky * ky) * dz / (2.0 * field.k));
        }
    }

    BeamField out = field;
    for (int s = 0; s < steps; ++s) {
        fft::transform_2d(out.grid.data, nx, ny, false);
        for (std::size_t i = 0; i < phase.size(); ++i) out.grid.data[i] *= phase[i];
        fft::transform_2d(out.grid.data, nx, ny, true);
        out.z += dz;
    }
    return out;
}

double beam_width(const BeamField& field) {
    const ComplexGrid& g = field.grid;
    double total = 0.0, mx = 0.0, my = 0.0;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const double w = std::norm(g(ix, iy));
            total += w;
            mx += w * g.x(ix);
            my += w * g.y(iy);
        }
    if (total == 0.0) return 0.0;
    mx /= total;
    my /= total;
    double r2 = 0.0;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const double dx = g.x(ix) - mx, dy = g.y(iy) - my;
            r2 += std::norm(g(ix, iy)) * (dx * dx + dy * dy);
        }
    return std::sqrt(2.0 * r2 / total);
}

CircleLoop CircleLoop::physical(const BeamField& field, double x, double y, double r) {
    const ComplexGrid& g = field.grid;
    // Inverse of x_i = (i - nx/2 + 1/2) dx.
    return {x / g.dx + 0.5 * g.nx - 0.5, y / g.dy + 0.5 * g.ny - 0.5, r / g.dx};
}

namespace {

cplx bilinear(const ComplexGrid& g, double fx, double fy) {
    const int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx - 2);
    const int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny - 2);
    const double s = fx - ix, t = fy - iy;
    return (1 - s) * (1 - t) * g(ix, iy) + s * (1 - t) * g(ix + 1, iy) + s * t * g(ix + 1, iy + 1) +
           (1 - s) * t * g(ix, iy + 1);
}

} // namespace

int topological_charge(const BeamField& field, const CircleLoop& loop) {
    const ComplexGrid& g = field.grid;
    if (!(loop.radius > 0.0)) throw ParameterError("topological_charge: loop radius must be > 0");
    if (loop.cx - loop.radius < 0.0 || loop.cx + loop.radius > g.nx - 1 || loop.cy - loop.radius < 0.0 ||
        loop.cy + loop.radius > g.ny - 1)
        throw ParameterError("topological_charge: loop leaves the grid");
    const double floor = 1e-6 * g.max_abs();

    int samples = std::max(64, static_cast<int>(std::ceil(4.0 * kTwoPi * loop.radius)));
    for (int attempt = 0; attempt < 8; ++attempt, samples *= 2) {
        std::vector<cplx> values(static_cast<std::size_t>(samples));
        for (int i = 0; i < samples; ++i) {
            const double theta = kTwoPi * i / samples;
            values[i] = bilinear(g, loop.cx + loop.radius * std::cos(theta), loop.cy + loop.radius * std::sin(theta));
            if (!(std::abs(values[i]) >= floor) || floor == 0.0)
                throw ParameterError("topological_charge: amplitude on the loop is too small (vortex core on loop)");
        }
        double total = 0.0, largest = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double step = std::arg(values[(i + 1) % samples] / values[i]);
            largest = std::max(largest, std::abs(step));
            total += step;
        }
        if (largest < 0.5 * std::numbers::pi) return static_cast<int>(std::lround(total / kTwoPi));
    }
    throw ParameterError("topological_charge: phase steps stay too large after refinement");
}

namespace {

/// Zero of the bilinear interpolant in the unit cell, Newton from the centre.
bool bilinear_zero(const std::array<cplx, 4>& c, double& s, double& t) {
    // f(s,t) = c0 + s (c1 - c0) + t (c3 - c0) + s t (c0 - c1 + c2 - c3)
    const cplx a = c[0], b = c[1] - c[0], d = c[3] - c[0], e = c[0] - c[1] + c[2] - c[3];
    s = 0.5;
    t = 0.5;
    for (int it = 0; it < 30; ++it) {
        const cplx f = a + s * b + t * d + s * t * e;
        const cplx fs = b + t * e, ft = d + s * e;
        // Real 2x2 system [Re fs Re ft; Im fs Im ft] [ds dt] = -[Re f; Im f]
        const double det = fs.real() * ft.imag() - ft.real() * fs.imag();
        if (det == 0.0) return false;
        const double ds = (-f.real() * ft.imag() + ft.real() * f.imag()) / det;
        const double dt = (-fs.real() * f.imag() + fs.imag() * f.real()) / det;
        s += ds;
        t += dt;
        if (std::abs(ds) + std::abs(dt) < 1e-14) break;
    }
    return std::isfinite(s) && std::isfinite(t) && s >= -0.01 && s <= 1.01 && t >= -0.01 && t <= 1.01;
}

} // namespace

std::vector<Vortex> find_vortices(const BeamField& field, double amplitude_floor) {
    field.validate();
    const ComplexGrid& g = field.grid;
    const double floor = amplitude_floor * g.max_abs();
    std::vector<Vortex> out;
    if (floor == 0.0 && g.max_abs() == 0.0) return out;
    for (int iy = 0; iy + 1 < g.ny; ++iy) {
        for (int ix = 0; ix + 1 < g.nx; ++ix) {
            // Counter-clockwise in the (x, y) plane.
            const std::array<cplx, 4> c{g(ix, iy), g(ix + 1, iy), g(ix + 1, iy + 1), g(ix, iy + 1)};
            double largest = 0.0;
            bool has_zero = false;
            for (const cplx& v : c) {
                largest = std::max(largest, std::abs(v));
                if (v == cplx{0.0, 0.0}) has_zero = true;
            }
            if (has_zero || largest < floor) continue;
            double winding = 0.0;
            for (int i = 0; i < 4; ++i) winding += std::arg(c[(i + 1) % 4] / c[i]);
            const int charge = static_cast<int>(std::lround(winding / kTwoPi));
            if (charge == 0) continue;
            double s = 0.5, t = 0.5;
            if (!bilinear_zero(c, s, t)) {
                s = 0.5;
                t = 0.5;
            }
            s = std::clamp(s, 0.0, 1.0);
            t = std::clamp(t, 0.0, 1.0);
            out.push_back({g.x(ix) + s * g.dx, g.y(iy) + t * g.dy, charge});
        }
    }
    return out;
}

int total_charge(const std::vector<Vortex>& vortices) {
    int total = 0;
    for (const Vortex& v : vortices) total += v.charge;
    return total;
}

double paraxial_validity(const BeamField& field, double dz) {
    if (!(dz > 0.0)) throw ParameterError("paraxial_validity: dz must be > 0");
    const BeamField ahead = propagate(field, dz, 1);
    const BeamField behind = propagate(field, -dz, 1);
    double first = 0.0, second = 0.0, base = 0.0, change = 0.0;
    for (std::size_t i = 0; i < field.grid.data.size(); ++i) {
        const cplx u0 = field.grid.data[i], up = ahead.grid.data[i], um = behind.grid.data[i];
        first += std::norm(2.0 * field.k * (up - um) / (2.0 * dz));
        second += std::norm((up - 2.0 * u0 + um) / (dz * dz));
        base += std::norm(u0);
        change += std::norm(up - um);
    }
    if (first == 0.0 || change <= 1e-26 * base) return 0.0;
    return std::sqrt(second / first);
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> bytes{};
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(bytes.data(), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), 8);
    if (!in) throw ParameterError("read_field: truncated input");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

constexpr char kMagic[8] = {'K', 'V', 'B', 'E', 'A', 'M', '0', '1'};

} // namespace

void write_field(std::ostream& out, const BeamField& field) {
    field.validate();
    out.write(kMagic, 8);
    put_u64(out, static_cast<std::uint64_t>(field.grid.nx));
    put_u64(out, static_cast<std::uint64_t>(field.grid.ny));
    put_f64(out, field.grid.dx);
    put_f64(out, field.grid.dy);
    put_f64(out, field.k);
    put_f64(out, field.z);
    for (const cplx& v : field.grid.data) {
        put_f64(out, v.real());
        put_f64(out, v.imag());
    }
}

BeamField read_field(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) throw ParameterError("read_field: bad magic");
    const std::uint64_t nx = get_u64(in), ny = get_u64(in);
    if (nx == 0 || ny == 0 || nx > (1u << 16) || ny > (1u << 16)) throw ParameterError("read_field: bad grid size");
    BeamField field;
    const double dx = get_f64(in), dy = get_f64(in);
    field.k = get_f64(in);
    field.z = get_f64(in);
    field.grid = ComplexGrid(static_cast<int>(nx), static_cast<int>(ny), dx, dy);
    for (cplx& v : field.grid.data) {
        const double re = get_f64(in);
        const double im = get_f64(in);
        v = cplx{re, im};
    }
    field.validate();
    return field;
}

void write_intensity_phase_csv(std::ostream& out, const BeamField& field) {
    const ComplexGrid& g = field.grid;
    out << "x,y,intensity,phase\n";
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const cplx v = g(ix, iy);
            out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", g.x(ix), g.y(iy), std::norm(v), std::arg(v));
        }
}

} // namespace kirchhoff::paraxial
