#pragma once

#include "kirchhoff/background.hpp"

#include <span>

namespace kirchhoff::fft {

bool is_power_of_two(std::size_t n);

/// In-place iterative radix-2 transform. Forward uses exp(-2 pi i jk/N) and no
/// scaling; inverse uses exp(+2 pi i jk/N) and divides by N. Throws
/// ParameterError unless the length is a power of two.
void transform(std::span<cplx> data, bool inverse);

/// Row-major nx-by-ny array (x fastest): 1-D transforms along x then y.
void transform_2d(std::span<cplx> data, int nx, int ny, bool inverse);

} // namespace kirchhoff::fft
