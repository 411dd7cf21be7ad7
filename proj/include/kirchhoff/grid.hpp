#pragma once

#include "kirchhoff/background.hpp"

#include <functional>
#include <vector>

namespace kirchhoff {

/// Complex samples on a uniform, cell-centred 2-D grid symmetric about the
/// origin: x_i = (i - nx/2 + 1/2) dx. Storage is row-major with x fastest,
/// data[iy * nx + ix].
struct ComplexGrid {
    int nx = 0;
    int ny = 0;
    double dx = 1.0;
    double dy = 1.0;
    std::vector<cplx> data;

    ComplexGrid() = default;
    ComplexGrid(int nx_, int ny_, double dx_, double dy_)
        : nx(nx_), ny(ny_), dx(dx_), dy(dy_), data(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_)) {}

    double x(int ix) const { return (ix - 0.5 * nx + 0.5) * dx; }
    double y(int iy) const { return (iy - 0.5 * ny + 0.5) * dy; }
    cplx& operator()(int ix, int iy) { return data[static_cast<std::size_t>(iy) * nx + ix]; }
    const cplx& operator()(int ix, int iy) const { return data[static_cast<std::size_t>(iy) * nx + ix]; }

    /// Fills data with fn(x, y).
    static ComplexGrid sample(int nx, int ny, double dx, double dy, const std::function<cplx(double, double)>& fn);

    /// sum |u|^2 dx dy
    double norm2() const;
    /// sum conj(a) b dx dy; grids must share shape and spacing.
    static cplx inner(const ComplexGrid& a, const ComplexGrid& b);
    double max_abs() const;
};

} // namespace kirchhoff
