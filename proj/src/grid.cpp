#include "kirchhoff/grid.hpp"

#include "kirchhoff/errors.hpp"

#include <algorithm>

namespace kirchhoff {

ComplexGrid ComplexGrid::sample(int nx, int ny, double dx, double dy,
                                const std::function<cplx(double, double)>& fn) {
    if (nx < 1 || ny < 1 || !(dx > 0.0) || !(dy > 0.0)) throw ParameterError("grid: bad shape or spacing");
    ComplexGrid g(nx, ny, dx, dy);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) g(ix, iy) = fn(g.x(ix), g.y(iy));
    return g;
}

double ComplexGrid::norm2() const {
    double s = 0.0;
    for (const cplx& v : data) s += std::norm(v);
    return s * dx * dy;
}

cplx ComplexGrid::inner(const ComplexGrid& a, const ComplexGrid& b) {
    if (a.nx != b.nx || a.ny != b.ny || a.dx != b.dx || a.dy != b.dy)
        throw ParameterError("grid inner product: shape mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) s += std::conj(a.data[i]) * b.data[i];
    return s * a.dx * a.dy;
}

double ComplexGrid::max_abs() const {
    double m = 0.0;
    for (const cplx& v : data) m = std::max(m, std::abs(v));
    return m;
}

} // namespace kirchhoff
