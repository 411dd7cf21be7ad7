#include "kirchhoff/landau.hpp"

#include "kirchhoff/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kirchhoff::landau {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_distinct(std::span<const cplx> z, const char* what) {
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag()))
            throw ParameterError(std::string(what) + ": non-finite position");
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            if (z[i] == z[j]) throw ParameterError(std::string(what) + ": coincident positions");
        }
    }
}

void require_count(std::span<const cplx> z, const LaughlinParams& params) {
    params.validate();
    if (z.size() != static_cast<std::size_t>(params.particles))
        throw ParameterError("Laughlin: position count differs from N");
}

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const cplx& e : v) m = std::max(m, std::abs(e));
    return m;
}

double sum_sq(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& e : v) s += std::norm(e);
    return s;
}

} // namespace

void LaughlinParams::validate() const {
    if (particles < 1) throw ParameterError("Laughlin: N must be >= 1");
    if (m_exp < 1 || m_exp % 2 == 0) throw ParameterError("Laughlin: exponent must be a positive odd integer");
    if (!(l_b > 0.0) || !std::isfinite(l_b)) throw ParameterError("Laughlin: magnetic length must be > 0");
}

cplx log_laughlin(std::span<const cplx> z, const LaughlinParams& params) {
    require_count(z, params);
    require_distinct(z, "log_laughlin");
    cplx acc = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        for (std::size_t i = 0; i < j; ++i) acc += static_cast<double>(params.m_exp) * std::log(z[j] - z[i]);
        acc -= std::norm(z[j]) * params.omega();
    }
    return acc;
}

cplx berry_connection(const QuasiholeSet& holes, std::size_t j, double l_b) {
    if (j >= holes.eta.size()) throw ParameterError("berry_connection: index out of range");
    if (!(l_b > 0.0)) throw ParameterError("berry_connection: magnetic length must be > 0");
    require_distinct(holes.eta, "berry_connection");
    cplx pair = 0.0;
    for (std::size_t k = 0; k < holes.eta.size(); ++k) {
        if (k != j) pair += 1.0 / (holes.eta[k] - holes.eta[j]);
    }
    return -kI * holes.nu / 2.0 * pair + kI * holes.nu * std::conj(holes.eta[j]) / (4.0 * l_b * l_b);
}

std::vector<cplx> stationarity_residual(std::span<const cplx> z, const LaughlinParams& params) {
    require_count(z, params);
    require_distinct(z, "stationarity_residual");
    const double m = params.m_exp;
    const double omega = params.omega();
    std::vector<cplx> s(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (i != j) acc += m / (z[j] - z[i]);
        }
        s[j] = acc - omega * std::conj(z[j]);
    }
    return s;
}

std::vector<cplx> default_planar_guess(const LaughlinParams& params) {
    params.validate();
    const int n = params.particles;
    if (n == 1) return {cplx{0.0, 0.0}};
    const double radius = 0.9 * params.l_b * std::sqrt(2.0 * params.m_exp * (n - 1));
    std::vector<cplx> z(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double angle = 2.0 * std::numbers::pi * j / n + 0.05 * std::sin(1.0 + j);
        z[j] = std::polar(radius, angle);
    }
    return z;
}

PlanarEquilibrium solve_planar_equilibrium(const LaughlinParams& params, std::vector<cplx> guess, double tol,
                                           int max_iter) {
    require_count(guess, params);
    require_distinct(guess, "solve_planar_equilibrium");
    if (!(tol > 0.0)) throw ParameterError("solve_planar_equilibrium: tolerance must be > 0");
    const Eigen::Index n = static_cast<Eigen::Index>(guess.size());
    const double m = params.m_exp;
    const double omega = params.omega();

    PlanarEquilibrium out;
    std::vector<cplx> z = std::move(guess);
    std::vector<cplx> s = stationarity_residual(z, params);
    double merit = sum_sq(s);
    // One damped least-squares Newton step; false when no step lowers ||S||.
    auto newton_step = [&]() {
        // dS_j = A_jk dz_k + B_jk dzbar_k with A holomorphic, B = -Omega on the diagonal.
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        Eigen::VectorXd rhs(2 * n);
        for (Eigen::Index j = 0; j < n; ++j) {
            cplx diag = 0.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                if (k == j) continue;
                const cplx d = z[j] - z[k];
                const cplx a = m / (d * d);
                diag -= a;
                const cplx dx = a, dy = kI * a;
                jac(j, k) = dx.real();
                jac(n + j, k) = dx.imag();
                jac(j, n + k) = dy.real();
                jac(n + j, n + k) = dy.imag();
            }
            const cplx b = -omega;
            const cplx dx = diag + b, dy = kI * (diag - b);
            jac(j, j) = dx.real();
            jac(n + j, j) = dx.imag();
            jac(j, n + j) = dy.real();
            jac(n + j, n + j) = dy.imag();
            rhs[j] = -s[j].real();
            rhs[n + j] = -s[j].imag();
        }
        const Eigen::VectorXd delta = jac.completeOrthogonalDecomposition().solve(rhs);
        if (!delta.allFinite()) return false;

        bool accepted = false;
        double lambda = 1.0;
        std::vector<cplx> trial(z.size());
        for (int halving = 0; halving <= 30; ++halving, lambda *= 0.5) {
            for (Eigen::Index j = 0; j < n; ++j) trial[j] = z[j] + lambda * cplx{delta[j], delta[n + j]};
            bool distinct = true;
            for (std::size_t a = 0; a < trial.size() && distinct; ++a)
                for (std::size_t b = a + 1; b < trial.size(); ++b)
                    if (trial[a] == trial[b]) distinct = false;
            if (!distinct) continue;
            const std::vector<cplx> s_trial = stationarity_residual(trial, params);
            const double merit_trial = sum_sq(s_trial);
            if (merit_trial < merit) {
                z = trial;
                s = s_trial;
                merit = merit_trial;
                accepted = true;
                break;
            }
        }
        return accepted;
    };

    int iter = 0;
    while (max_abs(s) > tol && iter < max_iter) {
        ++iter;
        if (!newton_step()) break;
    }
    // Two polish steps pull the positions, not only the residual, to round-off.
    if (max_abs(s) <= tol) {
        for (int polish = 0; polish < 2 && merit > 0.0; ++polish)
            if (!newton_step()) break;
    }
    out.positions = std::move(z);
    out.residual_inf = max_abs(s);
    out.iterations = iter;
    out.converged = out.residual_inf <= tol;
    return out;
}

namespace {

/// Second-order first derivative along one axis of the grid.
ComplexGrid partial(const ComplexGrid& f, bool along_y) {
    ComplexGrid out(f.nx, f.ny, f.dx, f.dy);
    const int len = along_y ? f.ny : f.nx;
    const double h = along_y ? f.dy : f.dx;
    auto at = [&](int along, int across) -> const cplx& { return along_y ? f(across, along) : f(along, across); };
    auto put = [&](int along, int across) -> cplx& { return along_y ? out(across, along) : out(along, across); };
    const int other = along_y ? f.nx : f.ny;
    for (int c = 0; c < other; ++c) {
        put(0, c) = (-3.0 * at(0, c) + 4.0 * at(1, c) - at(2, c)) / (2.0 * h);
        for (int i = 1; i + 1 < len; ++i) put(i, c) = (at(i + 1, c) - at(i - 1, c)) / (2.0 * h);
        put(len - 1, c) = (3.0 * at(len - 1, c) - 4.0 * at(len - 2, c) + at(len - 3, c)) / (2.0 * h);
    }
    return out;
}

void require_grid(const ComplexGrid& g) {
    if (g.nx < 3 || g.ny < 3) throw ParameterError("grid needs at least 3 points per axis");
    if (!(g.dx > 0.0) || !(g.dy > 0.0)) throw ParameterError("grid spacing must be > 0");
}

} // namespace

ComplexGrid ladder_apply(const ComplexGrid& field, Ladder which, double l_b) {
    require_grid(field);
    if (!(l_b > 0.0)) throw ParameterError("ladder_apply: magnetic length must be > 0");
    const ComplexGrid fx = partial(field, false);
    const ComplexGrid fy = partial(field, true);
    ComplexGrid out(field.nx, field.ny, field.dx, field.dy);
    const cplx prefactor = -kI * std::numbers::sqrt2;
    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            const cplx z{field.x(ix), field.y(iy)};
            const cplx u = field(ix, iy);
            if (which == Ladder::Lower) {
                const cplx dzbar = 0.5 * (fx(ix, iy) + kI * fy(ix, iy));
                out(ix, iy) = prefactor * (l_b * dzbar + z * u / (4.0 * l_b));
            } else {
                const cplx dz = 0.5 * (fx(ix, iy) - kI * fy(ix, iy));
                out(ix, iy) = prefactor * (l_b * dz - std::conj(z) * u / (4.0 * l_b));
            }
        }
    }
    return out;
}

ComplexGrid angular_term(const ComplexGrid& field, double omega) {
    require_grid(field);
    const ComplexGrid fx = partial(field, false);
    const ComplexGrid fy = partial(field, true);
    ComplexGrid out(field.nx, field.ny, field.dx, field.dy);
    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            const cplx z{field.x(ix), field.y(iy)};
            const cplx dz = 0.5 * (fx(ix, iy) - kI * fy(ix, iy));
            const cplx dzbar = 0.5 * (fx(ix, iy) + kI * fy(ix, iy));
            out(ix, iy) = omega * (std::conj(z) * dzbar - z * dz);
        }
    }
    return out;
}

std::vector<double> dlu_residual(std::span<const double> f, double omega, double h, double r0) {
    const std::size_t n = f.size();
    if (n < 3) throw ParameterError("dlu_residual: need at least 3 radial samples");
    if (!(h > 0.0) || !(r0 >= 0.0)) throw ParameterError("dlu_residual: need h > 0 and r0 >= 0");
    std::vector<double> out(n);
    const double h2 = h * h;
    for (std::size_t i = 0; i < n; ++i) {
        double second;
        if (i == 0) {
            second = r0 == 0.0 ? 2.0 * (f[1] - f[0]) / h2
                     : n >= 4 ? (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2
                              : (f[0] - 2.0 * f[1] + f[2]) / h2;
        } else if (i + 1 == n) {
            second = n >= 4 ? (2.0 * f[i] - 5.0 * f[i - 1] + 4.0 * f[i - 2] - f[i - 3]) / h2
                            : (f[i] - 2.0 * f[i - 1] + f[i - 2]) / h2;
        } else {
            second = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
        }
        const double r = r0 + static_cast<double>(i) * h;
        out[i] = second + omega * omega * r * r * f[i];
    }
    return out;
}

nlohmann::json to_json(const PlanarEquilibrium& eq, const LaughlinParams& params) {
    nlohmann::json pos = nlohmann::json::array();
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0, rsum = 0.0;
    for (const cplx& z : eq.positions) {
        pos.push_back({z.real(), z.imag()});
        const double r = std::abs(z);
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        rsum += r;
    }
    nlohmann::json j;
    j["family"] = "laughlin";
    j["parameters"] = {{"N", params.particles}, {"m_exp", params.m_exp}, {"l_B", params.l_b}};
    j["n"] = eq.positions.size();
    j["positions"] = pos;
    j["residual_inf"] = eq.residual_inf;
    j["iterations"] = eq.iterations;
    j["method"] = "newton";
    j["converged"] = eq.converged;
    j["radius"] = {{"min", rmin}, {"max", rmax}, {"mean", eq.positions.empty() ? 0.0 : rsum / eq.positions.size()}};
    return j;
}

} // namespace kirchhoff::landau
