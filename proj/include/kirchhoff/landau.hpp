#pragma once

#include "kirchhoff/background.hpp"
#include "kirchhoff/grid.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <vector>

namespace kirchhoff::landau {

struct LaughlinParams {
    int particles = 1;   ///< N
    int m_exp = 1;       ///< odd exponent, filling 1/m_exp
    double l_b = 1.0;    ///< magnetic length

    double omega() const { return 1.0 / (4.0 * l_b * l_b); }
    /// N >= 1, m_exp odd and >= 1, l_B > 0.
    void validate() const;
};

struct QuasiholeSet {
    std::vector<cplx> eta;
    double nu = 1.0;
};

/// sum_{i<j} m log(z_j - z_i) - sum_j |z_j|^2 / (4 l_B^2), each log on the
/// principal branch. Only the imaginary part depends on the branch (mod 2 pi).
cplx log_laughlin(std::span<const cplx> z, const LaughlinParams& params);

/// A(eta_j) = -(i nu / 2) sum_{k != j} 1/(eta_k - eta_j) + i nu conj(eta_j) / (4 l_B^2).
cplx berry_connection(const QuasiholeSet& holes, std::size_t j, double l_b);

/// S_j = d/dz_j log psi = sum_{i != j} m/(z_j - z_i) - conj(z_j)/(4 l_B^2).
/// The antiholomorphic partner equation is conj(S_j), which is what the
/// residual of the conjugated configuration returns.
std::vector<cplx> stationarity_residual(std::span<const cplx> z, const LaughlinParams& params);

struct PlanarEquilibrium {
    std::vector<cplx> positions;
    double residual_inf = 0.0; ///< max_j |S_j|
    int iterations = 0;
    bool converged = false;
};

/// Newton in the 2N real coordinates on (Re S, Im S). The rotational zero mode
/// makes the Jacobian singular at solutions, so each step is the minimum-norm
/// least-squares step, backtracked on ||S||.
PlanarEquilibrium solve_planar_equilibrium(const LaughlinParams& params, std::vector<cplx> guess,
                                           double tol = 1e-10, int max_iter = 100);

/// Perturbed regular N-gon: radius 0.9 l_B sqrt(2 m (N-1)) (the circular
/// equilibrium sits at the unscaled radius) with a fixed angular jitter per
/// vertex. Origin for N = 1.
std::vector<cplx> default_planar_guess(const LaughlinParams& params);

enum class Ladder { Lower, Raise };

/// a  = -i sqrt2 (l_B d/dzbar + z / (4 l_B))
/// a+ = -i sqrt2 (l_B d/dz   - conj(z) / (4 l_B))
/// Second-order centred differences inside, second-order one-sided at edges.
/// Throws ParameterError for grids with fewer than 3 points per axis.
ComplexGrid ladder_apply(const ComplexGrid& field, Ladder which, double l_b);

/// Omega (conj(z) d/dzbar - z d/dz) f on the grid; vanishes for radial f.
ComplexGrid angular_term(const ComplexGrid& field, double omega);

/// f'' + Omega^2 r^2 f on a uniform radial grid r_i = r0 + i h. At r0 = 0 the
/// even extension f(-h) = f(h) is used. Diagnostic only.
std::vector<double> dlu_residual(std::span<const double> f, double omega, double h, double r0 = 0.0);

nlohmann::json to_json(const PlanarEquilibrium& eq, const LaughlinParams& params);

} // namespace kirchhoff::landau
