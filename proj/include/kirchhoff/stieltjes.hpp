#pragma once

// Stationary Kirchhoff equations on the real line: n unit charges with
// logarithmic repulsion in an external field W,
//
//     R_k(x) = sum_{j != k} 1/(x_k - x_j) - W(x_k) = 0,
//
// which are the critical points of the electrostatic energy
//
//     E(x) = -sum_{i<j} ln|x_i - x_j| + sum_k V(x_k),   V' = W,
//
// so grad E = -R and the Jacobian of R is -Hess E. For the Hermite, Coulomb and
// Jacobi superpotentials the minimisers are zeros of H_n, L_n^(2l+1) and
// P_n^(2p-1, 2q-1).

#include "kirchhoff/background.hpp"
#include "kirchhoff/orthopoly.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace kirchhoff::stieltjes {

struct EquilibriumProblem {
    int n = 1;
    BackgroundFlow background = BackgroundFlow::hermite_linear();
    std::optional<std::vector<double>> initial_guess;

    /// Background must be HermiteLinear, Coulomb, Jacobi or CustomRational with
    /// real poles and residues; the guess must be distinct and inside the domain.
    void validate() const;
};

enum class Method { Newton, GradientFlow, Hybrid };
std::string_view to_string(Method method);

struct EquilibriumReport {
    BackgroundFlow background;
    std::vector<double> positions; ///< strictly increasing
    double residual_inf = 0.0;
    int iterations = 0;
    Method method = Method::Newton;
    bool converged = false;
    /// Unset until certify() runs; never set for CustomRational.
    std::optional<bool> certified;
    std::optional<double> max_zero_deviation;
    std::optional<double> max_ode_residual; ///< relative, at the returned positions
};

/// Natural domain of the background: Coulomb (0, inf), Jacobi (-1, 1), else R.
bool in_domain(const BackgroundFlow& bg, double x);

/// Throws DomainError outside the natural domain or at a fixed pole, and
/// ParameterError for coincident points.
std::vector<double> residual(const std::vector<double>& x, const BackgroundFlow& bg);
Eigen::MatrixXd jacobian(const std::vector<double>& x, const BackgroundFlow& bg);
double energy(const std::vector<double>& x, const BackgroundFlow& bg);

/// Chebyshev points cos((2k-1)pi/(2n)) mapped into the domain:
/// Hermite and custom scaled by sqrt(2n), Coulomb onto (0, 4n), Jacobi unchanged.
std::vector<double> default_initial_guess(int n, const BackgroundFlow& bg);

struct GradientFlowResult {
    std::vector<double> positions;
    std::vector<double> energies; ///< E at the start and after each accepted step
    int steps = 0;
};

/// Armijo-backtracked descent along -grad E = R. Every accepted step strictly
/// lowers E and keeps the points ordered and inside the domain. Stops after
/// max_steps or once ||R||_inf <= tol.
GradientFlowResult gradient_flow(std::vector<double> x, const BackgroundFlow& bg, int max_steps, double tol);

inline constexpr double kDefaultTolerance = 1e-12;

/// Damped Newton with the analytic Jacobian; each step is halved (at most 30
/// times) until the iterate is ordered, inside the domain and lowers ||R||.
/// When halving fails, a burst of gradient flow runs before Newton resumes.
/// Converged when ||R||_inf <= tolerance * max(1, s), with s the largest
/// sum_j |1/(x_k - x_j)| + |W(x_k)| over k; two polish steps follow.
/// Non-convergence returns the best iterate with converged = false.
EquilibriumReport solve(const EquilibriumProblem& problem, double tolerance = kDefaultTolerance,
                        int max_iter = 500);

/// Oracle polynomial for a background: Hermite, Laguerre(2l+1), Jacobi(2p-1, 2q-1).
/// nullopt for CustomRational.
std::optional<orthopoly::PolynomialSpec> matching_polynomial(const BackgroundFlow& bg, int n);

/// Compares the report against orthopoly::zeros(spec). Throws ParameterError if
/// the spec does not correspond to the report's background.
EquilibriumReport certify(EquilibriumReport report, const orthopoly::PolynomialSpec& spec, double tol = 1e-10);

/// solve() followed by certify() when the background has an oracle.
EquilibriumReport solve_and_certify(const EquilibriumProblem& problem, double tolerance = kDefaultTolerance,
                                    double certify_tol = 1e-10, int max_iter = 500);

struct PartnerPotentials {
    double plus = 0.0;  ///< V+ = W^2 - W' + E
    double minus = 0.0; ///< V- = W^2 + W' + E
};

PartnerPotentials partner_potentials(const std::function<double(double)>& w,
                                     const std::function<double(double)>& w_prime, double factorization_energy,
                                     double x);
PartnerPotentials partner_potentials(const BackgroundFlow& bg, double factorization_energy, double x);

/// family, parameters, n, positions, residual_inf, iterations, method,
/// converged, and certified / max_zero_deviation when certification ran.
nlohmann::json to_json(const EquilibriumReport& report);

} // namespace kirchhoff::stieltjes
