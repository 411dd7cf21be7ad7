#pragma once

// Classical orthogonal polynomials (physicists' Hermite, generalized Laguerre,
// Jacobi) in monic normalization. Serves as the reference against which the
// electrostatic equilibria are certified, so nothing here depends on the
// stieltjes solver.
//
// Conventional normalizations, for reference:
//   H_n(x)        = 2^n * monic
//   L_n^(a)(x)    = (-1)^n / n! * monic
//   P_n^(a,b)(x)  = (n+a+b+1)_n / (2^n n!) * monic

#include <string_view>
#include <vector>

namespace kirchhoff::orthopoly {

enum class Family { Hermite, Laguerre, Jacobi };

std::string_view to_string(Family family);
/// Case-insensitive; throws ParameterError on unknown names.
Family family_from_string(std::string_view name);

struct PolynomialSpec {
    Family family = Family::Hermite;
    int degree = 1;
    double alpha = 0.0; ///< Laguerre and Jacobi
    double beta = 0.0;  ///< Jacobi only

    static PolynomialSpec hermite(int n) { return {Family::Hermite, n, 0.0, 0.0}; }
    static PolynomialSpec laguerre(int n, double alpha) { return {Family::Laguerre, n, alpha, 0.0}; }
    static PolynomialSpec jacobi(int n, double alpha, double beta) { return {Family::Jacobi, n, alpha, beta}; }

    /// Coulomb angular momentum l >= 0 gives alpha = 2l + 1.
    static PolynomialSpec from_coulomb(int n, double l);
    /// Fixed charges p, q > 0 at +1 and -1 give alpha = 2p - 1, beta = 2q - 1.
    static PolynomialSpec from_jacobi_charges(int n, double p, double q);

    /// Throws ParameterError unless n >= 1, alpha > -1, beta > -1 and all finite.
    void validate() const;
};

/// Monic recurrence p_{k+1} = (x - a_k) p_k - b_k p_{k-1}, k = 0..n-1.
/// b[0] holds the total mass of the weight.
struct RecurrenceCoefficients {
    std::vector<double> a;
    std::vector<double> b;
};

RecurrenceCoefficients recurrence(const PolynomialSpec& spec);

struct PolyValue {
    double value = 0.0;
    double derivative = 0.0;
    double second_derivative = 0.0;
};

/// Monic p_n and its first two derivatives via the (differentiated) recurrence.
PolyValue evaluate(const PolynomialSpec& spec, double x);

/// All n zeros, strictly increasing. Tridiagonal eigensolve followed by Newton
/// polish. Throws ConvergenceError if the eigensolver exceeds its iteration cap.
std::vector<double> zeros(const PolynomialSpec& spec);

/// Residual of the family's second-order ODE at x:
///   Hermite   f'' - 2x f' + 2n f
///   Laguerre  x f'' + (alpha + 1 - x) f' + n f
///   Jacobi    (1 - x^2) f'' + [beta - alpha - (alpha + beta + 2) x] f' + n (n + alpha + beta + 1) f
double ode_residual(const PolynomialSpec& spec, double x);

/// Sum of the magnitudes of the three ODE terms at x; divides ode_residual to
/// give a relative residual.
double ode_scale(const PolynomialSpec& spec, double x);

/// Eigenvalues of the symmetric tridiagonal matrix with the given diagonal and
/// off-diagonal (size n-1), ascending. Implicit QL with Wilkinson shifts.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diagonal,
                                            std::vector<double> off_diagonal,
                                            int max_sweeps_per_eigenvalue = 60);

} // namespace kirchhoff::orthopoly
