#include "kirchhoff/orthopoly.hpp"

#include "kirchhoff/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace kirchhoff::orthopoly {

std::string_view to_string(Family family) {
    switch (family) {
    case Family::Hermite: return "hermite";
    case Family::Laguerre: return "laguerre";
    case Family::Jacobi: return "jacobi";
    }
    return "unknown";
}

Family family_from_string(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "hermite") return Family::Hermite;
    if (lower == "laguerre") return Family::Laguerre;
    if (lower == "jacobi") return Family::Jacobi;
    throw ParameterError("unknown polynomial family '" + std::string(name) + "'");
}

PolynomialSpec PolynomialSpec::from_coulomb(int n, double l) {
    if (!(l >= 0.0)) throw ParameterError("Coulomb angular momentum l must be >= 0");
    return laguerre(n, 2.0 * l + 1.0);
}

PolynomialSpec PolynomialSpec::from_jacobi_charges(int n, double p, double q) {
    if (!(p > 0.0) || !(q > 0.0)) throw ParameterError("Jacobi fixed charges p, q must be > 0");
    return jacobi(n, 2.0 * p - 1.0, 2.0 * q - 1.0);
}

void PolynomialSpec::validate() const {
    if (degree < 1) throw ParameterError("polynomial degree must be >= 1");
    if (!std::isfinite(alpha) || !std::isfinite(beta)) throw ParameterError("alpha/beta must be finite");
    if (family != Family::Hermite && !(alpha > -1.0)) throw ParameterError("alpha must be > -1");
    if (family == Family::Jacobi && !(beta > -1.0)) throw ParameterError("beta must be > -1");
}

RecurrenceCoefficients recurrence(const PolynomialSpec& spec) {
    spec.validate();
    const int n = spec.degree;
    RecurrenceCoefficients rc;
    rc.a.resize(static_cast<std::size_t>(n));
    rc.b.resize(static_cast<std::size_t>(n));

    switch (spec.family) {
    case Family::Hermite:
        for (int k = 0; k < n; ++k) {
            rc.a[k] = 0.0;
            rc.b[k] = 0.5 * k;
        }
        rc.b[0] = std::sqrt(std::numbers::pi);
        break;
    case Family::Laguerre: {
        const double al = spec.alpha;
        for (int k = 0; k < n; ++k) {
            rc.a[k] = 2.0 * k + al + 1.0;
            rc.b[k] = k * (k + al);
        }
        rc.b[0] = std::tgamma(al + 1.0);
        break;
    }
    case Family::Jacobi: {
        const double al = spec.alpha;
        const double be = spec.beta;
        const double ab = al + be;
        // k = 0 and k = 1 are written out: the general formulas are 0/0 when
        // alpha + beta is 0 or -1.
        rc.a[0] = (be - al) / (ab + 2.0);
        rc.b[0] = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(al + 1.0) +
                           std::lgamma(be + 1.0) - std::lgamma(ab + 2.0));
        for (int k = 1; k < n; ++k) {
            const double s = 2.0 * k + ab;
            rc.a[k] = (be * be - al * al) / (s * (s + 2.0));
            if (k == 1) {
                rc.b[k] = 4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
            } else {
                rc.b[k] = 4.0 * k * (k + al) * (k + be) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
            }
        }
        break;
    }
    }
    return rc;
}

namespace {

PolyValue evaluate_with(const RecurrenceCoefficients& rc, int n, double x) {
    double p_prev = 0.0, p = 1.0;
    double d_prev = 0.0, d = 0.0;
    double s_prev = 0.0, s = 0.0;
    for (int k = 0; k < n; ++k) {
        const double shift = x - rc.a[k];
        const double bk = k == 0 ? 0.0 : rc.b[k];
        const double p_next = shift * p - bk * p_prev;
        const double d_next = p + shift * d - bk * d_prev;
        const double s_next = 2.0 * d + shift * s - bk * s_prev;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        s_prev = s;
        s = s_next;
    }
    return {p, d, s};
}

} // namespace

PolyValue evaluate(const PolynomialSpec& spec, double x) {
    if (!std::isfinite(x)) throw ParameterError("evaluate: non-finite x");
    return evaluate_with(recurrence(spec), spec.degree, x);
}

std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e,
                                            int max_sweeps_per_eigenvalue) {
    const std::size_t n = d.size();
    if (n == 0) return d;
    if (e.size() + 1 != n) throw ParameterError("tridiagonal_eigenvalues: off-diagonal must have n-1 entries");
    e.push_back(0.0);
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (std::size_t l = 0; l < n; ++l) {
        int sweeps = 0;
        std::size_t m = l;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (++sweeps > max_sweeps_per_eigenvalue)
                throw ConvergenceError("tridiagonal eigensolve: iteration cap exceeded");

            // Wilkinson shift from the leading 2x2 block.
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool deflated = false;
            for (std::size_t i = m; i-- > l;) {
                const double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (deflated) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<double> zeros(const PolynomialSpec& spec) {
    const RecurrenceCoefficients rc = recurrence(spec);
    const int n = spec.degree;
    std::vector<double> off(static_cast<std::size_t>(n - 1));
    for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(rc.b[k]);
    std::vector<double> x = tridiagonal_eigenvalues(rc.a, std::move(off));

    // Newton polish; a step is kept only if it reduces |p_n|.
    for (double& xi : x) {
        for (int it = 0; it < 3; ++it) {
            const PolyValue v = evaluate_with(rc, n, xi);
            if (v.value == 0.0 || v.derivative == 0.0) break;
            const double trial = xi - v.value / v.derivative;
            if (std::abs(evaluate_with(rc, n, trial).value) >= std::abs(v.value)) break;
            xi = trial;
        }
    }
    std::sort(x.begin(), x.end());
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) throw ConvergenceError("zeros: eigenvalues not strictly increasing");
    }
    return x;
}

namespace {

struct OdeTerms {
    double second, first, zeroth;
};

OdeTerms ode_terms(const PolynomialSpec& spec, double x) {
    const PolyValue v = evaluate(spec, x);
    const double n = spec.degree;
    switch (spec.family) {
    case Family::Hermite:
        return {v.second_derivative, -2.0 * x * v.derivative, 2.0 * n * v.value};
    case Family::Laguerre:
        return {x * v.second_derivative, (spec.alpha + 1.0 - x) * v.derivative, n * v.value};
    case Family::Jacobi: {
        const double al = spec.alpha, be = spec.beta;
        return {(1.0 - x * x) * v.second_derivative, (be - al - (al + be + 2.0) * x) * v.derivative,
                n * (n + al + be + 1.0) * v.value};
    }
    }
    return {0.0, 0.0, 0.0};
}

} // namespace

double ode_residual(const PolynomialSpec& spec, double x) {
    const OdeTerms t = ode_terms(spec, x);
    return t.second + t.first + t.zeroth;
}

double ode_scale(const PolynomialSpec& spec, double x) {
    const OdeTerms t = ode_terms(spec, x);
    return std::abs(t.second) + std::abs(t.first) + std::abs(t.zeroth);
}

} // namespace kirchhoff::orthopoly
