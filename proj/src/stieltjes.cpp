#include "kirchhoff/stieltjes.hpp"

#include "kirchhoff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kirchhoff::stieltjes {

using Kind = BackgroundFlow::Kind;

std::string_view to_string(Method method) {
    switch (method) {
    case Method::Newton: return "newton";
    case Method::GradientFlow: return "gradient_flow";
    case Method::Hybrid: return "hybrid";
    }
    return "unknown";
}

namespace {

bool supported(const BackgroundFlow& bg) {
    return bg.kind == Kind::HermiteLinear || bg.kind == Kind::Coulomb || bg.kind == Kind::Jacobi ||
           bg.kind == Kind::CustomRational;
}

void require_supported(const BackgroundFlow& bg) {
    if (!supported(bg)) throw ParameterError("stationary problem: unsupported background '" + bg.name() + "'");
    bg.validate();
    if (bg.kind == Kind::CustomRational) {
        for (std::size_t k = 0; k < bg.poles.size(); ++k) {
            if (bg.poles[k].imag() != 0.0 || bg.residues[k].imag() != 0.0)
                throw ParameterError("stationary problem: custom poles and residues must be real");
        }
    }
}

std::vector<double> real_poles(const BackgroundFlow& bg) {
    std::vector<double> out;
    for (const cplx& p : bg.fixed_poles()) out.push_back(p.real());
    std::sort(out.begin(), out.end());
    return out;
}

/// Index of the gap between consecutive real poles containing x.
std::size_t pole_interval(const std::vector<double>& poles, double x) {
    return static_cast<std::size_t>(std::upper_bound(poles.begin(), poles.end(), x) - poles.begin());
}

double w_real(const BackgroundFlow& bg, double x) { return bg.value(cplx{x, 0.0}).real(); }
double w_prime_real(const BackgroundFlow& bg, double x) { return bg.derivative(cplx{x, 0.0}).real(); }

double external_potential(const BackgroundFlow& bg, double x) {
    switch (bg.kind) {
    case Kind::HermiteLinear: return 0.5 * x * x;
    case Kind::Coulomb: return 0.5 * x - (bg.l + 1.0) * std::log(x);
    case Kind::Jacobi: return -bg.p * std::log(1.0 - x) - bg.q * std::log(1.0 + x);
    case Kind::CustomRational: {
        double v = 0.0;
        for (std::size_t k = 0; k < bg.poles.size(); ++k)
            v += bg.residues[k].real() * std::log(std::abs(x - bg.poles[k].real()));
        for (std::size_t m = 0; m < bg.polynomial.size(); ++m)
            v += bg.polynomial[m] * std::pow(x, static_cast<double>(m + 1)) / static_cast<double>(m + 1);
        return v;
    }
    default: return 0.0;
    }
}

void check_points(const std::vector<double>& x, const BackgroundFlow& bg) {
    if (x.empty()) throw ParameterError("stationary problem: need at least one point");
    for (double xi : x) {
        if (!std::isfinite(xi)) throw ParameterError("stationary problem: non-finite point");
        if (!in_domain(bg, xi)) throw DomainError("stationary problem: point outside the domain of " + bg.name());
        for (const cplx& pole : bg.fixed_poles()) {
            if (xi == pole.real()) throw DomainError("stationary problem: point on a fixed pole");
        }
    }
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1]) throw ParameterError("stationary problem: coincident points");
    }
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

double two_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return std::sqrt(s);
}

/// Largest sum of term magnitudes in any component of R; the round-off floor
/// of R scales with it.
double residual_scale(const std::vector<double>& x, const BackgroundFlow& bg) {
    double scale = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        double s = std::abs(w_real(bg, x[k]));
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (j != k) s += 1.0 / std::abs(x[k] - x[j]);
        }
        scale = std::max(scale, s);
    }
    return scale;
}

/// Ordered, inside the domain, each point in the same pole gap as before.
bool admissible(const std::vector<double>& x, const std::vector<double>& reference, const BackgroundFlow& bg,
                const std::vector<double>& poles) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !in_domain(bg, x[i])) return false;
        if (i > 0 && !(x[i] > x[i - 1])) return false;
        if (pole_interval(poles, x[i]) != pole_interval(poles, reference[i])) return false;
        for (double p : poles) {
            if (x[i] == p) return false;
        }
    }
    return true;
}

} // namespace

bool in_domain(const BackgroundFlow& bg, double x) {
    switch (bg.kind) {
    case Kind::Coulomb: return x > 0.0;
    case Kind::Jacobi: return x > -1.0 && x < 1.0;
    default: return std::isfinite(x);
    }
}

void EquilibriumProblem::validate() const {
    if (n < 1) throw ParameterError("equilibrium problem: n must be >= 1");
    require_supported(background);
    if (initial_guess) {
        if (initial_guess->size() != static_cast<std::size_t>(n))
            throw ParameterError("equilibrium problem: initial guess must have n entries");
        check_points(*initial_guess, background);
    }
}

std::vector<double> residual(const std::vector<double>& x, const BackgroundFlow& bg) {
    require_supported(bg);
    check_points(x, bg);
    const std::size_t n = x.size();
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != k) s += 1.0 / (x[k] - x[j]);
        }
        r[k] = s - w_real(bg, x[k]);
    }
    return r;
}

Eigen::MatrixXd jacobian(const std::vector<double>& x, const BackgroundFlow& bg) {
    require_supported(bg);
    check_points(x, bg);
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double diag = 0.0;
        for (Eigen::Index m = 0; m < n; ++m) {
            if (m == k) continue;
            const double inv = 1.0 / (x[k] - x[m]);
            jac(k, m) = inv * inv;
            diag -= inv * inv;
        }
        jac(k, k) = diag - w_prime_real(bg, x[k]);
    }
    return jac;
}

double energy(const std::vector<double>& x, const BackgroundFlow& bg) {
    require_supported(bg);
    check_points(x, bg);
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) e -= std::log(std::abs(x[i] - x[j]));
        e += external_potential(bg, x[i]);
    }
    return e;
}

std::vector<double> default_initial_guess(int n, const BackgroundFlow& bg) {
    if (n < 1) throw ParameterError("initial guess: n must be >= 1");
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) t[n - k] = std::cos((2.0 * k - 1.0) * std::numbers::pi / (2.0 * n));
    switch (bg.kind) {
    case Kind::Coulomb:
        for (double& v : t) v = 2.0 * n * (1.0 + v);
        break;
    case Kind::Jacobi: break;
    default:
        for (double& v : t) v *= std::sqrt(2.0 * n);
        break;
    }
    return t;
}

GradientFlowResult gradient_flow(std::vector<double> x, const BackgroundFlow& bg, int max_steps, double tol) {
    require_supported(bg);
    check_points(x, bg);
    std::sort(x.begin(), x.end());
    const std::vector<double> poles = real_poles(bg);
    GradientFlowResult out;
    double e = energy(x, bg);
    out.energies.push_back(e);
    double step = 1e-2;
    std::vector<double> trial(x.size());
    for (int it = 0; it < max_steps; ++it) {
        const std::vector<double> r = residual(x, bg);
        if (inf_norm(r) <= tol) break;
        const double g2 = std::pow(two_norm(r), 2);
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + step * r[i];
            if (admissible(trial, x, bg, poles)) {
                const double e_trial = energy(trial, bg);
                if (e_trial < e - 1e-4 * step * g2) {
                    x = trial;
                    e = e_trial;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) break;
        out.energies.push_back(e);
        ++out.steps;
        step *= 2.0;
    }
    out.positions = std::move(x);
    return out;
}

EquilibriumReport solve(const EquilibriumProblem& problem, double tolerance, int max_iter) {
    problem.validate();
    if (!(tolerance > 0.0)) throw ParameterError("solve: tolerance must be > 0");
    const BackgroundFlow& bg = problem.background;
    std::vector<double> x = problem.initial_guess ? *problem.initial_guess : default_initial_guess(problem.n, bg);
    std::sort(x.begin(), x.end());
    check_points(x, bg);
    const std::vector<double> poles = real_poles(bg);

    EquilibriumReport report;
    report.background = bg;
    std::vector<double> r = residual(x, bg);
    double rnorm = two_norm(r);
    bool used_newton = false, used_flow = false;
    int iter = 0;
    int polish = 0;
    std::vector<double> trial(x.size());

    while (iter < max_iter) {
        const bool done = inf_norm(r) <= tolerance * residual_scale(x, bg);
        // Once converged, up to two more Newton steps that must keep lowering ||R||.
        if (done && polish >= 2) break;
        ++iter;

        const Eigen::MatrixXd jac = jacobian(x, bg);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = -r[i];
        const Eigen::VectorXd delta = jac.partialPivLu().solve(rhs);

        bool accepted = false;
        if (delta.allFinite()) {
            double lambda = 1.0;
            for (int halving = 0; halving <= 30; ++halving, lambda *= 0.5) {
                for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + lambda * delta[static_cast<Eigen::Index>(i)];
                if (!admissible(trial, x, bg, poles)) continue;
                const std::vector<double> r_trial = residual(trial, bg);
                const double n_trial = two_norm(r_trial);
                if (n_trial < rnorm) {
                    x = trial;
                    r = r_trial;
                    rnorm = n_trial;
                    accepted = true;
                    used_newton = true;
                    break;
                }
            }
        }
        if (done) {
            if (!accepted) break;
            ++polish;
            continue;
        }
        if (!accepted) {
            GradientFlowResult flow = gradient_flow(x, bg, 200, tolerance);
            if (flow.steps == 0) break;
            used_flow = true;
            x = std::move(flow.positions);
            r = residual(x, bg);
            rnorm = two_norm(r);
        }
    }

    report.positions = x;
    report.residual_inf = inf_norm(r);
    report.iterations = iter;
    report.converged = report.residual_inf <= tolerance * residual_scale(x, bg);
    report.method = used_flow ? (used_newton ? Method::Hybrid : Method::GradientFlow) : Method::Newton;
    return report;
}

std::optional<orthopoly::PolynomialSpec> matching_polynomial(const BackgroundFlow& bg, int n) {
    switch (bg.kind) {
    case Kind::HermiteLinear: return orthopoly::PolynomialSpec::hermite(n);
    case Kind::Coulomb: return orthopoly::PolynomialSpec::from_coulomb(n, bg.l);
    case Kind::Jacobi: return orthopoly::PolynomialSpec::from_jacobi_charges(n, bg.p, bg.q);
    default: return std::nullopt;
    }
}

EquilibriumReport certify(EquilibriumReport report, const orthopoly::PolynomialSpec& spec, double tol) {
    spec.validate();
    const int n = static_cast<int>(report.positions.size());
    const auto expected = matching_polynomial(report.background, n);
    constexpr double param_tol = 1e-12;
    if (!expected || expected->family != spec.family || spec.degree != n ||
        std::abs(expected->alpha - spec.alpha) > param_tol || std::abs(expected->beta - spec.beta) > param_tol) {
        throw ParameterError("certify: polynomial " + std::string(orthopoly::to_string(spec.family)) +
                             " does not correspond to background " + report.background.name());
    }
    std::vector<double> sorted = report.positions;
    std::sort(sorted.begin(), sorted.end());
    const std::vector<double> reference = orthopoly::zeros(spec);
    double dev = 0.0, ode = 0.0;
    for (int i = 0; i < n; ++i) {
        dev = std::max(dev, std::abs(sorted[i] - reference[i]));
        const double scale = orthopoly::ode_scale(spec, sorted[i]);
        const double res = std::abs(orthopoly::ode_residual(spec, sorted[i]));
        ode = std::max(ode, scale > 0.0 ? res / scale : res);
    }
    report.max_zero_deviation = dev;
    report.max_ode_residual = ode;
    report.certified = dev <= tol;
    return report;
}

EquilibriumReport solve_and_certify(const EquilibriumProblem& problem, double tolerance, double certify_tol,
                                    int max_iter) {
    EquilibriumReport report = solve(problem, tolerance, max_iter);
    if (auto spec = matching_polynomial(problem.background, problem.n))
        report = certify(std::move(report), *spec, certify_tol);
    return report;
}

PartnerPotentials partner_potentials(const std::function<double(double)>& w,
                                     const std::function<double(double)>& w_prime, double factorization_energy,
                                     double x) {
    const double wv = w(x);
    const double wp = w_prime(x);
    return {wv * wv - wp + factorization_energy, wv * wv + wp + factorization_energy};
}

PartnerPotentials partner_potentials(const BackgroundFlow& bg, double factorization_energy, double x) {
    return partner_potentials([&](double v) { return bg.value(cplx{v, 0.0}).real(); },
                              [&](double v) { return bg.derivative(cplx{v, 0.0}).real(); }, factorization_energy, x);
}

nlohmann::json to_json(const EquilibriumReport& report) {
    const BackgroundFlow& bg = report.background;
    nlohmann::json params = nlohmann::json::object();
    switch (bg.kind) {
    case Kind::Coulomb:
        params["l"] = bg.l;
        params["alpha"] = 2.0 * bg.l + 1.0;
        break;
    case Kind::Jacobi:
        params["p"] = bg.p;
        params["q"] = bg.q;
        params["alpha"] = 2.0 * bg.p - 1.0;
        params["beta"] = 2.0 * bg.q - 1.0;
        break;
    case Kind::CustomRational: {
        nlohmann::json poles = nlohmann::json::array(), residues = nlohmann::json::array();
        for (std::size_t k = 0; k < bg.poles.size(); ++k) {
            poles.push_back(bg.poles[k].real());
            residues.push_back(bg.residues[k].real());
        }
        params["poles"] = poles;
        params["residues"] = residues;
        params["polynomial"] = bg.polynomial;
        break;
    }
    default: break;
    }
    nlohmann::json j;
    j["family"] = bg.name();
    j["parameters"] = params;
    j["n"] = report.positions.size();
    j["positions"] = report.positions;
    j["residual_inf"] = report.residual_inf;
    j["iterations"] = report.iterations;
    j["method"] = std::string(to_string(report.method));
    j["converged"] = report.converged;
    if (report.certified) j["certified"] = *report.certified;
    if (report.max_zero_deviation) j["max_zero_deviation"] = *report.max_zero_deviation;
    return j;
}

} // namespace kirchhoff::stieltjes
