#include "kirchhoff/errors.hpp"
#include "kirchhoff/stieltjes.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace kirchhoff;
using namespace kirchhoff::stieltjes;
using orthopoly::PolynomialSpec;

namespace {

double max_dev(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

EquilibriumProblem problem(int n, BackgroundFlow bg) {
    EquilibriumProblem p;
    p.n = n;
    p.background = std::move(bg);
    return p;
}

} // namespace

TEST_CASE("residual: closed-form equilibria") {
    const double a = 1.0 / std::sqrt(2.0);
    for (double r : residual({-a, a}, BackgroundFlow::hermite_linear())) CHECK(std::abs(r) < 1e-15);
    CHECK(std::abs(residual({2.0}, BackgroundFlow::coulomb(0.0))[0]) < 1e-15);
    CHECK(std::abs(residual({0.0}, BackgroundFlow::jacobi(0.5, 0.5))[0]) < 1e-15);
}

TEST_CASE("residual: domain and coincidence errors") {
    CHECK_THROWS_AS(residual({-0.5}, BackgroundFlow::coulomb(0.0)), DomainError);
    CHECK_THROWS_AS(residual({1.0}, BackgroundFlow::jacobi(0.5, 0.5)), DomainError);
    CHECK_THROWS_AS(residual({0.1, 0.1}, BackgroundFlow::hermite_linear()), ParameterError);
    CHECK_THROWS_AS(residual({0.1}, BackgroundFlow::conjugate_linear(0.25)), ParameterError);
    CHECK_THROWS_AS(residual({0.1}, BackgroundFlow::none()), ParameterError);
    const auto custom = BackgroundFlow::custom_rational({cplx{0.5, 0.0}}, {cplx{1.0, 0.0}}, {});
    CHECK_THROWS_AS(residual({0.5}, custom), DomainError);
}

TEST_CASE("jacobian: hand values") {
    const auto j1 = jacobian({0.37}, BackgroundFlow::hermite_linear());
    CHECK(j1(0, 0) == doctest::Approx(-1.0));
    const double a = 1.0 / std::sqrt(2.0);
    const auto j2 = jacobian({-a, a}, BackgroundFlow::hermite_linear());
    CHECK(j2(0, 0) == doctest::Approx(-1.5));
    CHECK(j2(1, 1) == doctest::Approx(-1.5));
    CHECK(j2(0, 1) == doctest::Approx(0.5));
    CHECK(j2(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("jacobian: central-difference agreement") {
    std::mt19937_64 rng(11);
    const BackgroundFlow backgrounds[] = {BackgroundFlow::hermite_linear(), BackgroundFlow::coulomb(1.0),
                                          BackgroundFlow::jacobi(1.0, 1.5)};
    for (const auto& bg : backgrounds) {
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2 + trial % 6;
            const std::vector<double> base = default_initial_guess(n, bg);
            std::vector<double> x = base;
            std::uniform_real_distribution<double> jitter(-0.2, 0.2);
            for (std::size_t i = 0; i < x.size(); ++i) {
                double gap = 1.0;
                if (i > 0) gap = std::min(gap, base[i] - base[i - 1]);
                if (i + 1 < x.size()) gap = std::min(gap, base[i + 1] - base[i]);
                for (const cplx& pole : bg.fixed_poles()) gap = std::min(gap, std::abs(base[i] - pole.real()));
                x[i] += jitter(rng) * gap;
            }
            const auto jac = jacobian(x, bg);
            const double h = 1e-6;
            for (int m = 0; m < n; ++m) {
                auto xp = x, xm = x;
                xp[m] += h;
                xm[m] -= h;
                const auto rp = residual(xp, bg), rm = residual(xm, bg);
                for (int k = 0; k < n; ++k) CHECK(std::abs(jac(k, m) - (rp[k] - rm[k]) / (2 * h)) < 1e-6 * std::max(1.0, std::abs(jac(k, m))));
            }
        }
    }
}

TEST_CASE("solve: worked examples match orthopoly zeros") {
    const auto h = solve(problem(5, BackgroundFlow::hermite_linear()));
    CHECK(h.converged);
    CHECK(max_dev(h.positions, orthopoly::zeros(PolynomialSpec::hermite(5))) < 1e-10);

    const auto c = solve(problem(4, BackgroundFlow::coulomb(1.0)));
    CHECK(c.converged);
    CHECK(max_dev(c.positions, orthopoly::zeros(PolynomialSpec::laguerre(4, 3.0))) < 1e-10);

    const auto j = solve(problem(6, BackgroundFlow::jacobi(1.0, 1.5)));
    CHECK(j.converged);
    CHECK(max_dev(j.positions, orthopoly::zeros(PolynomialSpec::jacobi(6, 1.0, 2.0))) < 1e-10);
}

TEST_CASE("solve: oracle equivalence over a parameter sweep") {
    for (int n = 1; n <= 50; n += 7) {
        const auto r = solve_and_certify(problem(n, BackgroundFlow::hermite_linear()));
        CHECK(r.certified.value_or(false));
    }
    for (double l : {0.0, 1.0, 2.0}) {
        for (int n = 1; n <= 30; n += 5) {
            const auto r = solve_and_certify(problem(n, BackgroundFlow::coulomb(l)));
            CHECK(r.certified.value_or(false));
        }
    }
    for (double p : {0.5, 1.0, 1.5}) {
        for (int n = 1; n <= 30; n += 5) {
            const auto r = solve_and_certify(problem(n, BackgroundFlow::jacobi(p, 2.0 - p * 0.5)));
            CHECK(r.certified.value_or(false));
        }
    }
}

TEST_CASE("solve: permutation invariance of the initial guess") {
    const auto bg = BackgroundFlow::jacobi(0.75, 1.25);
    std::vector<double> guess = default_initial_guess(8, bg);
    EquilibriumProblem p = problem(8, bg);
    p.initial_guess = guess;
    const auto base = solve(p);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(guess.begin(), guess.end(), rng);
        p.initial_guess = guess;
        CHECK(solve(p).positions == base.positions);
    }
}

TEST_CASE("solve: equilibria are strict minima of the energy") {
    const BackgroundFlow backgrounds[] = {BackgroundFlow::hermite_linear(), BackgroundFlow::coulomb(0.5),
                                          BackgroundFlow::jacobi(1.0, 0.5)};
    for (const auto& bg : backgrounds) {
        for (int n = 1; n <= 10; ++n) {
            const auto r = solve(problem(n, bg));
            REQUIRE(r.converged);
            const Eigen::MatrixXd hess = -jacobian(r.positions, bg);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("gradient flow lowers the energy at every accepted step") {
    const auto bg = BackgroundFlow::coulomb(1.0);
    std::vector<double> x = default_initial_guess(6, bg);
    const auto flow = gradient_flow(x, bg, 300, 1e-8);
    REQUIRE(flow.steps > 0);
    for (std::size_t i = 1; i < flow.energies.size(); ++i) CHECK(flow.energies[i] < flow.energies[i - 1]);
    CHECK(std::is_sorted(flow.positions.begin(), flow.positions.end()));
}

TEST_CASE("solve: far-off guess falls back to gradient flow and still converges") {
    EquilibriumProblem p = problem(6, BackgroundFlow::jacobi(0.5, 0.5));
    p.initial_guess = std::vector<double>{-0.999999, -0.999998, -0.999997, -0.999996, -0.999995, 0.999999};
    const auto r = solve_and_certify(p);
    CHECK(r.converged);
    CHECK(r.certified.value_or(false));
}

TEST_CASE("solve: custom rational backgrounds reproduce the classical cases without certification") {
    // W = x written as a polynomial part.
    const auto linear = BackgroundFlow::custom_rational({}, {}, {0.0, 1.0});
    const auto r = solve_and_certify(problem(7, linear));
    CHECK(r.converged);
    CHECK_FALSE(r.certified.has_value());
    CHECK(max_dev(r.positions, orthopoly::zeros(PolynomialSpec::hermite(7))) < 1e-10);

    // W = -p/(x-1) - q/(x+1) through explicit poles.
    const auto poles = BackgroundFlow::custom_rational({cplx{1.0, 0.0}, cplx{-1.0, 0.0}},
                                                       {cplx{-1.0, 0.0}, cplx{-1.5, 0.0}}, {});
    EquilibriumProblem p = problem(5, poles);
    p.initial_guess = default_initial_guess(5, BackgroundFlow::jacobi(1.0, 1.5));
    const auto j = solve(p);
    CHECK(j.converged);
    CHECK(max_dev(j.positions, orthopoly::zeros(PolynomialSpec::from_jacobi_charges(5, 1.0, 1.5))) < 1e-10);
}

TEST_CASE("solve: iteration cap reports the best iterate") {
    const auto r = solve(problem(20, BackgroundFlow::hermite_linear()), 1e-12, 1);
    CHECK_FALSE(r.converged);
    CHECK(r.positions.size() == 20);
    CHECK(r.iterations == 1);
    const auto unreachable = solve(problem(5, BackgroundFlow::hermite_linear()), 1e-30);
    CHECK_FALSE(unreachable.converged);
}

TEST_CASE("certify: closed forms, perturbation and family mismatch") {
    const double a = 1.0 / std::sqrt(2.0);
    EquilibriumReport report;
    report.background = BackgroundFlow::hermite_linear();
    report.positions = {-a, a};
    const auto ok = certify(report, PolynomialSpec::hermite(2));
    CHECK(ok.certified.value());
    CHECK(*ok.max_zero_deviation <= 1e-10);

    report.positions = {-a + 0.1, a + 0.1};
    CHECK_FALSE(certify(report, PolynomialSpec::hermite(2)).certified.value());

    const auto legendre = solve(problem(3, BackgroundFlow::jacobi(0.5, 0.5)));
    const auto cert = certify(legendre, PolynomialSpec::jacobi(3, 0.0, 0.0));
    CHECK(cert.certified.value());
    CHECK(cert.positions[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-12));
    CHECK(std::abs(cert.positions[1]) < 1e-12);
    CHECK(cert.positions[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-12));
    CHECK(*cert.max_ode_residual < 1e-8);

    CHECK_THROWS_AS(certify(legendre, PolynomialSpec::hermite(3)), ParameterError);
    CHECK_THROWS_AS(certify(legendre, PolynomialSpec::jacobi(3, 1.0, 0.0)), ParameterError);
    CHECK_THROWS_AS(certify(legendre, PolynomialSpec::jacobi(4, 0.0, 0.0)), ParameterError);
}

TEST_CASE("partner potentials") {
    const auto v = partner_potentials([](double x) { return x; }, [](double) { return 1.0; }, 0.0, 2.0);
    CHECK(v.plus == doctest::Approx(3.0));
    CHECK(v.minus == doctest::Approx(5.0));

    const auto zero = partner_potentials([](double) { return 0.0; }, [](double) { return 0.0; }, 1.75, -3.0);
    CHECK(zero.plus == 1.75);
    CHECK(zero.minus == 1.75);

    const double e = 0.3;
    const auto coul = partner_potentials(BackgroundFlow::coulomb(0.0), e, 2.0);
    CHECK(coul.plus == doctest::Approx(-0.25 + e));
    CHECK(coul.minus == doctest::Approx(0.25 + e));
}

TEST_CASE("report JSON carries the documented fields") {
    const auto r = solve_and_certify(problem(3, BackgroundFlow::coulomb(1.0)));
    const auto j = to_json(r);
    CHECK(j.at("family") == "coulomb");
    CHECK(j.at("parameters").at("alpha") == 3.0);
    CHECK(j.at("n") == 3);
    CHECK(j.at("positions").size() == 3);
    CHECK(j.at("certified") == true);
    CHECK(j.contains("residual_inf"));
    CHECK(j.contains("iterations"));
    CHECK(j.contains("max_zero_deviation"));

    const auto custom = solve_and_certify(problem(2, BackgroundFlow::custom_rational({}, {}, {0.0, 1.0})));
    CHECK_FALSE(to_json(custom).contains("certified"));
}
