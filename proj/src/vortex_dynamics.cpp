#include "kirchhoff/vortex_dynamics.hpp"

#include "kirchhoff/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

namespace kirchhoff::vortex {

void VortexConfiguration::validate() const {
    if (z.empty()) throw ParameterError("vortex configuration needs n >= 1");
    if (kappa.size() != z.size()) throw ParameterError("positions and strengths differ in length");
    for (double k : kappa) {
        if (!std::isfinite(k) || k == 0.0) throw ParameterError("strengths must be finite and nonzero");
    }
    for (const cplx& zi : z) {
        if (!std::isfinite(zi.real()) || !std::isfinite(zi.imag())) throw ParameterError("non-finite position");
    }
    if (!std::isfinite(t)) throw ParameterError("non-finite time");
    if (z.size() > 1 && !(min_pair_distance() > 0.0)) throw ParameterError("vortex positions must be distinct");
}

double VortexConfiguration::min_pair_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j) best = std::min(best, std::abs(z[i] - z[j]));
    return best;
}

ConservedSet conserved(const VortexConfiguration& cfg) {
    ConservedSet c;
    const std::size_t n = cfg.size();
    for (std::size_t i = 0; i < n; ++i) {
        c.impulse += cfg.kappa[i] * cfg.z[i];
        c.angular += cfg.kappa[i] * std::norm(cfg.z[i]);
        for (std::size_t j = i + 1; j < n; ++j)
            c.energy += cfg.kappa[i] * cfg.kappa[j] * std::log(std::abs(cfg.z[i] - cfg.z[j]));
    }
    return c;
}

namespace {

void check_collisions(const VortexConfiguration& cfg, const BackgroundFlow& bg, double eps) {
    const std::size_t n = cfg.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::abs(cfg.z[i] - cfg.z[j]);
            if (!(d >= eps))
                throw CollisionError(fmt::format("vortices {} and {} collided (distance {:.3e}) at t = {:.17g}",
                                                 i, j, d, cfg.t));
        }
        for (const cplx& pole : bg.fixed_poles()) {
            const double d = std::abs(cfg.z[i] - pole);
            if (!(d >= eps))
                throw CollisionError(fmt::format("vortex {} hit a background pole (distance {:.3e}) at t = {:.17g}",
                                                 i, d, cfg.t));
        }
    }
}

} // namespace

std::vector<cplx> rhs(const VortexConfiguration& cfg, const BackgroundFlow& bg, double collision_eps) {
    check_collisions(cfg, bg, collision_eps);
    const std::size_t n = cfg.size();
    const cplx I{0.0, 1.0};
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) s += I * cfg.kappa[j] / (cfg.z[i] - cfg.z[j]);
        }
        if (bg.kind != BackgroundFlow::Kind::None) s += I * bg.value(cfg.z[i]);
        v[i] = std::conj(s);
    }
    return v;
}

namespace {

struct Grad2 {
    double x = 0.0, y = 0.0;
};

/// Real potential Phi = Re F and its gradient, F' = W.
double background_potential(const BackgroundFlow& bg, double x, double y) {
    using K = BackgroundFlow::Kind;
    switch (bg.kind) {
    case K::None: return 0.0;
    case K::HermiteLinear: return 0.5 * (x * x - y * y);
    case K::Coulomb: return 0.5 * x - (bg.l + 1.0) * 0.5 * std::log(x * x + y * y);
    case K::Jacobi:
        return -bg.p * 0.5 * std::log((x - 1.0) * (x - 1.0) + y * y) -
               bg.q * 0.5 * std::log((x + 1.0) * (x + 1.0) + y * y);
    default: throw ParameterError("background '" + bg.name() + "' has no real potential");
    }
}

Grad2 background_gradient(const BackgroundFlow& bg, double x, double y) {
    using K = BackgroundFlow::Kind;
    switch (bg.kind) {
    case K::None: return {};
    case K::HermiteLinear: return {x, -y};
    case K::Coulomb: {
        const double r2 = x * x + y * y;
        return {0.5 - (bg.l + 1.0) * x / r2, -(bg.l + 1.0) * y / r2};
    }
    case K::Jacobi: {
        const double r1 = (x - 1.0) * (x - 1.0) + y * y;
        const double r2 = (x + 1.0) * (x + 1.0) + y * y;
        return {-bg.p * (x - 1.0) / r1 - bg.q * (x + 1.0) / r2, -bg.p * y / r1 - bg.q * y / r2};
    }
    default: throw ParameterError("background '" + bg.name() + "' has no real potential");
    }
}

} // namespace

double hamiltonian(const VortexConfiguration& cfg, const BackgroundFlow& bg) {
    double h = conserved(cfg).energy;
    for (std::size_t k = 0; k < cfg.size(); ++k)
        h += cfg.kappa[k] * background_potential(bg, cfg.z[k].real(), cfg.z[k].imag());
    return h;
}

std::vector<cplx> hamiltonian_rhs(const VortexConfiguration& cfg, const BackgroundFlow& bg, double collision_eps) {
    if (!bg.has_real_potential())
        throw ParameterError("hamiltonian_rhs: background '" + bg.name() + "' is not derived from a real potential");
    check_collisions(cfg, bg, collision_eps);
    const std::size_t n = cfg.size();
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double xk = cfg.z[k].real(), yk = cfg.z[k].imag();
        // dH/dx_k, dH/dy_k
        double hx = 0.0, hy = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            const double dx = xk - cfg.z[j].real();
            const double dy = yk - cfg.z[j].imag();
            const double r2 = dx * dx + dy * dy;
            const double kk = cfg.kappa[k] * cfg.kappa[j];
            hx += kk * dx / r2;
            hy += kk * dy / r2;
        }
        const Grad2 g = background_gradient(bg, xk, yk);
        hx += cfg.kappa[k] * g.x;
        hy += cfg.kappa[k] * g.y;
        // x' = {x_k, H} = hy / kappa_k,  y' = {y_k, H} = -hx / kappa_k
        v[k] = cplx{hy / cfg.kappa[k], -hx / cfg.kappa[k]};
    }
    return v;
}

double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const VortexConfiguration& cfg, double h,
                       double collision_eps) {
    if (!(h > 0.0)) throw ParameterError("poisson_bracket: step must be > 0");
    VortexConfiguration probe = cfg;
    auto check = [&](const VortexConfiguration& c) {
        if (c.size() > 1 && !(c.min_pair_distance() >= collision_eps))
            throw CollisionError("poisson_bracket: finite-difference stencil collides");
    };
    auto partial = [&](const PhaseFunction& fn, std::size_t k, bool along_y) {
        const cplx step = along_y ? cplx{0.0, h} : cplx{h, 0.0};
        probe.z[k] = cfg.z[k] + step;
        check(probe);
        const double plus = fn(probe);
        probe.z[k] = cfg.z[k] - step;
        check(probe);
        const double minus = fn(probe);
        probe.z[k] = cfg.z[k];
        return (plus - minus) / (2.0 * h);
    };
    double total = 0.0;
    for (std::size_t k = 0; k < cfg.size(); ++k) {
        const double fx = partial(f, k, false), fy = partial(f, k, true);
        const double gx = partial(g, k, false), gy = partial(g, k, true);
        total += (fx * gy - fy * gx) / cfg.kappa[k];
    }
    return total;
}

std::vector<double> uniform_samples(double t0, double t_end, int count) {
    if (count < 1) throw ParameterError("uniform_samples: count must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 1; i <= count; ++i) out[i - 1] = t0 + (t_end - t0) * i / count;
    out.back() = t_end;
    return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// b - b*, the embedded error weights.
constexpr std::array<double, 7> kE{71.0 / 57600,      0.0,         -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525,  -1.0 / 40};

void update_drift(DriftReport& drift, const ConservedSet& c0, const VortexConfiguration& cfg) {
    const ConservedSet c = conserved(cfg);
    drift.impulse = std::max(drift.impulse, std::abs(c.impulse - c0.impulse));
    drift.angular = std::max(drift.angular, std::abs(c.angular - c0.angular));
    drift.energy = std::max(drift.energy, std::abs(c.energy - c0.energy));
}

} // namespace

Trajectory integrate(const VortexConfiguration& cfg, const BackgroundFlow& bg, double t_end,
                     const IntegrationControls& controls) {
    cfg.validate();
    bg.validate();
    if (!(t_end > cfg.t)) throw ParameterError("integrate: t_end must exceed the initial time");
    if (!(controls.rtol > 0.0) || !(controls.atol >= 0.0)) throw ParameterError("integrate: bad tolerances");
    if (controls.max_steps < 1) throw ParameterError("integrate: max_steps must be >= 1");

    std::vector<double> targets = controls.sample_times.empty() ? std::vector<double>{t_end} : controls.sample_times;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (!(targets[i] > cfg.t) || !(targets[i] <= t_end) || (i > 0 && !(targets[i] > targets[i - 1])))
            throw ParameterError("integrate: sample times must be increasing within (t0, t_end]");
    }

    const std::size_t n = cfg.size();
    const ConservedSet c0 = conserved(cfg);
    Trajectory traj;
    traj.samples.push_back(cfg);

    VortexConfiguration state = cfg;
    VortexConfiguration stage = cfg;
    std::array<std::vector<cplx>, 7> k;
    k[0] = rhs(state, bg, controls.collision_eps);

    double h = controls.initial_step;
    if (!(h > 0.0)) {
        double vmax = 0.0;
        for (const cplx& v : k[0]) vmax = std::max(vmax, std::abs(v));
        double scale = n > 1 ? state.min_pair_distance() : 1.0;
        h = vmax > 0.0 ? 0.01 * scale / vmax : t_end - state.t;
    }

    std::vector<cplx> y_new(n);
    std::size_t next = 0;
    long steps = 0;
    while (next < targets.size()) {
        if (++steps > controls.max_steps)
            throw ConvergenceError(fmt::format("integrate: step budget {} exhausted at t = {:.17g}",
                                               controls.max_steps, state.t));
        const double target = targets[next];
        const bool clipped = h >= target - state.t;
        const double h_used = clipped ? target - state.t : h;
        if (h_used <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(state.t)))
            throw ConvergenceError(fmt::format("integrate: step size underflow at t = {:.17g}", state.t));

        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                cplx acc = 0.0;
                for (int j = 0; j < s; ++j) acc += kA[s][j] * k[j][i];
                stage.z[i] = state.z[i] + h_used * acc;
            }
            stage.t = state.t + kC[s] * h_used;
            k[s] = rhs(stage, bg, controls.collision_eps);
        }
        // Row 7 of the tableau is the 5th-order solution, so stage.z is y_new.
        y_new = stage.z;

        double err2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx e = 0.0;
            for (int s = 0; s < 7; ++s) e += kE[s] * k[s][i];
            e *= h_used;
            const double sx = controls.atol + controls.rtol * std::max(std::abs(state.z[i].real()), std::abs(y_new[i].real()));
            const double sy = controls.atol + controls.rtol * std::max(std::abs(state.z[i].imag()), std::abs(y_new[i].imag()));
            err2 += (e.real() / sx) * (e.real() / sx) + (e.imag() / sy) * (e.imag() / sy);
        }
        const double err = std::sqrt(err2 / (2.0 * static_cast<double>(n)));

        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            state.z = y_new;
            state.t = clipped ? target : state.t + h_used;
            k[0] = k[6];
            ++traj.accepted_steps;
            update_drift(traj.drift, c0, state);
            if (clipped) {
                traj.samples.push_back(state);
                ++next;
            }
            h = std::max(h_used * factor, clipped ? h : 0.0);
        } else {
            ++traj.rejected_steps;
            h = h_used * std::max(factor, 0.1);
        }
    }
    return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    const std::size_t n = trajectory.samples.empty() ? 0 : trajectory.samples.front().size();
    out << "t";
    for (std::size_t i = 1; i <= n; ++i) out << ",x_" << i << ",y_" << i;
    out << ",Q,P,I,H\n";
    for (const VortexConfiguration& s : trajectory.samples) {
        const ConservedSet c = conserved(s);
        out << fmt::format("{:.17g}", s.t);
        for (const cplx& zi : s.z) out << fmt::format(",{:.17g},{:.17g}", zi.real(), zi.imag());
        out << fmt::format(",{:.17g},{:.17g},{:.17g},{:.17g}\n", c.impulse.real(), c.impulse.imag(), c.angular,
                           c.energy);
    }
}

} // namespace kirchhoff::vortex
