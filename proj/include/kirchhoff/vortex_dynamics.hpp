#pragma once

#include "kirchhoff/background.hpp"

#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

namespace kirchhoff::vortex {

inline constexpr double kDefaultCollisionEpsilon = 1e-12;

struct VortexConfiguration {
    std::vector<cplx> z;       ///< positions x + iy
    std::vector<double> kappa; ///< circulation strengths
    double t = 0.0;

    std::size_t size() const { return z.size(); }
    /// n >= 1, sizes agree, finite nonzero strengths, pairwise distinct positions.
    void validate() const;
    double min_pair_distance() const;
};

struct ConservedSet {
    cplx impulse;         ///< Q + iP = sum kappa_i z_i
    double angular = 0.0; ///< I = sum kappa_i |z_i|^2
    double energy = 0.0;  ///< H = sum_{i<j} kappa_i kappa_j ln|z_i - z_j|
};

ConservedSet conserved(const VortexConfiguration& cfg);

/// dz_i/dt = conj( sum_{j != i} i kappa_j / (z_i - z_j) + i W(z_i) ).
/// Pairs are summed in ascending j. Throws CollisionError when a pair, or a
/// vortex and a fixed pole of W, are closer than collision_eps.
std::vector<cplx> rhs(const VortexConfiguration& cfg, const BackgroundFlow& bg,
                      double collision_eps = kDefaultCollisionEpsilon);

/// Total Hamiltonian sum_{i<j} kappa_i kappa_j ln|z_i - z_j| + sum_k kappa_k Re F(z_k),
/// F' = W. Only for backgrounds with has_real_potential().
double hamiltonian(const VortexConfiguration& cfg, const BackgroundFlow& bg);

/// Velocities from Hamilton's equations with the bracket
/// {f, g} = sum_k (1/kappa_k)(df/dx_k dg/dy_k - df/dy_k dg/dx_k), using
/// closed-form real gradients of hamiltonian(). Agrees with rhs() for every
/// supported background; throws ParameterError for ConjugateLinear and CustomRational.
std::vector<cplx> hamiltonian_rhs(const VortexConfiguration& cfg, const BackgroundFlow& bg,
                                  double collision_eps = kDefaultCollisionEpsilon);

using PhaseFunction = std::function<double(const VortexConfiguration&)>;

/// {f, g} by central differences with step h in every x_k, y_k.
double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const VortexConfiguration& cfg,
                       double h = 1e-5, double collision_eps = kDefaultCollisionEpsilon);

struct IntegrationControls {
    double rtol = 1e-12;
    double atol = 1e-12;
    long max_steps = 1'000'000;
    double initial_step = 0.0; ///< 0 picks a step from the initial velocities
    double collision_eps = kDefaultCollisionEpsilon;
    /// Output times in (cfg.t, t_end]; empty means t_end only. Must be increasing.
    std::vector<double> sample_times;
};

struct DriftReport {
    double impulse = 0.0; ///< max |Delta(Q + iP)|
    double angular = 0.0; ///< max |Delta I|
    double energy = 0.0;  ///< max |Delta H|
};

struct Trajectory {
    std::vector<VortexConfiguration> samples; ///< first entry is the initial state
    DriftReport drift;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

/// Dormand-Prince 5(4) with error-controlled step size. Drift is measured on
/// every accepted step, not only on samples. Throws CollisionError from rhs and
/// ConvergenceError on step-count exhaustion or step-size underflow.
Trajectory integrate(const VortexConfiguration& cfg, const BackgroundFlow& bg, double t_end,
                     const IntegrationControls& controls = {});

/// n equally spaced times in (t0, t_end], the last one exactly t_end.
std::vector<double> uniform_samples(double t0, double t_end, int count);

/// Header t,x_1,y_1,...,x_n,y_n,Q,P,I,H then one row per sample, %.17g.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

} // namespace kirchhoff::vortex
