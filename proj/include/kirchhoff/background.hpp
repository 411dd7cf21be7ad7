#pragma once

#include <complex>
#include <string>
#include <vector>

namespace kirchhoff {

using cplx = std::complex<double>;

/// External term W added to the Kirchhoff velocities. Also the superpotential
/// of the matching Schrodinger problem:
///   HermiteLinear    W = z
///   Coulomb(l)       W = 1/2 - (l + 1)/z
///   Jacobi(p, q)     W = -p/(z - 1) - q/(z + 1)
///   ConjugateLinear  W = Omega * conj(z)      (Laughlin confinement, Omega = 1/(4 l_B^2))
///   CustomRational   W = sum_k r_k/(z - z_k) + sum_m c_m z^m
struct BackgroundFlow {
    enum class Kind { None, HermiteLinear, Coulomb, Jacobi, ConjugateLinear, CustomRational };

    Kind kind = Kind::None;
    double l = 0.0;
    double p = 0.0;
    double q = 0.0;
    double omega = 0.0;
    std::vector<cplx> poles;
    std::vector<cplx> residues;
    std::vector<double> polynomial; ///< c_0, c_1, ...

    static BackgroundFlow none() { return {}; }
    static BackgroundFlow hermite_linear();
    static BackgroundFlow coulomb(double l);
    static BackgroundFlow jacobi(double p, double q);
    static BackgroundFlow conjugate_linear(double omega);
    static BackgroundFlow custom_rational(std::vector<cplx> poles, std::vector<cplx> residues,
                                          std::vector<double> polynomial);

    /// Throws ParameterError on l < 0, p or q <= 0, Omega <= 0, repeated or
    /// mismatched custom poles.
    void validate() const;

    /// W(z, conj z).
    cplx value(cplx z) const;
    /// dW/dz for the holomorphic kinds; ConjugateLinear returns 0 (its
    /// dependence is through conj z only).
    cplx derivative(cplx z) const;
    /// Finite singularities of W: Coulomb {0}, Jacobi {+1, -1}, custom poles.
    std::vector<cplx> fixed_poles() const;
    /// True when W = dF/dz for a holomorphic F, so Re F is a real potential.
    bool has_real_potential() const;

    std::string name() const;
};

} // namespace kirchhoff
