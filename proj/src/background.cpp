#include "kirchhoff/background.hpp"

#include "kirchhoff/errors.hpp"

#include <cmath>

namespace kirchhoff {

BackgroundFlow BackgroundFlow::hermite_linear() {
    BackgroundFlow bg;
    bg.kind = Kind::HermiteLinear;
    return bg;
}

BackgroundFlow BackgroundFlow::coulomb(double l) {
    BackgroundFlow bg;
    bg.kind = Kind::Coulomb;
    bg.l = l;
    bg.validate();
    return bg;
}

BackgroundFlow BackgroundFlow::jacobi(double p, double q) {
    BackgroundFlow bg;
    bg.kind = Kind::Jacobi;
    bg.p = p;
    bg.q = q;
    bg.validate();
    return bg;
}

BackgroundFlow BackgroundFlow::conjugate_linear(double omega) {
    BackgroundFlow bg;
    bg.kind = Kind::ConjugateLinear;
    bg.omega = omega;
    bg.validate();
    return bg;
}

BackgroundFlow BackgroundFlow::custom_rational(std::vector<cplx> poles, std::vector<cplx> residues,
                                               std::vector<double> polynomial) {
    BackgroundFlow bg;
    bg.kind = Kind::CustomRational;
    bg.poles = std::move(poles);
    bg.residues = std::move(residues);
    bg.polynomial = std::move(polynomial);
    bg.validate();
    return bg;
}

void BackgroundFlow::validate() const {
    switch (kind) {
    case Kind::None:
    case Kind::HermiteLinear:
        return;
    case Kind::Coulomb:
        if (!(l >= 0.0) || !std::isfinite(l)) throw ParameterError("Coulomb background needs l >= 0");
        return;
    case Kind::Jacobi:
        if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q))
            throw ParameterError("Jacobi background needs p, q > 0");
        return;
    case Kind::ConjugateLinear:
        if (!(omega > 0.0) || !std::isfinite(omega)) throw ParameterError("conjugate-linear background needs Omega > 0");
        return;
    case Kind::CustomRational:
        if (poles.size() != residues.size()) throw ParameterError("custom background: poles/residues size mismatch");
        for (std::size_t i = 0; i < poles.size(); ++i) {
            if (!std::isfinite(poles[i].real()) || !std::isfinite(poles[i].imag()) ||
                !std::isfinite(residues[i].real()) || !std::isfinite(residues[i].imag()))
                throw ParameterError("custom background: non-finite pole or residue");
            for (std::size_t j = 0; j < i; ++j) {
                if (poles[i] == poles[j]) throw ParameterError("custom background: poles must be distinct");
            }
        }
        for (double c : polynomial) {
            if (!std::isfinite(c)) throw ParameterError("custom background: non-finite polynomial coefficient");
        }
        return;
    }
}

cplx BackgroundFlow::value(cplx z) const {
    switch (kind) {
    case Kind::None: return 0.0;
    case Kind::HermiteLinear: return z;
    case Kind::Coulomb: return 0.5 - (l + 1.0) / z;
    case Kind::Jacobi: return -p / (z - 1.0) - q / (z + 1.0);
    case Kind::ConjugateLinear: return omega * std::conj(z);
    case Kind::CustomRational: {
        cplx w = 0.0;
        for (std::size_t k = 0; k < poles.size(); ++k) w += residues[k] / (z - poles[k]);
        cplx poly = 0.0;
        for (std::size_t m = polynomial.size(); m-- > 0;) poly = poly * z + polynomial[m];
        return w + poly;
    }
    }
    return 0.0;
}

cplx BackgroundFlow::derivative(cplx z) const {
    switch (kind) {
    case Kind::None: return 0.0;
    case Kind::HermiteLinear: return 1.0;
    case Kind::Coulomb: return (l + 1.0) / (z * z);
    case Kind::Jacobi: return p / ((z - 1.0) * (z - 1.0)) + q / ((z + 1.0) * (z + 1.0));
    case Kind::ConjugateLinear: return 0.0;
    case Kind::CustomRational: {
        cplx w = 0.0;
        for (std::size_t k = 0; k < poles.size(); ++k) w -= residues[k] / ((z - poles[k]) * (z - poles[k]));
        cplx poly = 0.0;
        for (std::size_t m = polynomial.size(); m-- > 1;) poly = poly * z + static_cast<double>(m) * polynomial[m];
        return w + poly;
    }
    }
    return 0.0;
}

std::vector<cplx> BackgroundFlow::fixed_poles() const {
    switch (kind) {
    case Kind::Coulomb: return {cplx{0.0, 0.0}};
    case Kind::Jacobi: return {cplx{1.0, 0.0}, cplx{-1.0, 0.0}};
    case Kind::CustomRational: return poles;
    default: return {};
    }
}

bool BackgroundFlow::has_real_potential() const {
    return kind == Kind::None || kind == Kind::HermiteLinear || kind == Kind::Coulomb || kind == Kind::Jacobi;
}

std::string BackgroundFlow::name() const {
    switch (kind) {
    case Kind::None: return "none";
    case Kind::HermiteLinear: return "hermite";
    case Kind::Coulomb: return "coulomb";
    case Kind::Jacobi: return "jacobi";
    case Kind::ConjugateLinear: return "conjugate_linear";
    case Kind::CustomRational: return "custom_rational";
    }
    return "unknown";
}

} // namespace kirchhoff
