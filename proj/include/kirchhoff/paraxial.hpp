#pragma once

// Paraxial beam envelopes u(x, y, z) with psi = u exp(ikz):
//     du/dz = (i / 2k) (d_xx + d_yy) u.

#include "kirchhoff/grid.hpp"

#include <iosfwd>
#include <vector>

namespace kirchhoff::paraxial {

struct BeamField {
    ComplexGrid grid;
    double k = 1.0; ///< wavenumber
    double z = 0.0; ///< propagation distance

    /// nx, ny powers of two >= 16; dx, dy > 0; k > 0; finite samples.
    void validate() const;
};

struct LGModeSpec {
    int p = 0;   ///< radial index
    int ell = 0; ///< azimuthal index / topological charge
    double w0 = 1.0;

    void validate() const;
};

struct GridSpec {
    int nx = 256;
    int ny = 256;
    double dx = 0.125;
    double dy = 0.125;
    double k = 100.0;
};

/// Standard L_p^alpha(x) by its three-term recurrence.
double generalized_laguerre(int p, double alpha, double x);

/// (sqrt2 r/w0)^|l| L_p^|l|(2r^2/w0^2) exp(-r^2/w0^2) exp(i l phi), scaled so
/// sum |u|^2 dx dy = 1. Requires w0 >= 8 dx (and dy) and an extent of at least
/// 6 w0 per axis.
BeamField lg_mode(const LGModeSpec& spec, const GridSpec& grid);

/// Unnormalised LG amplitude at a point, for comparison against propagated fields.
cplx lg_amplitude(const LGModeSpec& spec, double x, double y);

/// Fraction of spectral energy with |k_x| or |k_y| above 3/4 of Nyquist.
double edge_energy_fraction(const BeamField& field);
inline constexpr double kAliasingLimit = 0.01;

/// `steps` spectral steps of length dz, each exp(-i (kx^2 + ky^2) dz / 2k).
/// Throws AliasingError when edge_energy_fraction exceeds kAliasingLimit
/// (free-space steps leave |u_hat| unchanged, so the input check covers the run).
BeamField propagate(const BeamField& field, double dz, int steps = 1);

/// Second-moment radius sqrt(2 <r^2>) about the intensity centroid; equals the
/// 1/e^2 radius w for a Gaussian.
double beam_width(const BeamField& field);

/// Loop in grid-index units (ix, iy as real numbers).
struct CircleLoop {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 1.0;

    /// Circle of physical radius r around physical point (x, y).
    static CircleLoop physical(const BeamField& field, double x, double y, double r);
};

/// Winding number of the phase around the loop, sampled at
/// max(64, 4 * 2 pi r) points with bilinear interpolation; sampling doubles
/// until every phase step is below pi/2. Throws ParameterError if the loop
/// leaves the grid or |u| on it drops below 1e-6 of the peak.
int topological_charge(const BeamField& field, const CircleLoop& loop);

struct Vortex {
    double x = 0.0;
    double y = 0.0;
    int charge = 0;
};

/// Plaquette scan: the wrapped phase differences around each cell sum to
/// 2 pi * charge. Cells whose largest corner amplitude is below
/// amplitude_floor * peak are skipped. Positions are refined to the bilinear
/// zero of Re u and Im u inside the cell. Ordered by row, then column.
std::vector<Vortex> find_vortices(const BeamField& field, double amplitude_floor = 1e-6);

int total_charge(const std::vector<Vortex>& vortices);

/// ||d2u/dz2|| / ||2k du/dz|| from fields at z - dz, z, z + dz. Returns 0 when
/// the field does not change along z to round-off.
double paraxial_validity(const BeamField& field, double dz);

/// Little-endian binary: 8-byte magic "KVBEAM01", u64 nx, u64 ny, f64 dx, dy, k, z,
/// then nx*ny (re, im) f64 pairs row-major with x fastest.
void write_field(std::ostream& out, const BeamField& field);
BeamField read_field(std::istream& in);

/// CSV x,y,intensity,phase for every grid point.
void write_intensity_phase_csv(std::ostream& out, const BeamField& field);

} // namespace kirchhoff::paraxial
