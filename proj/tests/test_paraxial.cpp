#include "kirchhoff/errors.hpp"
#include "kirchhoff/fft.hpp"
#include "kirchhoff/paraxial.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>

using namespace kirchhoff;
using namespace kirchhoff::paraxial;

namespace {

constexpr cplx kI{0.0, 1.0};

std::vector<cplx> random_signal(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    std::vector<cplx> v(n);
    for (auto& e : v) e = {g(rng), g(rng)};
    return v;
}

std::vector<cplx> naive_dft(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / n);
        out[k] = acc;
    }
    return out;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double energy(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& e : v) s += std::norm(e);
    return s;
}

GridSpec grid(int n = 256, double d = 0.125, double k = 100.0) {
    return GridSpec{n, n, d, d, k};
}

BeamField field_from(const GridSpec& g, const std::function<cplx(double, double)>& fn) {
    BeamField f;
    f.grid = ComplexGrid::sample(g.nx, g.ny, g.dx, g.dy, fn);
    f.k = g.k;
    return f;
}

// Gaussian host of waist w with unit vortices imprinted at the given points.
BeamField imprinted(const GridSpec& g, double w, const std::vector<cplx>& cores) {
    return field_from(g, [&](double x, double y) {
        const cplx z{x, y};
        cplx u = std::exp(-std::norm(z) / (w * w));
        for (const cplx& c : cores) u *= (z - c);
        return u;
    });
}

} // namespace

TEST_CASE("fft: matches a direct transform") {
    std::mt19937_64 rng(1);
    for (std::size_t n : {1u, 2u, 8u, 64u, 256u}) {
        const auto x = random_signal(rng, n);
        auto y = x;
        fft::transform(y, false);
        CHECK(max_diff(y, naive_dft(x)) < 1e-12 * std::sqrt(energy(x)) * std::sqrt(double(n)) + 1e-15);
    }
    std::vector<cplx> delta(8, 0.0);
    delta[0] = 1.0;
    fft::transform(delta, false);
    for (const auto& v : delta) CHECK(std::abs(v - 1.0) < 1e-15);
    std::vector<cplx> constant(8, 1.0);
    fft::transform(constant, false);
    CHECK(std::abs(constant[0] - 8.0) < 1e-15);
    for (std::size_t i = 1; i < 8; ++i) CHECK(std::abs(constant[i]) < 1e-15);
}

TEST_CASE("fft: round trip and Parseval") {
    std::mt19937_64 rng(2);
    const auto x = random_signal(rng, 1024);
    auto y = x;
    fft::transform(y, false);
    CHECK(std::abs(energy(y) / (1024.0 * energy(x)) - 1.0) < 1e-12);
    fft::transform(y, true);
    CHECK(max_diff(x, y) < 1e-12);

    const auto a = random_signal(rng, 64 * 32);
    auto b = a;
    fft::transform_2d(b, 64, 32, false);
    CHECK(std::abs(energy(b) / (2048.0 * energy(a)) - 1.0) < 1e-12);
    fft::transform_2d(b, 64, 32, true);
    CHECK(max_diff(a, b) < 1e-12);

    std::vector<cplx> bad(12);
    CHECK_THROWS_AS(fft::transform(bad, false), ParameterError);
    CHECK_THROWS_AS(fft::transform_2d(bad, 4, 3, false), ParameterError);
}

TEST_CASE("LG modes: normalization, phase and core") {
    for (int p : {0, 1, 2}) {
        for (int ell : {-2, 0, 1, 3}) {
            const auto f = lg_mode(LGModeSpec{p, ell, 2.0}, grid());
            CHECK(std::abs(f.grid.norm2() - 1.0) < 1e-8);
        }
    }
    const auto gauss = lg_mode(LGModeSpec{0, 0, 2.0}, grid());
    for (const auto& v : gauss.grid.data) CHECK(std::abs(std::arg(v)) < 1e-15);

    const auto donut = lg_mode(LGModeSpec{0, 1, 2.0}, grid());
    const int c = 128;
    const double peak = donut.grid.max_abs();
    // The nearest samples sit half a cell from the axis.
    for (int dy : {-1, 0})
        for (int dx : {-1, 0}) CHECK(std::abs(donut.grid(c + dx, c + dy)) < 0.2 * peak);
    CHECK(topological_charge(donut, CircleLoop::physical(donut, 0.0, 0.0, 0.5)) == 1);
}

TEST_CASE("LG modes: resolution and extent checks") {
    CHECK_THROWS_AS(lg_mode(LGModeSpec{0, 0, 0.5}, grid()), ParameterError);
    CHECK_THROWS_AS(lg_mode(LGModeSpec{0, 0, 6.0}, grid()), ParameterError);
    CHECK_THROWS_AS(lg_mode(LGModeSpec{-1, 0, 2.0}, grid()), ParameterError);
    CHECK_THROWS_AS(lg_mode(LGModeSpec{0, 0, 2.0}, grid(100)), ParameterError);
    CHECK(generalized_laguerre(0, 1.0, 3.0) == 1.0);
    CHECK(generalized_laguerre(1, 2.0, 0.5) == doctest::Approx(2.5));
    CHECK(generalized_laguerre(2, 0.0, 1.0) == doctest::Approx(-0.5));
}

TEST_CASE("propagate: Gaussian spreads to sqrt2 w0 at the Rayleigh range") {
    const double w0 = 1.0;
    const auto f = lg_mode(LGModeSpec{0, 0, w0}, grid());
    CHECK(beam_width(f) == doctest::Approx(w0).epsilon(1e-6));
    const double z_r = f.k * w0 * w0 / 2.0;
    const auto g = propagate(f, z_r / 10.0, 10);
    CHECK(g.z == doctest::Approx(z_r));
    CHECK(std::abs(beam_width(g) / (std::sqrt(2.0) * w0) - 1.0) < 5e-3);
}

TEST_CASE("propagate: LG_{0,1} stays self-similar") {
    const LGModeSpec spec{0, 1, 1.0};
    const auto f = lg_mode(spec, grid());
    const double z_r = f.k / 2.0;
    for (double zf : {0.5, 1.0, 2.0}) {
        const auto g = propagate(f, zf * z_r);
        const double scale = std::sqrt(1.0 + zf * zf);
        std::vector<double> num, ref;
        double sn = 0.0, sr = 0.0;
        for (int iy = 0; iy < g.grid.ny; ++iy) {
            for (int ix = 0; ix < g.grid.nx; ++ix) {
                num.push_back(std::norm(g.grid(ix, iy)));
                ref.push_back(std::norm(lg_amplitude(spec, g.grid.x(ix) / scale, g.grid.y(iy) / scale)));
                sn += num.back();
                sr += ref.back();
            }
        }
        double diff2 = 0.0, ref2 = 0.0;
        for (std::size_t i = 0; i < num.size(); ++i) {
            diff2 += std::pow(num[i] / sn - ref[i] / sr, 2);
            ref2 += std::pow(ref[i] / sr, 2);
        }
        CHECK(std::sqrt(diff2 / ref2) < 0.01);
    }
}

TEST_CASE("propagate: zero field, unitarity, linearity, reversibility") {
    BeamField zero = field_from(grid(64, 0.25, 10.0), [](double, double) { return cplx{0.0, 0.0}; });
    for (const auto& v : propagate(zero, 1.0, 3).grid.data) CHECK(v == cplx{0.0, 0.0});

    const auto u = lg_mode(LGModeSpec{1, 2, 1.5}, grid(128, 0.125, 20.0));
    const auto v = lg_mode(LGModeSpec{0, -1, 1.2}, grid(128, 0.125, 20.0));
    BeamField current = u;
    for (int step = 0; step < 10; ++step) {
        const double before = current.grid.norm2();
        current = propagate(current, 0.7);
        CHECK(std::abs(current.grid.norm2() - before) < 1e-10);
    }

    const cplx alpha{0.3, -1.1}, beta{-2.0, 0.4};
    BeamField mix = u;
    for (std::size_t i = 0; i < mix.grid.data.size(); ++i) mix.grid.data[i] = alpha * u.grid.data[i] + beta * v.grid.data[i];
    const auto pm = propagate(mix, 3.0, 2), pu = propagate(u, 3.0, 2), pv = propagate(v, 3.0, 2);
    double lin = 0.0;
    for (std::size_t i = 0; i < mix.grid.data.size(); ++i)
        lin = std::max(lin, std::abs(pm.grid.data[i] - alpha * pu.grid.data[i] - beta * pv.grid.data[i]));
    CHECK(lin < 1e-12);

    const auto back = propagate(propagate(u, 4.0), -4.0);
    CHECK(max_diff(back.grid.data, u.grid.data) < 1e-10);
    CHECK(back.z == doctest::Approx(0.0));
}

TEST_CASE("propagate: aliasing and argument checks") {
    auto noisy = field_from(grid(64, 0.25, 10.0), [](double x, double y) {
        return cplx{std::exp(-(x * x + y * y) / 4.0), 0.0};
    });
    for (int iy = 0; iy < 64; ++iy)
        for (int ix = 0; ix < 64; ++ix) noisy.grid(ix, iy) += ((ix + iy) % 2 ? 0.2 : -0.2);
    CHECK(edge_energy_fraction(noisy) > kAliasingLimit);
    CHECK_THROWS_AS(propagate(noisy, 1.0), AliasingError);

    const auto f = lg_mode(LGModeSpec{0, 0, 2.0}, grid());
    CHECK(edge_energy_fraction(f) < 1e-12);
    CHECK_THROWS_AS(propagate(f, std::nan(""), 1), ParameterError);
    CHECK_THROWS_AS(propagate(f, 1.0, -1), ParameterError);
    BeamField odd = f;
    odd.grid = ComplexGrid(48, 48, 0.1, 0.1);
    CHECK_THROWS_AS(propagate(odd, 1.0), ParameterError);
    BeamField bad_k = f;
    bad_k.k = 0.0;
    CHECK_THROWS_AS(propagate(bad_k, 1.0), ParameterError);
}

TEST_CASE("topological charge: exact for LG modes") {
    const double w0 = 2.0;
    for (int ell = -3; ell <= 3; ++ell) {
        const auto f = lg_mode(LGModeSpec{0, ell, w0}, grid());
        CHECK(topological_charge(f, CircleLoop::physical(f, 0.0, 0.0, w0)) == ell);
    }
}

TEST_CASE("topological charge: invariant under global phase and loop radius") {
    const double w0 = 2.0;
    auto f = lg_mode(LGModeSpec{0, 2, w0}, grid());
    for (double phase : {0.0, 1.0, 2.5, -3.0}) {
        BeamField g = f;
        for (auto& v : g.grid.data) v *= std::polar(1.0, phase);
        for (double r : {0.25 * w0, 0.5 * w0, w0, 1.5 * w0, 2.0 * w0})
            CHECK(topological_charge(g, CircleLoop::physical(g, 0.0, 0.0, r)) == 2);
    }
    // A loop that avoids the core sees no winding.
    CHECK(topological_charge(f, CircleLoop::physical(f, 1.5 * w0, 0.0, 0.5)) == 0);
}

TEST_CASE("topological charge: loop errors") {
    const auto f = lg_mode(LGModeSpec{0, 1, 2.0}, grid());
    CHECK_THROWS_AS(topological_charge(f, CircleLoop{128.0, 128.0, 200.0}), ParameterError);
    CHECK_THROWS_AS(topological_charge(f, CircleLoop{128.0, 128.0, 0.0}), ParameterError);
    BeamField half = f;
    for (int iy = 0; iy < half.grid.ny; ++iy)
        for (int ix = 0; ix < half.grid.nx / 2; ++ix) half.grid(ix, iy) = 0.0;
    CHECK_THROWS_AS(topological_charge(half, CircleLoop::physical(half, 0.0, 0.0, 2.0)), ParameterError);
}

TEST_CASE("find_vortices: single LG core") {
    const auto f = lg_mode(LGModeSpec{0, 1, 2.0}, grid());
    const auto vs = find_vortices(f);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].charge == 1);
    CHECK(std::abs(vs[0].x) <= 0.5 * f.grid.dx);
    CHECK(std::abs(vs[0].y) <= 0.5 * f.grid.dy);

    const auto anti = lg_mode(LGModeSpec{0, -2, 2.0}, grid());
    CHECK(total_charge(find_vortices(anti)) == -2);
    CHECK(find_vortices(lg_mode(LGModeSpec{0, 0, 2.0}, grid())).empty());
}

TEST_CASE("find_vortices: two imprinted cores") {
    const double a = 1.03;
    const auto f = imprinted(grid(), 3.0, {cplx{a, 0.0}, cplx{-a, 0.0}});
    const auto vs = find_vortices(f);
    REQUIRE(vs.size() == 2);
    CHECK(vs[0].charge == 1);
    CHECK(vs[1].charge == 1);
    const double dx = f.grid.dx;
    CHECK(std::abs(std::abs(vs[0].x) - a) <= 0.5 * dx);
    CHECK(std::abs(std::abs(vs[1].x) - a) <= 0.5 * dx);
    CHECK(vs[0].x * vs[1].x < 0.0);
    for (const auto& v : vs) CHECK(std::abs(v.y) <= 0.5 * dx);
}

TEST_CASE("find_vortices: net charge conserved along z") {
    BeamField f = imprinted(grid(256, 0.125, 20.0), 2.0, {cplx{1.0, 0.5}, cplx{-1.2, 0.0}, cplx{0.3, -1.4}});
    const int initial = total_charge(find_vortices(f));
    CHECK(initial == 3);
    const double z_r = f.k * 4.0 / 2.0;
    for (int slice = 0; slice < 12; ++slice) {
        f = propagate(f, z_r / 24.0);
        const auto vs = find_vortices(f);
        CHECK(total_charge(vs) == initial);
        for (const auto& v : vs) {
            CHECK(std::abs(v.x) < f.grid.x(f.grid.nx - 1) - 4.0 * f.grid.dx);
            CHECK(std::abs(v.y) < f.grid.y(f.grid.ny - 1) - 4.0 * f.grid.dy);
        }
    }
}

TEST_CASE("paraxial validity ratio") {
    const double w0 = 1.0;
    const auto collimated = lg_mode(LGModeSpec{0, 0, w0}, grid(256, 0.125, 100.0));
    const double z_r1 = 100.0 * w0 * w0 / 2.0;
    const double r1 = paraxial_validity(collimated, 0.01 * z_r1);
    CHECK(r1 > 0.0);
    CHECK(r1 < 1e-3);

    const auto focused = lg_mode(LGModeSpec{0, 0, w0}, grid(256, 0.125, 5.0));
    const double z_r2 = 5.0 * w0 * w0 / 2.0;
    const double r2 = paraxial_validity(focused, 0.01 * z_r2);
    CHECK(r2 / r1 == doctest::Approx(400.0).epsilon(0.1));

    const auto plane = field_from(grid(64, 0.25, 10.0), [](double, double) { return cplx{0.7, -0.2}; });
    CHECK(paraxial_validity(plane, 0.5) == 0.0);
    CHECK_THROWS_AS(paraxial_validity(plane, 0.0), ParameterError);
}

TEST_CASE("field binary round trip and layout") {
    auto f = lg_mode(LGModeSpec{1, -1, 1.0}, grid(64, 0.125, 7.0));
    f.z = 1.25;
    std::stringstream buf;
    write_field(buf, f);
    const std::string bytes = buf.str();
    CHECK(bytes.size() == 8 + 2 * 8 + 4 * 8 + 64 * 64 * 16);
    CHECK(bytes.substr(0, 8) == "KVBEAM01");
    std::uint64_t nx = 0;
    std::memcpy(&nx, bytes.data() + 8, 8);
    CHECK(nx == 64);
    double k = 0.0;
    std::memcpy(&k, bytes.data() + 40, 8);
    CHECK(k == 7.0);

    const auto g = read_field(buf);
    CHECK(g.grid.nx == 64);
    CHECK(g.grid.ny == 64);
    CHECK(g.grid.dx == 0.125);
    CHECK(g.k == 7.0);
    CHECK(g.z == 1.25);
    CHECK(g.grid.data == f.grid.data);

    std::stringstream junk("NOTABEAMxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx");
    CHECK_THROWS_AS(read_field(junk), ParameterError);
    std::stringstream truncated(bytes.substr(0, 100));
    CHECK_THROWS_AS(read_field(truncated), ParameterError);
}

TEST_CASE("intensity/phase CSV") {
    const auto f = lg_mode(LGModeSpec{0, 1, 1.0}, grid(64, 0.125, 10.0));
    std::ostringstream out;
    write_intensity_phase_csv(out, f);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y,intensity,phase");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 64 * 64);
}
