#include "commands.hpp"

#include "kirchhoff/errors.hpp"
#include "kirchhoff/landau.hpp"
#include "kirchhoff/orthopoly.hpp"
#include "kirchhoff/paraxial.hpp"
#include "kirchhoff/stieltjes.hpp"
#include "kirchhoff/vortex_dynamics.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace kirchhoff::cli {

namespace {

using json = nlohmann::json;

constexpr std::string_view kCommands[] = {"zeros", "equilibrium", "simulate", "laughlin", "beam"};

struct GlobalOptions {
    std::string config;
    std::string out;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

/// Everything a command produces. Nothing touches the disk until the command
/// returns, so a failed validation leaves no files behind.
struct Outputs {
    std::vector<std::pair<std::string, std::string>> files;
    std::string report;
};

json load_section(const GlobalOptions& g, std::string_view command, std::initializer_list<std::string_view> allowed) {
    if (g.config.empty()) return json::object();
    std::ifstream in(g.config);
    if (!in) throw ParameterError("cannot read config file '" + g.config + "'");
    const json root = json::parse(in);
    if (!root.is_object()) throw ParameterError("config: top level must be an object");
    for (const auto& [key, value] : root.items()) {
        if (std::find(std::begin(kCommands), std::end(kCommands), key) == std::end(kCommands))
            throw ParameterError("config: unknown top-level key '" + key + "'");
        if (!value.is_object()) throw ParameterError("config: '" + key + "' must be an object");
    }
    const auto it = root.find(command);
    if (it == root.end()) return json::object();
    for (const auto& [key, value] : it->items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ParameterError(fmt::format("config: unknown key '{}' in '{}'", key, command));
    }
    return *it;
}

/// Flag, then config field, then default.
template <class T>
T pick(const std::optional<T>& flag, const json& section, const char* key, T fallback) {
    if (flag) return *flag;
    if (section.contains(key)) return section.at(key).get<T>();
    return fallback;
}

cplx parse_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw ParameterError("complex values are numbers or [re, im] pairs");
}

std::vector<cplx> parse_points(const json& j) {
    if (!j.is_array()) throw ParameterError("expected an array of points");
    std::vector<cplx> z;
    for (const json& e : j) z.push_back(parse_complex(e));
    return z;
}

BackgroundFlow parse_background(const json& j) {
    const json spec = j.is_string() ? json{{"type", j}} : j;
    if (!spec.is_object()) throw ParameterError("background must be a name or an object");
    static constexpr std::string_view known[] = {"type", "l", "p", "q", "omega", "poles", "residues", "polynomial"};
    for (const auto& [key, value] : spec.items()) {
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            throw ParameterError("background: unknown key '" + key + "'");
    }
    const std::string type = spec.value("type", std::string("none"));
    BackgroundFlow bg;
    if (type == "none") {
        bg = BackgroundFlow::none();
    } else if (type == "hermite") {
        bg = BackgroundFlow::hermite_linear();
    } else if (type == "coulomb") {
        bg = BackgroundFlow::coulomb(spec.value("l", 0.0));
    } else if (type == "jacobi") {
        bg = BackgroundFlow::jacobi(spec.value("p", 0.5), spec.value("q", 0.5));
    } else if (type == "conjugate_linear") {
        bg = BackgroundFlow::conjugate_linear(spec.value("omega", 0.25));
    } else if (type == "custom_rational") {
        std::vector<cplx> poles, residues;
        if (spec.contains("poles")) poles = parse_points(spec.at("poles"));
        if (spec.contains("residues")) residues = parse_points(spec.at("residues"));
        bg = BackgroundFlow::custom_rational(std::move(poles), std::move(residues),
                                             spec.value("polynomial", std::vector<double>{}));
    } else {
        throw ParameterError("unknown background type '" + type + "'");
    }
    bg.validate();
    return bg;
}

void require(bool ok, const char* message) {
    if (!ok) throw ParameterError(message);
}

// zeros

struct ZerosFlags {
    std::optional<std::string> family;
    std::optional<int> n;
    std::optional<double> alpha, beta;
};

int cmd_zeros(const GlobalOptions& g, const ZerosFlags& f, Outputs& o) {
    const json cfg = load_section(g, "zeros", {"family", "n", "alpha", "beta"});
    orthopoly::PolynomialSpec spec;
    spec.family = orthopoly::family_from_string(pick<std::string>(f.family, cfg, "family", "hermite"));
    spec.degree = pick(f.n, cfg, "n", 3);
    spec.alpha = pick(f.alpha, cfg, "alpha", 0.0);
    spec.beta = pick(f.beta, cfg, "beta", 0.0);
    spec.validate();
    const double tol = g.tol.value_or(1e-10);
    require(tol > 0.0, "--tol must be > 0");

    const auto zs = orthopoly::zeros(spec);
    std::string table = "k,zero,ode_residual\n";
    bool ok = true;
    for (std::size_t k = 0; k < zs.size(); ++k) {
        const double res = orthopoly::ode_residual(spec, zs[k]);
        ok = ok && std::abs(res) <= tol * std::max(1.0, orthopoly::ode_scale(spec, zs[k]));
        table += fmt::format("{},{:.17g},{:.17g}\n", k + 1, zs[k], res);
    }
    o.report = table;
    o.files.emplace_back("zeros.csv", table);
    return ok ? kOk : kCheckFailed;
}

// equilibrium

struct EquilibriumFlags {
    std::optional<std::string> background;
    std::optional<int> n, max_iter;
    std::optional<double> l, p, q;
};

int cmd_equilibrium(const GlobalOptions& g, const EquilibriumFlags& f, Outputs& o) {
    const json cfg = load_section(g, "equilibrium", {"n", "background", "initial_guess", "max_iter", "certify_tol"});
    json bg = cfg.contains("background") ? cfg.at("background") : json("hermite");
    if (bg.is_string()) bg = json{{"type", bg}};
    if (f.background) bg["type"] = *f.background;
    if (f.l) bg["l"] = *f.l;
    if (f.p) bg["p"] = *f.p;
    if (f.q) bg["q"] = *f.q;

    stieltjes::EquilibriumProblem problem;
    problem.n = pick(f.n, cfg, "n", 10);
    problem.background = parse_background(bg);
    if (cfg.contains("initial_guess")) problem.initial_guess = cfg.at("initial_guess").get<std::vector<double>>();
    problem.validate();
    const int max_iter = pick(f.max_iter, cfg, "max_iter", 500);
    const double tol = g.tol.value_or(stieltjes::kDefaultTolerance);
    const double certify_tol = cfg.value("certify_tol", 1e-10);
    require(max_iter >= 1, "max_iter must be >= 1");
    require(tol > 0.0 && certify_tol > 0.0, "tolerances must be > 0");

    const auto report = stieltjes::solve_and_certify(problem, tol, certify_tol, max_iter);
    o.report = stieltjes::to_json(report).dump(2) + "\n";
    o.files.emplace_back("equilibrium.json", o.report);
    if (!report.converged) return kNoConvergence;
    if (report.certified.has_value() && !*report.certified) return kCheckFailed;
    return kOk;
}

// simulate

struct SimulateFlags {
    std::optional<double> t_end, drift_bound, collision_eps;
    std::optional<int> samples;
};

int cmd_simulate(const GlobalOptions& g, const SimulateFlags& f, Outputs& o) {
    const json cfg = load_section(g, "simulate", {"positions", "kappa", "background", "t_end", "samples", "rtol",
                                                  "atol", "max_steps", "collision_eps", "drift_bound"});
    vortex::VortexConfiguration start;
    start.z = cfg.contains("positions") ? parse_points(cfg.at("positions")) : std::vector<cplx>{1.0, -1.0};
    start.kappa = cfg.value("kappa", std::vector<double>(start.z.size(), 1.0));
    start.validate();
    const BackgroundFlow bg = parse_background(cfg.value("background", json("none")));

    const double t_end = pick(f.t_end, cfg, "t_end", 4.0 * std::numbers::pi);
    const int samples = pick(f.samples, cfg, "samples", 100);
    const double drift_bound = pick(f.drift_bound, cfg, "drift_bound", 1e-8);
    vortex::IntegrationControls controls;
    controls.rtol = g.tol.value_or(cfg.value("rtol", controls.rtol));
    controls.atol = g.tol.value_or(cfg.value("atol", controls.atol));
    controls.max_steps = cfg.value("max_steps", controls.max_steps);
    controls.collision_eps = pick(f.collision_eps, cfg, "collision_eps", controls.collision_eps);
    require(std::isfinite(t_end) && t_end > 0.0, "t_end must be > 0");
    require(samples >= 1, "samples must be >= 1");
    require(drift_bound > 0.0, "drift_bound must be > 0");
    require(controls.rtol > 0.0 && controls.atol > 0.0, "tolerances must be > 0");
    require(controls.max_steps >= 1, "max_steps must be >= 1");
    require(controls.collision_eps > 0.0, "collision_eps must be > 0");
    controls.sample_times = vortex::uniform_samples(0.0, t_end, samples);

    const auto traj = vortex::integrate(start, bg, t_end, controls);
    const double worst = std::max({traj.drift.impulse, traj.drift.angular, traj.drift.energy});
    json final_positions = json::array();
    for (const cplx& z : traj.samples.back().z) final_positions.push_back({z.real(), z.imag()});
    const json summary = {
        {"n", start.size()},
        {"background", bg.name()},
        {"t_end", t_end},
        {"accepted_steps", traj.accepted_steps},
        {"rejected_steps", traj.rejected_steps},
        {"drift", {{"impulse", traj.drift.impulse}, {"angular", traj.drift.angular}, {"energy", traj.drift.energy}}},
        {"drift_bound", drift_bound},
        {"within_bound", worst < drift_bound},
        {"final_positions", final_positions},
    };
    std::ostringstream csv;
    vortex::write_trajectory_csv(csv, traj);
    o.report = summary.dump(2) + "\n";
    o.files.emplace_back("trajectory.csv", csv.str());
    o.files.emplace_back("drift.json", o.report);
    return worst < drift_bound ? kOk : kCheckFailed;
}

// laughlin

struct LaughlinFlags {
    std::optional<int> particles, m_exp, max_iter;
    std::optional<double> l_b;
};

/// Regular N-gon at the default radius with seeded angular jitter.
std::vector<cplx> seeded_guess(const landau::LaughlinParams& params, std::uint64_t seed) {
    auto z = landau::default_planar_guess(params);
    if (z.size() < 2) return z;
    std::mt19937_64 rng(seed);
    for (cplx& v : z) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1), platform independent
        v *= std::polar(1.0, 0.2 * (u - 0.5));
    }
    return z;
}

int cmd_laughlin(const GlobalOptions& g, const LaughlinFlags& f, Outputs& o) {
    const json cfg = load_section(g, "laughlin", {"N", "m_exp", "l_B", "initial_guess", "max_iter"});
    landau::LaughlinParams params;
    params.particles = pick(f.particles, cfg, "N", 2);
    params.m_exp = pick(f.m_exp, cfg, "m_exp", 1);
    params.l_b = pick(f.l_b, cfg, "l_B", 1.0);
    params.validate();
    const int max_iter = pick(f.max_iter, cfg, "max_iter", 100);
    const double tol = g.tol.value_or(1e-10);
    require(max_iter >= 1, "max_iter must be >= 1");
    require(tol > 0.0, "--tol must be > 0");
    std::vector<cplx> guess;
    if (cfg.contains("initial_guess")) guess = parse_points(cfg.at("initial_guess"));
    else if (g.seed) guess = seeded_guess(params, *g.seed);
    else guess = landau::default_planar_guess(params);

    const auto eq = landau::solve_planar_equilibrium(params, std::move(guess), tol, max_iter);
    json report = landau::to_json(eq, params);
    if (g.seed) report["seed"] = *g.seed;
    o.report = report.dump(2) + "\n";
    o.files.emplace_back("laughlin.json", o.report);
    return eq.converged ? kOk : kNoConvergence;
}

// beam

struct BeamFlags {
    std::optional<int> p, ell, nx, slices;
    std::optional<double> w0, k, dx, distance;
};

std::string field_bytes(const paraxial::BeamField& field) {
    std::ostringstream s(std::ios::binary);
    paraxial::write_field(s, field);
    return s.str();
}

int cmd_beam(const GlobalOptions& g, const BeamFlags& f, Outputs& o) {
    const json cfg = load_section(g, "beam", {"nx", "ny", "dx", "dy", "k", "p", "ell", "w0", "distance", "slices",
                                              "csv"});
    paraxial::GridSpec grid;
    grid.nx = pick(f.nx, cfg, "nx", grid.nx);
    grid.ny = cfg.value("ny", grid.nx);
    grid.dx = pick(f.dx, cfg, "dx", grid.dx);
    grid.dy = cfg.value("dy", grid.dx);
    grid.k = pick(f.k, cfg, "k", grid.k);
    paraxial::LGModeSpec mode;
    mode.p = pick(f.p, cfg, "p", 0);
    mode.ell = pick(f.ell, cfg, "ell", 1);
    mode.w0 = pick(f.w0, cfg, "w0", 1.0);
    const double distance = pick(f.distance, cfg, "distance", 1.0); // in Rayleigh ranges
    const int slices = pick(f.slices, cfg, "slices", 10);
    const bool csv = cfg.value("csv", false);
    require(std::isfinite(distance) && distance >= 0.0, "distance must be >= 0");
    require(slices >= 1, "slices must be >= 1");

    const auto initial = paraxial::lg_mode(mode, grid);
    initial.validate();
    const double z_r = grid.k * mode.w0 * mode.w0 / 2.0;
    const double dz = distance * z_r / slices;

    std::string track = "slice,z,x,y,charge\n";
    json charges = json::array();
    paraxial::BeamField field = initial;
    int reference = 0;
    bool conserved = true;
    for (int s = 0; s <= slices; ++s) {
        if (s > 0) field = paraxial::propagate(field, dz);
        const auto vs = paraxial::find_vortices(field);
        const int total = paraxial::total_charge(vs);
        if (s == 0) reference = total;
        conserved = conserved && total == reference;
        charges.push_back(total);
        for (const auto& v : vs) track += fmt::format("{},{:.17g},{:.17g},{:.17g},{}\n", s, field.z, v.x, v.y, v.charge);
    }
    const json summary = {
        {"mode", {{"p", mode.p}, {"ell", mode.ell}, {"w0", mode.w0}}},
        {"grid", {{"nx", grid.nx}, {"ny", grid.ny}, {"dx", grid.dx}, {"dy", grid.dy}, {"k", grid.k}}},
        {"rayleigh_range", z_r},
        {"z_end", field.z},
        {"slices", slices},
        {"width_initial", paraxial::beam_width(initial)},
        {"width_final", paraxial::beam_width(field)},
        {"total_charge", charges},
        {"charge_conserved", conserved},
    };
    o.report = summary.dump(2) + "\n";
    o.files.emplace_back("beam.json", o.report);
    o.files.emplace_back("track.csv", track);
    o.files.emplace_back("field_initial.bin", field_bytes(initial));
    o.files.emplace_back("field_final.bin", field_bytes(field));
    if (csv) {
        std::ostringstream a, b;
        paraxial::write_intensity_phase_csv(a, initial);
        paraxial::write_intensity_phase_csv(b, field);
        o.files.emplace_back("intensity_initial.csv", a.str());
        o.files.emplace_back("intensity_final.csv", b.str());
    }
    return conserved ? kOk : kCheckFailed;
}

void write_outputs(const std::string& dir, const Outputs& o) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    for (const auto& [name, bytes] : o.files) {
        std::ofstream file(std::filesystem::path(dir) / name, std::ios::binary | std::ios::trunc);
        file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!file) throw std::runtime_error("cannot write " + (std::filesystem::path(dir) / name).string());
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Point-vortex, Stieltjes, Laughlin and paraxial-beam experiments", "kirchhoff"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may also follow the subcommand
    GlobalOptions g;
    app.add_option("--config", g.config, "JSON config with one object per command")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "Directory for output files (none written if omitted)");
    app.add_option("--tol", g.tol, "Tolerance (meaning depends on the command)");
    app.add_option("--seed", g.seed, "Seed for randomized initial data");
    app.add_flag("--quiet", g.quiet, "Suppress the report on stdout");

    ZerosFlags zf;
    auto* zeros = app.add_subcommand("zeros", "Orthogonal-polynomial zeros and ODE residuals");
    zeros->add_option("--family", zf.family, "hermite | laguerre | jacobi");
    zeros->add_option("-n,--degree", zf.n, "Degree");
    zeros->add_option("--alpha", zf.alpha);
    zeros->add_option("--beta", zf.beta);

    EquilibriumFlags ef;
    auto* equilibrium = app.add_subcommand("equilibrium", "Stieltjes equilibrium, certified against polynomial zeros");
    equilibrium->add_option("--background", ef.background, "hermite | coulomb | jacobi | custom_rational");
    equilibrium->add_option("-n,--count", ef.n, "Number of charges");
    equilibrium->add_option("--l", ef.l, "Coulomb angular momentum");
    equilibrium->add_option("--p", ef.p, "Jacobi charge at +1");
    equilibrium->add_option("--q", ef.q, "Jacobi charge at -1");
    equilibrium->add_option("--max-iter", ef.max_iter);

    SimulateFlags sf;
    auto* simulate = app.add_subcommand("simulate", "Integrate the point-vortex equations");
    simulate->add_option("--t-end", sf.t_end);
    simulate->add_option("--samples", sf.samples, "Number of output samples after t = 0");
    simulate->add_option("--drift-bound", sf.drift_bound);
    simulate->add_option("--collision-eps", sf.collision_eps);

    LaughlinFlags lf;
    auto* laughlin = app.add_subcommand("laughlin", "Planar Laughlin stationarity equilibrium");
    laughlin->add_option("-N,--particles", lf.particles);
    laughlin->add_option("--m-exp", lf.m_exp, "Odd filling exponent");
    laughlin->add_option("--l-b", lf.l_b, "Magnetic length");
    laughlin->add_option("--max-iter", lf.max_iter);

    BeamFlags bf;
    auto* beam = app.add_subcommand("beam", "Propagate an LG mode and track its vortices");
    beam->add_option("--p", bf.p, "Radial index");
    beam->add_option("--ell", bf.ell, "Azimuthal index");
    beam->add_option("--w0", bf.w0, "Waist");
    beam->add_option("--k", bf.k, "Wavenumber");
    beam->add_option("--nx", bf.nx, "Grid points per axis");
    beam->add_option("--dx", bf.dx, "Grid spacing");
    beam->add_option("--distance", bf.distance, "Propagation distance in Rayleigh ranges");
    beam->add_option("--slices", bf.slices, "Number of propagation slices");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }

    Outputs o;
    int code = kOk;
    try {
        if (*zeros) code = cmd_zeros(g, zf, o);
        else if (*equilibrium) code = cmd_equilibrium(g, ef, o);
        else if (*simulate) code = cmd_simulate(g, sf, o);
        else if (*laughlin) code = cmd_laughlin(g, lf, o);
        else code = cmd_beam(g, bf, o);
        write_outputs(g.out, o);
    } catch (const CollisionError& e) {
        err << "collision: " << e.what() << "\n";
        return kCollision;
    } catch (const AliasingError& e) {
        err << "aliasing: " << e.what() << "\n";
        return kAliasing;
    } catch (const ConvergenceError& e) {
        err << "no convergence: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const ParameterError& e) {
        err << "invalid: " << e.what() << "\n";
        return kInvalid;
    } catch (const DomainError& e) {
        err << "invalid: " << e.what() << "\n";
        return kInvalid;
    } catch (const json::exception& e) {
        err << "invalid config: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }
    if (!g.quiet) out << o.report;
    return code;
}

} // namespace kirchhoff::cli
