#pragma once

// Batch commands behind the qcov executable. Each command reads a resolved
// RunConfig, writes its files into cfg.out_dir and returns an exit code:
// 0 when every check passes, 1 on an invariant failure, 2 on bad configuration.

#include "qcov/qcov.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace qcov::cli {

enum ExitCode : int { exit_pass = 0, exit_failure = 1, exit_config = 2 };

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::optional<int> grid_dim;
    std::optional<int> grid_n;
    std::optional<double> box;
    double kappa = 1.0;
    double c = 1.0;
    double lambda = 1.0;
    double d = 0.0;
    std::uint64_t seed = 20240601;
    std::string out_dir = ".";
    std::map<std::string, double> tol_overrides;
    std::string input;  ///< only for inspect-wavefunction
};

// ---------------------------------------------------------------------------
// Configuration plumbing

inline double parse_number(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw config_error("'" + key + "': not a number: " + text);
    }
    if (used != text.size() || !std::isfinite(v)) throw config_error("'" + key + "': not a finite number: " + text);
    return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
    const double v = parse_number(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw config_error("'" + key + "': not an integer: " + text);
    return static_cast<int>(v);
}

/// Splits KEY=VAL and records it as a tolerance override.
inline void add_tol_override(RunConfig& cfg, const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw config_error("tolerance override must look like KEY=VAL: " + item);
    const std::string key = item.substr(0, eq);
    cfg.tol_overrides[key] = parse_number("tol-override " + key, item.substr(eq + 1));
}

/// Applies one configuration entry; keys are the long flag names without dashes.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "grid-n") cfg.grid_n = parse_int(key, value);
    else if (key == "grid-dim") cfg.grid_dim = parse_int(key, value);
    else if (key == "box") cfg.box = parse_number(key, value);
    else if (key == "kappa") cfg.kappa = parse_number(key, value);
    else if (key == "c") cfg.c = parse_number(key, value);
    else if (key == "lambda") cfg.lambda = parse_number(key, value);
    else if (key == "d") cfg.d = parse_number(key, value);
    else if (key == "seed") {
        const double s = parse_number(key, value);
        if (s < 0 || s != std::floor(s) || s > 9.007199254740992e15) throw config_error("seed must be a non-negative integer");
        cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "out") cfg.out_dir = value;
    else if (key.rfind("tol.", 0) == 0) cfg.tol_overrides[key.substr(4)] = parse_number(key, value);
    else throw config_error("unknown configuration key: " + key);
}

/// Reads a config file: a JSON object, or key=value lines with '#' comments.
inline void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        Json j;
        try {
            j = Json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw config_error("config file is not valid JSON: " + std::string(e.what()));
        }
        for (const auto& [key, value] : j.items()) {
            if (key == "tol" && value.is_object()) {
                for (const auto& [tk, tv] : value.items()) {
                    if (!tv.is_number()) throw config_error("tolerance '" + tk + "' must be a number");
                    cfg.tol_overrides[tk] = tv.get<double>();
                }
            } else {
                apply_setting(cfg, key, value.is_string() ? value.get<std::string>() : value.dump());
            }
        }
        return;
    }
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw config_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto x = s.find_first_not_of(" \t");
            const auto y = s.find_last_not_of(" \t");
            return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
        };
        apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

using Tolerances = std::map<std::string, double>;

/// Command defaults overlaid with the user's overrides; unknown keys and non-positive values are errors.
inline Tolerances resolve_tolerances(Tolerances defaults, const RunConfig& cfg) {
    for (const auto& [key, value] : cfg.tol_overrides) {
        if (!defaults.count(key)) {
            std::string known;
            for (const auto& kv : defaults) known += (known.empty() ? "" : ", ") + kv.first;
            throw config_error("unknown tolerance '" + key + "' (this command knows: " + known + ")");
        }
        if (!(value > 0.0)) throw config_error("tolerance '" + key + "' must be positive");
        defaults[key] = value;
    }
    return defaults;
}

struct GridDefaults {
    int dim;
    int n;
    double box;
};

inline GridSpec resolve_grid(const RunConfig& cfg, const GridDefaults& def) {
    try {
        return make_grid(cfg.grid_dim.value_or(def.dim), cfg.grid_n.value_or(def.n), cfg.box.value_or(def.box),
                         std::size_t{1} << 21);
    } catch (const precondition_error& e) {
        throw config_error(e.what());
    }
}

inline FreeDynamics resolve_dynamics(const RunConfig& cfg) {
    FreeDynamics dyn{cfg.kappa, cfg.c, cfg.d, Vec::Zero()};
    try {
        dyn.validate();
    } catch (const precondition_error& e) {
        throw config_error(e.what());
    }
    return dyn;
}

/// Header shared by every output: command, resolved configuration, seed and version. The output
/// directory is deliberately left out so that runs into different directories compare equal.
inline Json run_header(const std::string& command, const RunConfig& cfg, const Json& resolved,
                       const Tolerances& tol) {
    Json config = resolved;
    config["kappa"] = cfg.kappa;
    config["c"] = cfg.c;
    config["lambda"] = cfg.lambda;
    config["d"] = cfg.d;
    Json t = Json::object();
    for (const auto& [k, v] : tol) t[k] = v;
    config["tolerances"] = t;
    return {{"artifact", "qcov"}, {"version", version}, {"command", command}, {"seed", cfg.seed}, {"config", config}};
}

inline Json grid_json(const GridSpec& g) {
    return {{"grid_dim", g.dim()}, {"grid_n", g.points_per_axis()}, {"box", g.box_length()}};
}

inline std::filesystem::path output_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::path dir(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw config_error("cannot create output directory " + cfg.out_dir + ": " + ec.message());
    return dir / name;
}

inline std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    const auto path = output_path(cfg, name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path.string());
    return out;
}

inline void write_json_file(const RunConfig& cfg, const std::string& name, const Json& j) {
    auto out = open_output(cfg, name);
    out << j.dump(2) << '\n';
}

inline Json number(double x) { return std::isfinite(x) ? Json(x) : Json(format_double(x)); }

/// A measured quantity compared against its tolerance.
struct Check {
    std::string name;
    double value;
    double tolerance;
    bool pass() const { return std::isfinite(value) && value <= tolerance; }
};

inline Json checks_json(const std::vector<Check>& checks) {
    Json arr = Json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name}, {"value", number(c.value)}, {"tolerance", c.tolerance}, {"pass", c.pass()}});
    return arr;
}

inline bool all_pass(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

inline std::string csv_row(std::initializer_list<std::string> cells) {
    std::string out;
    for (const auto& c : cells) out += (out.empty() ? "" : ",") + c;
    return out + "\n";
}

inline std::string f(double x) { return format_double(x); }

// ---------------------------------------------------------------------------
// Random draws. std::mt19937_64 is fully specified by the standard; the
// uniform mapping below is written out so it does not depend on the
// standard library's distribution implementation.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    Vec vec(int dim, double r) {
        Vec v = Vec::Zero();
        for (int j = 0; j < dim; ++j) v[j] = uniform(-r, r);
        return v;
    }

private:
    std::mt19937_64 engine_;
};

/// Lattice rotation of the grid's dimension: quarter turns about axis 2 (2D) or any coordinate axis (3D).
inline Mat random_lattice_rotation(Rng& rng, int dim) {
    if (dim == 1) return Mat::Identity();
    if (dim == 2) return axis_rotation(2, 0.5 * pi * rng.integer(0, 3));
    Mat r = axis_rotation(rng.integer(0, 2), 0.5 * pi * rng.integer(0, 3));
    return r * axis_rotation(rng.integer(0, 2), 0.5 * pi * rng.integer(0, 3));
}

inline GalileiElement random_galilei(Rng& rng, int dim) {
    GalileiElement g;
    g.a = rng.vec(dim, 1.5);
    g.rot = random_lattice_rotation(rng, dim);
    g.t = rng.uniform(-1.0, 1.0);
    g.v = rng.vec(dim, 0.5);
    // Lattice rotations carry rounding-level off-diagonal noise; snap them.
    g.rot = g.rot.array().round().matrix();
    return g;
}

/// f(q) = sum_j c_j exp(i m_j dk . q), a band-limited random multiplier.
inline GridFunction random_trig_function(Rng& rng, const GridSpec& grid, int terms, int max_mode) {
    std::vector<std::pair<cplx, Vec>> modes;
    for (int t = 0; t < terms; ++t) {
        Vec k = Vec::Zero();
        for (int j = 0; j < grid.dim(); ++j) k[j] = rng.integer(-max_mode, max_mode) * grid.dk();
        modes.emplace_back(cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)), k);
    }
    return sample(grid, [&](const Vec& q) {
        cplx s = 0.0;
        for (const auto& [c, k] : modes) s += c * std::exp(I * k.dot(q));
        return s;
    });
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_demo_gaussian(const RunConfig& cfg) {
    const Tolerances tol = resolve_tolerances({{"chi_rel", 1e-8}, {"wigner_abs", 1e-6}}, cfg);
    const GridSpec grid = resolve_grid(cfg, {1, 512, 40.0});
    const double lam = cfg.lambda;
    Wavefunction psi(grid);
    try {
        psi = sample_gaussian(grid, lam);
    } catch (const precondition_error& e) {
        throw config_error(std::string("lambda out of the resolvable range: ") + e.what());
    }
    const int n = grid.dim();
    const TableSpec spec = default_table_spec(psi);
    const Json header = run_header("demo-gaussian", cfg, grid_json(grid), tol);

    const PhaseSpaceTable chi = characteristic_table(psi, spec);
    double chi_err = 0.0;
    {
        auto out = open_output(cfg, "chi.csv");
        out << header_line(header) << "k,q,chi_re,chi_im,reference,rel_error\n";
        for (std::size_t i = 0; i < chi.values.size(); ++i) {
            const double k = chi.first[i][spec.axis], q = chi.second[i][spec.axis];
            const double ref = std::exp(-0.5 * lam * lam * k * k - q * q / (8.0 * lam * lam));
            const double err = std::abs(chi.values[i] - ref) / ref;
            chi_err = std::max(chi_err, err);
            out << csv_row({f(k), f(q), f(chi.values[i].real()), f(chi.values[i].imag()), f(ref), f(err)});
        }
    }
    const PhaseSpaceTable rho = wigner_table(psi, spec);
    double rho_err = 0.0;
    {
        auto out = open_output(cfg, "wigner.csv");
        out << header_line(header) << "q,k,rho,reference,abs_error\n";
        for (std::size_t i = 0; i < rho.values.size(); ++i) {
            const double q = rho.first[i][spec.axis], k = rho.second[i][spec.axis];
            const double ref = std::pow(2.0, n) * std::exp(-q * q / (2.0 * lam * lam) - 2.0 * lam * lam * k * k);
            const double err = std::abs(rho.values[i] - ref);
            rho_err = std::max(rho_err, err);
            out << csv_row({f(q), f(k), f(rho.values[i].real()), f(ref), f(err)});
        }
    }
    const std::vector<Check> checks{{"chi_rel", chi_err, tol.at("chi_rel")},
                                    {"wigner_abs", rho_err, tol.at("wigner_abs")}};
    write_json_file(cfg, "report.json",
                    {{"header", header},
                     {"max_chi_error", number(chi_err)},
                     {"max_wigner_error", number(rho_err)},
                     {"checks", checks_json(checks)},
                     {"pass", all_pass(checks)}});
    return all_pass(checks) ? exit_pass : exit_failure;
}

/// Every module's property suite at reduced size, one line per invariant.
inline std::vector<Check> invariant_suite(const RunConfig& cfg, const Tolerances& tol, const GridSpec& grid) {
    Rng rng(cfg.seed);
    const FreeDynamics dyn = resolve_dynamics(cfg);
    std::vector<Check> checks;
    auto add = [&](const std::string& name, double value) { checks.push_back({name, value, tol.at(name)}); };

    // Fourier and canonical structure on the configured grid.
    const Vec k0 = rng.vec(grid.dim(), 0.5);
    const Wavefunction psi = sample_gaussian(grid, cfg.lambda, rng.vec(grid.dim(), 1.0), k0);
    add("fourier_roundtrip", distance(inverse(forward(psi)), psi));
    {
        const SpectralFunction t = forward(psi);
        double s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) s += std::norm(t[i]);
        add("parseval", std::abs(std::pow(two_pi, grid.dim()) * s * grid.k_cell_volume() - 1.0));
    }
    add("ccr_residual", ccr_residual(psi));
    {
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const Vec k1 = rng.vec(grid.dim(), 1.0), a1 = rng.vec(grid.dim(), 1.0);
            const Vec k2 = rng.vec(grid.dim(), 1.0), a2 = rng.vec(grid.dim(), 1.0);
            const Wavefunction lhs = weyl(k1, a1, weyl(k2, a2, psi));
            const cplx phase = std::exp(0.5 * I * (k1.dot(a2) - a1.dot(k2)));
            worst = std::max(worst, distance(lhs, phase * weyl(k1 + k2, a1 + a2, psi)));
        }
        add("weyl_phase_law", worst);
    }
    {
        double worst = 0.0;
        const GridFunction fg = random_trig_function(rng, grid, 3, 4);
        for (int i = 0; i < 10; ++i) {
            std::array<int, 3> steps{0, 0, 0};
            Vec a = Vec::Zero();
            for (int j = 0; j < grid.dim(); ++j) {
                steps[j] = rng.integer(-8, 8);
                a[j] = steps[j] * grid.dq();
            }
            const Wavefunction lhs = shift(a, multiply(fg, shift(-a, psi)));
            worst = std::max(worst, distance(lhs, multiply(roll(steps, fg), psi)));
        }
        add("shift_covariance", worst);
    }

    // Phase space on a 1D reference grid.
    const GridSpec g1 = make_grid(1, 256, 32.0);
    {
        const Wavefunction p = sample_gaussian(g1, 1.0);
        const PhaseSpaceTable chi = characteristic_table(p, default_table_spec(p));
        double worst = 0.0;
        for (std::size_t i = 0; i < chi.values.size(); ++i) {
            const double k = chi.first[i][0], q = chi.second[i][0];
            const double ref = std::exp(-0.5 * k * k - q * q / 8.0);
            worst = std::max(worst, std::abs(chi.values[i] - ref) / ref);
        }
        add("gaussian_chi_rel", worst);
    }

    // Spin.
    add("spin_pi_multiplier", std::abs(multiplier(axis_rotation(2, pi), axis_rotation(2, pi)) + 1.0));
    {
        int mismatches = 0;
        for (int i = 0; i < 50; ++i) {
            auto random_rot = [&] {
                return Mat(Eigen::AngleAxisd(rng.uniform(0, pi), rng.vec(3, 1.0).normalized()).toRotationMatrix());
            };
            const Mat a = random_rot(), b = random_rot(), c = random_rot();
            if (multiplier(a, b) * multiplier(a * b, c) != multiplier(b, c) * multiplier(a, b * c)) ++mismatches;
        }
        add("spin_cocycle", mismatches);
    }
    add("spin_lift_2pi", (lift_path(winding_path(Vec::UnitZ(), two_pi, 16)) + Mat2c::Identity()).cwiseAbs().maxCoeff());
    add("spin_lift_4pi", (lift_path(winding_path(Vec::UnitZ(), 2 * two_pi, 32)) - Mat2c::Identity()).cwiseAbs().maxCoeff());

    // Galilei on a 2D grid with lattice rotations.
    const GridSpec g2 = make_grid(2, 128, 32.0);
    {
        const Wavefunction p = sample_gaussian(g2, 1.0, rng.vec(2, 0.5), rng.vec(2, 0.5));
        double residual = 0.0, cocycle = 0.0;
        for (int i = 0; i < 10; ++i) {
            const GalileiElement x = random_galilei(rng, 2), y = random_galilei(rng, 2), z = random_galilei(rng, 2);
            residual = std::max(residual, multiplier_residual(y, x, p, dyn));
            cocycle = std::max(cocycle, std::abs(galilei_multiplier_phase(z, y, dyn) +
                                                 galilei_multiplier_phase(compose(z, y), x, dyn) -
                                                 galilei_multiplier_phase(y, x, dyn) -
                                                 galilei_multiplier_phase(z, compose(y, x), dyn)));
        }
        add("galilei_multiplier_residual", residual);
        add("galilei_cocycle", cocycle);
    }
    {
        const GridSpec gm = make_grid(1, 512, 48.0);
        const Wavefunction p = sample_gaussian(gm, 1.0, Vec(-3.0, 0, 0), Vec(2.0 * dyn.kappa / dyn.c, 0, 0));
        const MassFit fit = mass_extraction(p, dyn, {0.0, 0.1, 0.2, 0.3, 0.4, 0.5});
        add("mass_extraction_rel", fit.kappa ? std::abs(*fit.kappa / dyn.kappa - 1.0) : 1.0);
        add("heisenberg_verifier", heisenberg_verifier(p, 0.7, dyn));
        add("time_reversal", time_reversal_residual(p, 0.7, dyn));
    }

    // Von Neumann projection.
    {
        const VNProjection proj = make_vn_projection(make_grid(1, 128, 24.0));
        const VNDenseReport rep = vn_dense_checks(proj);
        add("vn_idempotency", rep.idempotency);
        add("vn_symmetry", rep.symmetry);
        add("vn_rank_gap", rep.rank_gap);
        const GridFunction fv = random_trig_function(rng, proj.grid, 3, 8);
        add("vn_compression", compression_error(proj, fv, rng.uniform(-2.0, 2.0)));
    }

    // Circle.
    {
        const CircleGrid cg(64);
        double worst = 0.0;
        const auto spec = circle_k_spectrum(cg);
        for (std::size_t i = 0; i < spec.size(); ++i)
            worst = std::max(worst, std::abs(spec[i] - (static_cast<double>(i) - 31.0)));
        add("circle_k_integer", worst);
        const int m = rng.integer(-10, 10);
        const CircleWavefunction b = circle_basis(m, cg);
        add("circle_stationary", std::abs(std::abs(inner(b, circle_evolve(rng.uniform(-5, 5), b, dyn.kappa, dyn.c))) - 1.0));
    }
    return checks;
}

inline const Tolerances& invariant_tolerances() {
    static const Tolerances t{{"fourier_roundtrip", 1e-12}, {"parseval", 1e-12}, {"ccr_residual", 1e-8},
                              {"weyl_phase_law", 1e-10}, {"shift_covariance", 1e-12}, {"gaussian_chi_rel", 1e-8},
                              {"spin_pi_multiplier", 1e-15}, {"spin_cocycle", 0.5}, {"spin_lift_2pi", 1e-10},
                              {"spin_lift_4pi", 1e-10}, {"galilei_multiplier_residual", 1e-8},
                              {"galilei_cocycle", 1e-12}, {"mass_extraction_rel", 1e-6},
                              {"heisenberg_verifier", 1e-8}, {"time_reversal", 1e-10}, {"vn_idempotency", 1e-8},
                              {"vn_symmetry", 1e-10}, {"vn_rank_gap", 1e-6}, {"vn_compression", 1e-6},
                              {"circle_k_integer", 1e-9}, {"circle_stationary", 1e-12}};
    return t;
}

inline int cmd_check_invariants(const RunConfig& cfg) {
    const Tolerances tol = resolve_tolerances(invariant_tolerances(), cfg);
    const GridSpec grid = resolve_grid(cfg, {1, 256, 32.0});
    try {
        (void)sample_gaussian(grid, cfg.lambda);
    } catch (const precondition_error& e) {
        throw config_error(std::string("lambda out of the resolvable range: ") + e.what());
    }
    const std::vector<Check> checks = invariant_suite(cfg, tol, grid);
    write_json_file(cfg, "invariants.json",
                    {{"header", run_header("check-invariants", cfg, grid_json(grid), tol)},
                     {"checks", checks_json(checks)},
                     {"pass", all_pass(checks)}});
    return all_pass(checks) ? exit_pass : exit_failure;
}

inline int cmd_cocycle_table(const RunConfig& cfg) {
    const Tolerances tol = resolve_tolerances({{"multiplier_residual", 1e-8}}, cfg);
    const GridSpec grid = resolve_grid(cfg, {2, 128, 32.0});
    const FreeDynamics dyn = resolve_dynamics(cfg);
    Rng rng(cfg.seed);
    Wavefunction psi(grid);
    try {
        psi = sample_gaussian(grid, cfg.lambda, Vec::Zero(), rng.vec(grid.dim(), 0.5));
    } catch (const precondition_error& e) {
        throw config_error(e.what());
    }
    const int dim = grid.dim();
    auto out = open_output(cfg, "cocycle.csv");
    out << header_line(run_header("cocycle-table", cfg, grid_json(grid), tol));
    std::string cols = "case";
    for (const char* g : {"g1", "g2"}) {
        for (const char* p : {"a", "v"})
            for (int j = 0; j < 3; ++j) cols += std::string(",") + g + "_" + p + std::to_string(j);
        cols += std::string(",") + g + "_t";
        for (int j = 0; j < 9; ++j) cols += std::string(",") + g + "_rot" + std::to_string(j);
    }
    out << cols << ",xi_re,xi_im,residual\n";
    double worst = 0.0;
    for (int row = 0; row < 200; ++row) {
        const GalileiElement g1 = random_galilei(rng, dim), g2 = random_galilei(rng, dim);
        double residual = 0.0;
        try {
            residual = multiplier_residual(g2, g1, psi, dyn);
        } catch (const precondition_error& e) {
            throw config_error(std::string("parameters leave the resolvable band: ") + e.what());
        }
        worst = std::max(worst, residual);
        const cplx xi = galilei_multiplier(g2, g1, dyn);
        std::string line = std::to_string(row);
        for (const GalileiElement* g : {&g1, &g2}) {
            for (int j = 0; j < 3; ++j) line += "," + f(g->a[j]);
            for (int j = 0; j < 3; ++j) line += "," + f(g->v[j]);
            line += "," + f(g->t);
            for (int j = 0; j < 9; ++j) line += "," + f(g->rot(j / 3, j % 3));
        }
        out << line << "," << f(xi.real()) << "," << f(xi.imag()) << "," << f(residual) << "\n";
    }
    return worst <= tol.at("multiplier_residual") ? exit_pass : exit_failure;
}

inline int cmd_spin_demo(const RunConfig& cfg) {
    const Tolerances tol = resolve_tolerances({{"spin", 1e-8}}, cfg);
    // Rotations about axis 3 act on the (q1, q2) plane, so a 2D grid carries the spatial part.
    const GridSpec grid = resolve_grid(cfg, {2, 64, 16.0});
    if (grid.dim() < 2) throw config_error("spin-demo needs grid-dim 2 or 3");
    auto out = open_output(cfg, "spin.csv");
    out << header_line(run_header("spin-demo", cfg, grid_json(grid), tol));
    out << "quantity,value_re,value_im,expected_re,expected_im,abs_error\n";
    bool pass = true;
    auto row = [&](const std::string& name, cplx value, cplx expected) {
        const double err = std::abs(value - expected);
        pass = pass && err <= tol.at("spin");
        out << csv_row({name, f(value.real()), f(value.imag()), f(expected.real()), f(expected.imag()), f(err)});
    };
    // Half turns lift to i sigma_j under the tie-break, and (e^{-i pi/4 sigma3})^2 = -i sigma3,
    // so both products below land on the other sheet.
    const Mat l3pi = axis_rotation(2, pi);
    row("xi(L3(pi);L3(pi))", double(multiplier(l3pi, l3pi)), -1.0);
    row("xi(L3(pi/2);L3(pi/2))", double(multiplier(axis_rotation(2, pi / 2), axis_rotation(2, pi / 2))), -1.0);
    row("xi(L1(pi);L2(pi))", double(multiplier(axis_rotation(0, pi), axis_rotation(1, pi))), -1.0);
    row("xi(L3(pi);L3(3pi/2))", double(multiplier(l3pi, axis_rotation(2, 1.5 * pi))), -1.0);
    const Mat2c lift2 = lift_path(winding_path(Vec::UnitZ(), two_pi, 16));
    const Mat2c lift4 = lift_path(winding_path(Vec::UnitZ(), 2 * two_pi, 32));
    row("lift(2pi winding) trace/2", 0.5 * lift2.trace(), -1.0);
    row("lift(4pi winding) trace/2", 0.5 * lift4.trace(), 1.0);

    // Spinor correlation phases: isotropic spatial part, spin-up/down amplitudes c0, c1.
    const GridFunction g = sample(grid, [](const Vec& q) { return cplx(std::exp(-0.5 * q.squaredNorm())); });
    const Wavefunction base = normalize(g);
    const cplx c0(0.6, 0.0), c1(0.0, 0.8);
    const SpinorField field = make_spinor(c0 * base, c1 * base);
    const GridFunction fw = sample(grid, [](const Vec& q) { return cplx(1.0 + std::exp(-0.25 * q.squaredNorm())); });
    const cplx x00 = inner(field.up, multiply(fw, field.up));
    const cplx x11 = inner(field.down, multiply(fw, field.down));
    for (const auto& [alpha, beta] : std::vector<std::pair<double, double>>{{0.3, 0.0}, {1.1, -0.4}, {pi, 0.0}, {two_pi, 0.0}}) {
        const Mat2c u = su2_exp(Vec::UnitZ(), alpha), w = su2_exp(Vec::UnitZ(), beta);
        const cplx value = spinor_correlation_lifted(fw, Vec::Zero(), u, Vec::Zero(), w, field);
        const cplx expected = std::exp(0.5 * I * (alpha - beta)) * x00 + std::exp(-0.5 * I * (alpha - beta)) * x11;
        row("F(f;(0 " + f(alpha) + ");(0 " + f(beta) + "))", value, expected);
    }
    return pass ? exit_pass : exit_failure;
}

inline int cmd_vn_check(const RunConfig& cfg) {
    const Tolerances tol = resolve_tolerances(
        {{"vn_idempotency", 1e-8}, {"vn_symmetry", 1e-10}, {"vn_rank_gap", 1e-6}, {"vn_weyl", 1e-8}, {"vn_compression", 1e-6}},
        cfg);
    if (cfg.grid_dim && *cfg.grid_dim != 1) throw config_error("vn-check runs on 1D grids only");
    const GridSpec grid = resolve_grid(cfg, {1, 128, 24.0});
    if (grid.points_per_axis() > 256) throw config_error("vn-check builds dense matrices; grid-n must be <= 256");
    VNProjection proj = [&] {
        try {
            return make_vn_projection(grid, std::min(12.0, 0.5 * grid.box_length()));
        } catch (const precondition_error& e) {
            throw config_error(e.what());
        }
    }();
    const VNDenseReport rep = vn_dense_checks(proj);
    Rng rng(cfg.seed);
    Json compression = Json::array();
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        const GridFunction fr = random_trig_function(rng, grid, 3, 8);
        const double a = rng.uniform(-2.0, 2.0);
        const double err = compression_error(proj, fr, a);
        worst = std::max(worst, err);
        compression.push_back({{"a", a}, {"error", number(err)}});
    }
    const std::vector<Check> checks{{"vn_idempotency", rep.idempotency, tol.at("vn_idempotency")},
                                    {"vn_symmetry", rep.symmetry, tol.at("vn_symmetry")},
                                    {"vn_rank_gap", rep.rank_gap, tol.at("vn_rank_gap")},
                                    {"vn_weyl", rep.weyl_agreement, tol.at("vn_weyl")},
                                    {"vn_compression", worst, tol.at("vn_compression")}};
    write_json_file(cfg, "vn_check.json",
                    {{"header", run_header("vn-check", cfg, grid_json(grid), tol)},
                     {"idempotency", number(rep.idempotency)},
                     {"symmetry", number(rep.symmetry)},
                     {"rank_gap", number(rep.rank_gap)},
                     {"weyl_agreement", number(rep.weyl_agreement)},
                     {"truncation_bound", vn_truncation_bound(proj)},
                     {"compression", compression},
                     {"checks", checks_json(checks)},
                     {"pass", all_pass(checks)}});
    return all_pass(checks) ? exit_pass : exit_failure;
}

inline int cmd_circle_spectrum(const RunConfig& cfg) {
    const Tolerances tol = resolve_tolerances({{"circle_integer", 1e-9}, {"circle_omega", 1e-9}}, cfg);
    const FreeDynamics dyn = resolve_dynamics(cfg);
    const int n = cfg.grid_n.value_or(64);
    if (n < 4 || (n & (n - 1)) != 0 || n > 4096) throw config_error("circle-spectrum: grid-n must be a power of two in [4, 4096]");
    const CircleGrid grid(n);
    Json resolved = {{"grid_n", n}};
    auto out = open_output(cfg, "circle_spectrum.csv");
    out << header_line(run_header("circle-spectrum", cfg, resolved, tol)) << "n,k_eigenvalue,omega_eigenvalue\n";
    double k_err = 0.0, om_err = 0.0;
    for (const auto& r : circle_spectrum(grid, dyn.kappa, dyn.c)) {
        k_err = std::max(k_err, std::abs(r.k_eigenvalue - r.n));
        om_err = std::max(om_err, std::abs(r.omega_eigenvalue - circle_omega_eigenvalue(r.n, dyn.kappa, dyn.c)) /
                                      std::max(1.0, std::abs(circle_omega_eigenvalue(r.n, dyn.kappa, dyn.c))));
        out << std::to_string(r.n) << "," << f(r.k_eigenvalue) << "," << f(r.omega_eigenvalue) << "\n";
    }
    return k_err <= tol.at("circle_integer") && om_err <= tol.at("circle_omega") ? exit_pass : exit_failure;
}

inline int cmd_export_wavefunction(const RunConfig& cfg) {
    const GridSpec grid = resolve_grid(cfg, {1, 512, 40.0});
    Wavefunction psi(grid);
    try {
        psi = sample_gaussian(grid, cfg.lambda);
    } catch (const precondition_error& e) {
        throw config_error(e.what());
    }
    auto out = open_output(cfg, "wavefunction.txt");
    const Json header = run_header("export-wavefunction", cfg, grid_json(grid), {});
    write_wavefunction(out, psi, {{"seed", header["seed"]}, {"config", header["config"]}});
    return exit_pass;
}

inline int cmd_inspect_wavefunction(const RunConfig& cfg) {
    const Tolerances tol = resolve_tolerances({{"norm", 1e-10}}, cfg);
    if (cfg.input.empty()) throw config_error("inspect-wavefunction needs --in FILE");
    std::ifstream in(cfg.input);
    if (!in) throw config_error("cannot open " + cfg.input);
    LoadedWavefunction loaded = [&] {
        try {
            return read_wavefunction(in);
        } catch (const precondition_error& e) {
            throw config_error(e.what());
        }
    }();
    const Wavefunction& psi = loaded.psi;
    const double nrm = norm(psi);
    Json pos = Json::array(), kv = Json::array();
    if (nrm > 0.0) {
        const Vec qm = mean_position(normalize(psi)), km = mean_wavevector(normalize(psi));
        for (int j = 0; j < psi.grid().dim(); ++j) {
            pos.push_back(qm[j]);
            kv.push_back(km[j]);
        }
    }
    const std::vector<Check> checks{{"norm", std::abs(nrm - 1.0), tol.at("norm")}};
    write_json_file(cfg, "inspect.json",
                    {{"header", run_header("inspect-wavefunction", cfg, grid_json(psi.grid()), tol)},
                     {"input_header", loaded.header},
                     {"norm", nrm},
                     {"mean_position", pos},
                     {"mean_wavevector", kv},
                     {"outer_shell_fraction", number(outer_shell_fraction(forward(psi)))},
                     {"checks", checks_json(checks)},
                     {"pass", all_pass(checks)}});
    return all_pass(checks) ? exit_pass : exit_failure;
}

struct CommandEntry {
    const char* name;
    const char* help;
    std::function<int(const RunConfig&)> run;
};

inline const std::vector<CommandEntry>& commands() {
    static const std::vector<CommandEntry> table{
        {"demo-gaussian", "characteristic and Wigner tables of a Gaussian with closed-form errors", cmd_demo_gaussian},
        {"check-invariants", "run every module's property suite and report measured values", cmd_check_invariants},
        {"cocycle-table", "200 random Galilei pairs with the multiplier and its operator residual", cmd_cocycle_table},
        {"spin-demo", "SU(2) multipliers, path lifts and spinor correlation phases", cmd_spin_demo},
        {"vn-check", "dense checks of the Gaussian-smeared projection", cmd_vn_check},
        {"circle-spectrum", "K and Omega eigenvalues on the circle", cmd_circle_spectrum},
        {"export-wavefunction", "write a sampled Gaussian in the wavefunction text format", cmd_export_wavefunction},
        {"inspect-wavefunction", "read a wavefunction file and report its moments", cmd_inspect_wavefunction},
    };
    return table;
}

/// Runs a command, mapping configuration and precondition errors to exit code 2.
inline int run_command(const std::string& name, const RunConfig& cfg, std::ostream& err) {
    for (const auto& c : commands()) {
        if (name != c.name) continue;
        try {
            return c.run(cfg);
        } catch (const config_error& e) {
            err << "qcov " << name << ": configuration error: " << e.what() << "\n";
            return exit_config;
        } catch (const precondition_error& e) {
            err << "qcov " << name << ": precondition violated: " << e.what() << "\n";
            return exit_config;
        }
    }
    err << "qcov: unknown command " << name << "\n";
    return exit_config;
}

}  // namespace qcov::cli
