#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

struct Flags {
    std::string config;
    int grid_n = 0;
    int grid_dim = 0;
    double box = 0.0;
    double kappa = 0.0;
    double c = 0.0;
    double lambda = 0.0;
    double d = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::vector<std::string> tol;
    std::string input;
};

struct Options {
    CLI::Option* grid_n;
    CLI::Option* grid_dim;
    CLI::Option* box;
    CLI::Option* kappa;
    CLI::Option* c;
    CLI::Option* lambda;
    CLI::Option* d;
    CLI::Option* seed;
    CLI::Option* out;
};

Options add_common(CLI::App& sub, Flags& fl) {
    sub.add_option("--config", fl.config, "config file (JSON object or key=value lines)");
    Options o{};
    o.grid_n = sub.add_option("--grid-n", fl.grid_n, "points per axis (power of two)");
    o.grid_dim = sub.add_option("--grid-dim", fl.grid_dim, "spatial dimension (1-3)");
    o.box = sub.add_option("--box", fl.box, "box length L");
    o.kappa = sub.add_option("--kappa", fl.kappa, "inverse length scale of the mass");
    o.c = sub.add_option("--c", fl.c, "speed unit");
    o.lambda = sub.add_option("--lambda", fl.lambda, "Gaussian width");
    o.d = sub.add_option("--d", fl.d, "frequency offset");
    o.seed = sub.add_option("--seed", fl.seed, "seed for randomized suites");
    o.out = sub.add_option("--out", fl.out, "output directory (overrides QCOV_OUT_DIR)");
    sub.add_option("--tol-override", fl.tol, "KEY=VAL tolerance override (repeatable)");
    return o;
}

/// defaults < config file < QCOV_OUT_DIR < flags
qcov::cli::RunConfig resolve(const Flags& fl, const Options& o) {
    using namespace qcov::cli;
    RunConfig cfg;
    if (!fl.config.empty()) apply_config_file(cfg, fl.config);
    if (const char* env = std::getenv("QCOV_OUT_DIR"); env && *env) cfg.out_dir = env;
    if (o.grid_n->count()) cfg.grid_n = fl.grid_n;
    if (o.grid_dim->count()) cfg.grid_dim = fl.grid_dim;
    if (o.box->count()) cfg.box = fl.box;
    if (o.kappa->count()) cfg.kappa = fl.kappa;
    if (o.c->count()) cfg.c = fl.c;
    if (o.lambda->count()) cfg.lambda = fl.lambda;
    if (o.d->count()) cfg.d = fl.d;
    if (o.seed->count()) cfg.seed = fl.seed;
    if (o.out->count()) cfg.out_dir = fl.out;
    for (const auto& item : fl.tol) add_tol_override(cfg, item);
    cfg.input = fl.input;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qcov: covariant quantum kinematics on periodic grids"};
    app.require_subcommand(1);
    app.set_version_flag("--version", qcov::version);

    Flags fl;
    std::vector<std::pair<CLI::App*, Options>> subs;
    for (const auto& entry : qcov::cli::commands()) {
        CLI::App* sub = app.add_subcommand(entry.name, entry.help);
        subs.emplace_back(sub, add_common(*sub, fl));
        if (std::string(entry.name) == "inspect-wavefunction")
            sub->add_option("--in", fl.input, "wavefunction file to read")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return qcov::cli::exit_config;
    }

    for (const auto& [sub, opts] : subs) {
        if (!sub->parsed()) continue;
        qcov::cli::RunConfig cfg;
        try {
            cfg = resolve(fl, opts);
        } catch (const qcov::cli::config_error& e) {
            std::cerr << "qcov " << sub->get_name() << ": configuration error: " << e.what() << "\n";
            return qcov::cli::exit_config;
        }
        const int code = qcov::cli::run_command(sub->get_name(), cfg, std::cerr);
        if (code == qcov::cli::exit_pass) std::cout << sub->get_name() << ": pass (" << cfg.out_dir << ")\n";
        else if (code == qcov::cli::exit_failure) std::cout << sub->get_name() << ": invariant failure, see outputs in " << cfg.out_dir << "\n";
        return code;
    }
    return qcov::cli::exit_config;
}
