#include "commands.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

using namespace qcov;
using namespace qcov::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("qcov_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string cell; std::getline(ss, cell, sep);) out.push_back(cell);
    return out;
}

int run(const std::string& cmd, const RunConfig& cfg) {
    std::ostringstream err;
    return run_command(cmd, cfg, err);
}

RunConfig in_dir(const fs::path& dir) {
    RunConfig cfg;
    cfg.out_dir = dir.string();
    return cfg;
}

}  // namespace

TEST_CASE("wavefunction files roundtrip bit for bit", "[cli][io]") {
    const GridSpec g = make_grid(2, 32, 16.0);
    const Wavefunction psi = sample_gaussian(g, 2.0, Vec(0.3, -0.1, 0), Vec(0.7, 0.2, 0));
    std::stringstream s;
    write_wavefunction(s, psi, {{"seed", 7}});
    const LoadedWavefunction back = read_wavefunction(s);
    CHECK(back.psi.grid() == g);
    CHECK(distance(back.psi, psi) == 0.0);
    CHECK(back.header["seed"] == 7);
    CHECK(back.header["format"] == "qcov-wavefunction");
}

TEST_CASE("malformed wavefunction files are rejected", "[cli][io]") {
    const GridSpec g = make_grid(1, 8, 4.0);
    std::stringstream good;
    write_wavefunction(good, sample(g, [](const Vec&) { return cplx(1.0); }));
    const std::string text = good.str();
    const auto reject = [](const std::string& t) {
        std::istringstream in(t);
        CHECK_THROWS_AS(read_wavefunction(in), precondition_error);
    };
    reject("");
    reject("1 0\n");
    reject("# {not json\n");
    reject("# {\"format\":\"other\"}\n");
    reject(text.substr(0, text.size() - 6));       // truncated
    reject(text + "0.5 0.5\n");                    // trailing data
    std::string bad = text;
    bad.replace(bad.find('\n') + 1, 1, "x");       // malformed first data line
    reject(bad);
}

TEST_CASE("configuration files and tolerance overrides", "[cli][config]") {
    const fs::path dir = scratch("config");
    {
        std::ofstream(dir / "a.json") << R"({"grid-n": 256, "kappa": 2.5, "seed": 11, "tol": {"chi_rel": 1e-3}})";
        RunConfig cfg;
        apply_config_file(cfg, (dir / "a.json").string());
        CHECK(cfg.grid_n == 256);
        CHECK(cfg.kappa == 2.5);
        CHECK(cfg.seed == 11u);
        CHECK(cfg.tol_overrides.at("chi_rel") == 1e-3);
    }
    {
        std::ofstream(dir / "b.cfg") << "# comment\nbox = 30   # trailing\nlambda=1.5\ntol.wigner_abs = 2e-6\n\n";
        RunConfig cfg;
        apply_config_file(cfg, (dir / "b.cfg").string());
        CHECK(cfg.box == 30.0);
        CHECK(cfg.lambda == 1.5);
        CHECK(cfg.tol_overrides.at("wigner_abs") == 2e-6);
        // A flag applied afterwards wins.
        apply_setting(cfg, "lambda", "2");
        CHECK(cfg.lambda == 2.0);
    }
    RunConfig cfg;
    std::ofstream(dir / "c.cfg") << "unknown = 3\n";
    CHECK_THROWS_AS(apply_config_file(cfg, (dir / "c.cfg").string()), config_error);
    std::ofstream(dir / "d.cfg") << "kappa = abc\n";
    CHECK_THROWS_AS(apply_config_file(cfg, (dir / "d.cfg").string()), config_error);
    std::ofstream(dir / "e.json") << "{\"kappa\": ";
    CHECK_THROWS_AS(apply_config_file(cfg, (dir / "e.json").string()), config_error);
    CHECK_THROWS_AS(apply_config_file(cfg, (dir / "missing.cfg").string()), config_error);
    CHECK_THROWS_AS(add_tol_override(cfg, "novalue"), config_error);

    RunConfig over;
    add_tol_override(over, "chi_rel=1e-4");
    CHECK(resolve_tolerances({{"chi_rel", 1e-8}}, over).at("chi_rel") == 1e-4);
    add_tol_override(over, "nonsense=1");
    CHECK_THROWS_AS(resolve_tolerances({{"chi_rel", 1e-8}}, over), config_error);
    RunConfig negative;
    add_tol_override(negative, "chi_rel=-1");
    CHECK_THROWS_AS(resolve_tolerances({{"chi_rel", 1e-8}}, negative), config_error);
}

TEST_CASE("demo-gaussian outputs and exit codes", "[cli]") {
    const fs::path dir = scratch("demo");
    REQUIRE(run("demo-gaussian", in_dir(dir)) == exit_pass);
    const Json report = Json::parse(slurp(dir / "report.json"));
    CHECK(report["max_chi_error"].get<double>() < 1e-8);
    CHECK(report["max_wigner_error"].get<double>() < 1e-6);
    CHECK(report["header"]["seed"] == 20240601u);
    CHECK(report["header"]["version"] == version);
    for (const char* name : {"chi.csv", "wigner.csv"}) {
        const auto lines = lines_of(dir / name);
        REQUIRE(lines.size() > 2);
        REQUIRE(lines[0].rfind("# ", 0) == 0);
        const Json header = Json::parse(lines[0].substr(2));
        CHECK(header["command"] == "demo-gaussian");
        CHECK(header["config"]["grid_n"] == 512);
    }

    RunConfig bad = in_dir(dir);
    bad.lambda = 0.01;
    CHECK(run("demo-gaussian", bad) == exit_config);
    RunConfig strict = in_dir(scratch("demo_strict"));
    strict.tol_overrides["chi_rel"] = 1e-20;
    CHECK(run("demo-gaussian", strict) == exit_failure);
    RunConfig unknown = in_dir(dir);
    unknown.tol_overrides["bogus"] = 1.0;
    CHECK(run("demo-gaussian", unknown) == exit_config);
    CHECK(run("no-such-command", in_dir(dir)) == exit_config);
}

TEST_CASE("check-invariants: pass, forced failure, seed robustness", "[cli][slow]") {
    const auto pass_set = [](const fs::path& p) {
        std::map<std::string, bool> out;
        const Json doc = Json::parse(slurp(p));
        for (const auto& c : doc["checks"]) out[c["name"].get<std::string>()] = c["pass"].get<bool>();
        return out;
    };
    const fs::path a = scratch("inv_a"), b = scratch("inv_b"), strict = scratch("inv_strict");
    REQUIRE(run("check-invariants", in_dir(a)) == exit_pass);
    RunConfig other = in_dir(b);
    other.seed = 977;
    CHECK(run("check-invariants", other) == exit_pass);
    CHECK(pass_set(a / "invariants.json") == pass_set(b / "invariants.json"));
    CHECK(pass_set(a / "invariants.json").size() == invariant_tolerances().size());

    RunConfig tight = in_dir(strict);
    tight.tol_overrides["ccr_residual"] = 1e-20;
    CHECK(run("check-invariants", tight) == exit_failure);
    const auto failed = pass_set(strict / "invariants.json");
    CHECK_FALSE(failed.at("ccr_residual"));
    CHECK(failed.at("parseval"));
}

TEST_CASE("cocycle-table, spin-demo, vn-check and circle-spectrum outputs", "[cli][slow]") {
    const fs::path dir = scratch("tables");
    const RunConfig cfg = in_dir(dir);

    REQUIRE(run("cocycle-table", cfg) == exit_pass);
    const auto cocycle = lines_of(dir / "cocycle.csv");
    REQUIRE(cocycle.size() == 202);
    double worst = 0.0;
    for (std::size_t i = 2; i < cocycle.size(); ++i) worst = std::max(worst, std::stod(split(cocycle[i], ',').back()));
    CHECK(worst < 1e-8);

    REQUIRE(run("spin-demo", cfg) == exit_pass);
    bool found = false;
    for (const auto& line : lines_of(dir / "spin.csv")) {
        const auto cells = split(line, ',');
        if (!cells.empty() && cells[0] == "xi(L3(pi);L3(pi))") {
            found = true;
            CHECK(std::stod(cells[1]) == -1.0);
        }
    }
    CHECK(found);

    REQUIRE(run("vn-check", cfg) == exit_pass);
    const Json vn = Json::parse(slurp(dir / "vn_check.json"));
    CHECK(vn["idempotency"].get<double>() < 1e-8);
    CHECK(vn["compression"].size() == 5);
    RunConfig too_big = cfg;
    too_big.grid_n = 512;
    CHECK(run("vn-check", too_big) == exit_config);

    RunConfig circle = cfg;
    circle.grid_n = 64;
    REQUIRE(run("circle-spectrum", circle) == exit_pass);
    const auto rows = lines_of(dir / "circle_spectrum.csv");
    REQUIRE(rows.size() == 65);
    for (std::size_t i = 2; i < rows.size(); ++i) {
        const auto cells = split(rows[i], ',');
        CHECK(std::abs(std::stod(cells[1]) - std::stoi(cells[0])) < 1e-12);
    }
    circle.grid_n = 48;
    CHECK(run("circle-spectrum", circle) == exit_config);
}

TEST_CASE("export and inspect a wavefunction", "[cli]") {
    const fs::path dir = scratch("export");
    RunConfig cfg = in_dir(dir);
    cfg.grid_n = 256;
    cfg.box = 32.0;
    REQUIRE(run("export-wavefunction", cfg) == exit_pass);
    std::ifstream in(dir / "wavefunction.txt");
    const LoadedWavefunction loaded = read_wavefunction(in);
    CHECK(loaded.psi.grid() == make_grid(1, 256, 32.0));
    CHECK(std::abs(norm(loaded.psi) - 1.0) < 1e-12);

    RunConfig inspect = in_dir(dir);
    inspect.input = (dir / "wavefunction.txt").string();
    REQUIRE(run("inspect-wavefunction", inspect) == exit_pass);
    const Json report = Json::parse(slurp(dir / "inspect.json"));
    CHECK(std::abs(report["norm"].get<double>() - 1.0) < 1e-12);
    CHECK(std::abs(report["mean_position"][0].get<double>()) < 1e-12);

    RunConfig missing = in_dir(dir);
    CHECK(run("inspect-wavefunction", missing) == exit_config);
    missing.input = (dir / "nope.txt").string();
    CHECK(run("inspect-wavefunction", missing) == exit_config);
}

TEST_CASE("reruns are byte-identical, also across output directories", "[cli]") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    for (const char* cmd : {"demo-gaussian", "spin-demo", "circle-spectrum", "export-wavefunction"}) {
        REQUIRE(run(cmd, in_dir(a)) == exit_pass);
        REQUIRE(run(cmd, in_dir(b)) == exit_pass);
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
        ++compared;
    }
    CHECK(compared == 6);
}
