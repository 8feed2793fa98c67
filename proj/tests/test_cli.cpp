#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sselab/commands.hpp"
#include "sselab/config.hpp"

using namespace sselab;
using doctest::Approx;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("sselab_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kDampedConfig = R"(# thermal damped oscillator experiment
[model]
name = damped
dim = 12
omega = 1.0
A = 1.0
nu = 0.5

[solver]
dt = 1e-3
t_final = 0.5

[ensemble]
seed = 31415
n_traj = 200
record_stride = 100
threads = 4

[checks]
kind = nsse
init = fock:0
observables = N,P0
times = 0.25,0.5
)";

} // namespace

TEST_CASE("config parsing round-trips the fields") {
    const Config cfg = parse_config_text(kDampedConfig);
    CHECK(cfg.model_name == "damped");
    CHECK(cfg.dim == 12);
    CHECK(cfg.nu == Approx(0.5));
    CHECK(cfg.solver.dt == Approx(1e-3));
    CHECK(cfg.solver.seed == 31415);
    CHECK(cfg.solver.n_traj == 200);
    CHECK(cfg.kind == "nsse");
    CHECK(cfg.observables == std::vector<std::string>{"N", "P0"});
    CHECK(cfg.times.size() == 2);
    const ModelSpec m = cfg.build_model_spec();
    CHECK(m.dim() == 12);
    CHECK(m.channel_count() == 2);
}

TEST_CASE("config errors carry line numbers") {
    try {
        parse_config_text("[model]\nname = damped\nbogus_key = 3\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
    }
    try {
        parse_config_text("[model]\ndim = twelve\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    try {
        parse_config_text("dim = 3\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line == 1);
    }
    CHECK_THROWS_AS(parse_config_text("[orbit]\n"), ConfigError);
}

TEST_CASE("complex parameters parse in re+imi form") {
    const Config cfg = parse_config_text(
        "[model]\nname = oscillator\ndim = 10\nalpha1 = 0.5\nalpha2 = 1.2+0.3i\n"
        "alpha3 = -1e-2-4i\n");
    CHECK(cfg.osc.alpha[0] == Complex(0.5, 0.0));
    CHECK(cfg.osc.alpha[1] == Complex(1.2, 0.3));
    CHECK(cfg.osc.alpha[2] == Complex(-1e-2, -4.0));
}

TEST_CASE("unknown model and init are rejected") {
    Config cfg = parse_config_text("[model]\nname = nosuch\n");
    CHECK_THROWS_AS(cfg.build_model_spec(), std::invalid_argument);
    Config cfg2 = parse_config_text(kDampedConfig);
    cfg2.init = "wigner:3";
    CHECK_THROWS_AS(cfg2.initial_state(), std::invalid_argument);
    cfg2.init = "pair:0,2";
    CHECK(cfg2.initial_state().size() == 12);
}

TEST_CASE("simulate writes a deterministic summary") {
    TempDir dir("simulate");
    CommandOptions opt;
    opt.config_path = write_file(dir.path / "cfg.ini", kDampedConfig);

    opt.out_dir = (dir.path / "out1").string();
    CHECK(cmd_simulate(opt) == 0);
    opt.out_dir = (dir.path / "out2").string();
    CHECK(cmd_simulate(opt) == 0);

    const std::string a = slurp(dir.path / "out1" / "summary.json");
    const std::string b = slurp(dir.path / "out2" / "summary.json");
    CHECK(!a.empty());
    CHECK(a == b); // byte identical
    CHECK(a.find("\"max_norm_deviation\"") != std::string::npos);
}

TEST_CASE("per-trajectory CSV uses the documented schema") {
    TempDir dir("csv");
    CommandOptions opt;
    std::string cfg_text = kDampedConfig;
    cfg_text.replace(cfg_text.find("n_traj = 200"), 12, "n_traj = 2  ");
    opt.config_path = write_file(dir.path / "cfg.ini", cfg_text);
    opt.out_dir = (dir.path / "out").string();
    opt.traj_csv = true;
    CHECK(cmd_simulate(opt) == 0);
    const std::string csv = slurp(dir.path / "out" / "traj_00000.csv");
    CHECK(csv.rfind("t,re_0,im_0", 0) == 0);
    CHECK(csv.find(",norm,weight") != std::string::npos);
}

TEST_CASE("doubling the ensemble shrinks standard errors about sqrt(2)") {
    TempDir dir("halving");
    std::string base = kDampedConfig;

    CommandOptions opt;
    opt.config_path = write_file(dir.path / "a.ini", base);
    opt.out_dir = (dir.path / "outa").string();
    CHECK(cmd_simulate(opt) == 0);

    std::string doubled = base;
    doubled.replace(doubled.find("n_traj = 200"), 12, "n_traj = 400");
    opt.config_path = write_file(dir.path / "b.ini", doubled);
    opt.out_dir = (dir.path / "outb").string();
    CHECK(cmd_simulate(opt) == 0);

    auto grab_se = [](const std::string& text) {
        const auto kpos = text.rfind("\"N_stderr\":");
        REQUIRE(kpos != std::string::npos);
        return std::stod(text.substr(kpos + 11));
    };
    const double se_a = grab_se(slurp(dir.path / "outa" / "summary.json"));
    const double se_b = grab_se(slurp(dir.path / "outb" / "summary.json"));
    const double ratio = se_b / se_a;
    CHECK(ratio > 0.7071 * 0.8);
    CHECK(ratio < 0.7071 * 1.2);
}

TEST_CASE("compare passes at fine dt and flags a too-coarse run") {
    TempDir dir("compare");
    const char* fine = R"(
[model]
name = damped
dim = 12
omega = 1.0
A = 1.0
nu = 0.5
[solver]
dt = 1e-3
t_final = 0.5
[ensemble]
seed = 2718
n_traj = 600
threads = 4
[checks]
init = fock:0
times = 0.25,0.5
)";
    CommandOptions opt;
    opt.config_path = write_file(dir.path / "fine.ini", fine);
    opt.out_dir = (dir.path / "out_fine").string();
    CHECK(cmd_compare(opt) == 0);

    // dim large enough that the truncation leak stays inside the master
    // equation trace budget; the coarse Euler step is what must flag
    const char* coarse = R"(
[model]
name = damped
dim = 20
omega = 1.0
A = 1.0
nu = 0.5
[solver]
dt = 0.0625
t_final = 0.5
[ensemble]
seed = 2718
n_traj = 600
threads = 4
[checks]
init = fock:8
times = 0.25,0.5
)";
    opt.config_path = write_file(dir.path / "coarse.ini", coarse);
    opt.out_dir = (dir.path / "out_coarse").string();
    CHECK(cmd_compare(opt) == 2);
}

TEST_CASE("criteria command reports predicates and enforces them") {
    TempDir dir("criteria");
    const char* tp = R"(
[model]
name = two_photon
dim = 64
beta3 = 0.0
alpha4 = 1.0
alpha5 = 0.3
[checks]
p = 4
)";
    CommandOptions opt;
    opt.config_path = write_file(dir.path / "tp.ini", tp);
    opt.out_dir = (dir.path / "out").string();
    opt.enforce = true;
    CHECK(cmd_criteria(opt) == 0);
    const std::string text = slurp(dir.path / "out" / "criteria.json");
    CHECK(text.find("\"well_posed\": true") != std::string::npos);
    CHECK(text.find("\"stationary_measure\": true") != std::string::npos);

    const char* bad = R"(
[model]
name = oscillator
dim = 64
alpha4 = 0.3
alpha5 = 1.0
[checks]
p = 4
)";
    opt.config_path = write_file(dir.path / "bad.ini", bad);
    opt.out_dir = (dir.path / "out_bad").string();
    CHECK(cmd_criteria(opt) == 2);
    const std::string bad_text = slurp(dir.path / "out_bad" / "criteria.json");
    CHECK(bad_text.find("\"well_posed\": false") != std::string::npos);
    CHECK(bad_text.find("\"growth_unbounded\": true") != std::string::npos);
}

TEST_CASE("steady command agrees with the long-run average") {
    TempDir dir("steady");
    const char* cfg = R"(
[model]
name = damped
dim = 24
omega = 1.0
A = 1.0
nu = 0.5
[solver]
dt = 1e-3
t_final = 40.0
[ensemble]
seed = 5
record_stride = 20
[checks]
init = fock:0
burn_in = 10.0
)";
    CommandOptions opt;
    opt.config_path = write_file(dir.path / "cfg.ini", cfg);
    opt.out_dir = (dir.path / "out").string();
    CHECK(cmd_steady(opt) == 0);
    const std::string text = slurp(dir.path / "out" / "steady.json");
    CHECK(text.find("\"kernel_dim\": 1") != std::string::npos);
    CHECK(text.find("\"agreement\": true") != std::string::npos);
}

TEST_CASE("steady command reports non-unique kernels") {
    TempDir dir("steady2");
    const char* cfg = R"(
[model]
name = two_photon
dim = 14
alpha4 = 1.0
alpha5 = 0.0
[solver]
dt = 1e-3
t_final = 1.0
)";
    CommandOptions opt;
    opt.config_path = write_file(dir.path / "cfg.ini", cfg);
    opt.out_dir = (dir.path / "out").string();
    CHECK(cmd_steady(opt) == 0); // reported, not an error
    const std::string text = slurp(dir.path / "out" / "steady.json");
    CHECK(text.find("\"kernel_dim\": 4") != std::string::npos);
    opt.enforce = true;
    CHECK(cmd_steady(opt) == 3);
}
