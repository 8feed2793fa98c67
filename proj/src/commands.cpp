#include "sselab/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sselab/config.hpp"
#include "sselab/criteria.hpp"
#include "sselab/lindblad.hpp"
#include "sselab/nsse.hpp"
#include "sselab/sse_linear.hpp"
#include "sselab/stationary.hpp"

namespace sselab {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json solver_json(const SolverConfig& s) {
    json j;
    j["dt"] = s.dt;
    j["t_final"] = s.t_final;
    j["scheme"] = s.scheme == Scheme::EulerMaruyama ? "euler_maruyama" : "semi_implicit";
    j["seed"] = s.seed;
    j["n_traj"] = s.n_traj;
    j["record_stride"] = s.record_stride;
    j["record_noise"] = s.record_noise;
    j["renormalize"] = s.renormalize;
    j["threads"] = s.threads;
    return j;
}

// resolved configuration: reproduces the run exactly
json config_json(const Config& c) {
    json j;
    json model;
    model["name"] = c.model_name;
    model["dim"] = c.dim;
    if (c.model_name == "damped") {
        model["omega"] = c.omega;
        model["A"] = c.A;
        model["nu"] = c.nu;
    } else if (c.model_name == "two_photon") {
        model["beta3"] = c.beta3;
        model["alpha4"] = c.alpha4;
        model["alpha5"] = c.alpha5;
    } else if (c.model_name == "measurement") {
        model["kappa"] = c.meas.kappa;
        model["sigma"] = c.meas.sigma;
        model["h_alpha"] = c.meas.h_alpha;
        model["h_beta"] = c.meas.h_beta;
    } else {
        model["beta1"] = c.osc.beta1;
        model["beta2"] = c.osc.beta2;
        model["beta3"] = c.osc.beta3;
        for (int k = 0; k < 6; ++k) {
            model["alpha" + std::to_string(k + 1) + "_re"] = c.osc.alpha[k].real();
            model["alpha" + std::to_string(k + 1) + "_im"] = c.osc.alpha[k].imag();
        }
    }
    j["model"] = model;
    j["solver"] = solver_json(c.solver);
    json checks;
    checks["kind"] = c.kind;
    checks["init"] = c.init;
    checks["observables"] = c.observables;
    checks["times"] = c.times;
    checks["enforce"] = c.enforce;
    checks["p"] = c.p;
    checks["burn_in"] = c.burn_in;
    j["checks"] = checks;
    return j;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void write_trajectory_csv(const fs::path& path, const Trajectory& tr) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const int dim = static_cast<int>(tr.states.front().size());
    out << "t";
    for (int q = 0; q < dim; ++q) out << ",re_" << q << ",im_" << q;
    out << ",norm,weight\n";
    for (std::size_t j = 0; j < tr.times.size(); ++j) {
        out << fmt17(tr.times[j]);
        for (int q = 0; q < dim; ++q)
            out << "," << fmt17(tr.states[j](q).real()) << ","
                << fmt17(tr.states[j](q).imag());
        out << "," << fmt17(std::sqrt(tr.sq_norm[j])) << "," << fmt17(tr.weight) << "\n";
    }
}

// reference master-equation solve; halves dt until the trace check passes
Density reference_density(const Density& rho0, const ModelSpec& m, double t) {
    double dt = stable_ode_dt(m);
    for (int attempt = 0; attempt < 5; ++attempt) {
        try {
            return evolve_density(rho0, m, t, dt);
        } catch (const IntegrationFailure&) {
            dt *= 0.5;
        }
    }
    return evolve_density(rho0, m, t, dt);
}

std::vector<double> pick_times(const Config& cfg, const std::vector<Trajectory>& ens) {
    if (!cfg.times.empty()) return cfg.times;
    return ens.front().times;
}

struct MeanStderr {
    double mean = 0.0;
    double se = 0.0;
};

MeanStderr ensemble_stat(const std::vector<Trajectory>& ens, const StateFunctional& f,
                         std::size_t j) {
    MeanStderr out;
    const double n = static_cast<double>(ens.size());
    for (const auto& tr : ens) out.mean += f(tr.states[j]);
    out.mean /= n;
    if (ens.size() > 1) {
        double var = 0.0;
        for (const auto& tr : ens) {
            const double d = f(tr.states[j]) - out.mean;
            var += d * d;
        }
        out.se = std::sqrt(var / (n * (n - 1.0)));
    }
    return out;
}

int stride_for_times(const Config& cfg) {
    // ensure requested times land on the recorded grid
    if (cfg.times.empty()) return cfg.solver.record_stride;
    long stride = cfg.solver.record_stride;
    const double dt = cfg.solver.dt;
    for (double t : cfg.times) {
        const long step = std::lround(t / dt);
        if (std::abs(step * dt - t) > 1e-9)
            throw std::invalid_argument("requested time " + std::to_string(t) +
                                        " is not a multiple of dt");
        while (stride > 1 && step % stride != 0) --stride;
    }
    return static_cast<int>(stride);
}

} // namespace

int cmd_simulate(const CommandOptions& opt) {
    Config cfg = parse_config_file(opt.config_path);
    const bool enforce = opt.enforce || cfg.enforce;
    ModelSpec m = cfg.build_model_spec();
    State x0 = cfg.initial_state();

    SolverConfig solver = cfg.solver;
    solver.record_stride = stride_for_times(cfg);

    std::vector<Trajectory> ens;
    double target_sq_norm = x0.squaredNorm();
    if (cfg.kind == "nsse") {
        ens = run_ensemble_nsse(m, x0, solver);
    } else {
        State xi = x0;
        ens = run_ensemble_linear(m, xi, solver);
        if (cfg.kind == "weighted")
            for (auto& tr : ens) tr = normalize_and_weight(tr);
    }

    fs::create_directories(opt.out_dir);
    json out;
    out["command"] = "simulate";
    out["config"] = config_json(cfg);

    const auto times = pick_times(cfg, ens);
    json table = json::array();
    int flags = 0;
    for (double t : times) {
        const int j = ens.front().record_index(t);
        if (j < 0) continue;
        json row;
        row["t"] = t;
        for (const auto& obs : cfg.observables) {
            auto f = make_observable(obs, cfg.dim);
            if (cfg.kind == "weighted") {
                const auto est = weighted_expectation(ens, f, t);
                row[obs] = est.value;
                row[obs + "_stderr"] = est.stderr_;
            } else {
                const auto st = ensemble_stat(ens, f, static_cast<std::size_t>(j));
                row[obs] = st.mean;
                row[obs + "_stderr"] = st.se;
            }
        }
        table.push_back(row);
    }
    out["observables"] = table;

    if (cfg.kind == "linear") {
        const auto rep = second_moment_report(ens, target_sq_norm);
        json mart;
        mart["target"] = rep.target;
        mart["drift_slack_coeff"] = rep.drift_slack_coeff;
        mart["degenerate_stats"] = rep.degenerate_stats;
        mart["flag_count"] = rep.flag_count();
        json rows = json::array();
        for (std::size_t j = 0; j < rep.times.size(); ++j) {
            json r;
            r["t"] = rep.times[j];
            r["mean_sq_norm"] = rep.mean_sq_norm[j];
            r["stderr"] = rep.degenerate_stats ? 0.0 : rep.stderr_sq_norm[j];
            r["flagged"] = static_cast<bool>(rep.flagged[j]);
            rows.push_back(r);
        }
        mart["rows"] = rows;
        out["second_moment"] = mart;
        flags += rep.flag_count();
    } else {
        double worst = 0.0;
        for (const auto& tr : ens)
            for (double sq : tr.sq_norm) worst = std::max(worst, std::abs(std::sqrt(sq) - 1.0));
        out["max_norm_deviation"] = worst;
        if (cfg.kind == "nsse" && solver.renormalize && worst > 1e-12) ++flags;
    }

    // mean terminal weight diagnostics for weighted runs
    if (cfg.kind == "weighted") {
        double wmean = 0.0;
        for (const auto& tr : ens) wmean += tr.weight;
        out["mean_weight"] = wmean / static_cast<double>(ens.size());
    }

    out["flag_count"] = flags;
    write_json(fs::path(opt.out_dir) / "summary.json", out);

    if (opt.traj_csv) {
        for (std::size_t i = 0; i < ens.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "traj_%05zu.csv", i);
            write_trajectory_csv(fs::path(opt.out_dir) / name, ens[i]);
        }
    }
    return (enforce && flags > 0) ? 2 : 0;
}

int cmd_compare(const CommandOptions& opt) {
    Config cfg = parse_config_file(opt.config_path);
    ModelSpec m = cfg.build_model_spec();
    State x0 = cfg.initial_state();

    SolverConfig solver = cfg.solver;
    if (cfg.times.empty()) cfg.times = {0.25 * solver.t_final, 0.5 * solver.t_final, solver.t_final};
    solver.record_stride = stride_for_times(cfg);
    if (cfg.observables.size() == 1 && cfg.observables[0] == "N")
        cfg.observables = {"N", "Q", "P0"};

    auto direct = run_ensemble_nsse(m, x0, solver);
    auto linear = run_ensemble_linear(m, x0, solver);
    for (auto& tr : linear) tr = normalize_and_weight(tr);

    const double dt = solver.dt;
    const double slack = 5.0 * dt;

    fs::create_directories(opt.out_dir);
    json out;
    out["command"] = "compare";
    out["config"] = config_json(cfg);

    int flags = 0;
    json table = json::array();
    for (double t : cfg.times) {
        const int j = direct.front().record_index(t);
        if (j < 0) continue;
        // Lindblad reference at t
        Density rho0 = x0 * x0.adjoint();
        const Density rho_t = reference_density(rho0, m, t);
        for (const auto& obs : cfg.observables) {
            auto f = make_observable(obs, cfg.dim);
            const auto d = ensemble_stat(direct, f, static_cast<std::size_t>(j));
            const auto w = weighted_expectation(linear, f, t);
            json row;
            row["t"] = t;
            row["observable"] = obs;
            row["direct"] = d.mean;
            row["direct_stderr"] = d.se;
            row["weighted"] = w.value;
            row["weighted_stderr"] = w.stderr_;
            const double comb = std::sqrt(d.se * d.se + w.stderr_ * w.stderr_);
            const bool ok_pair = std::abs(d.mean - w.value) <= 3.0 * comb + slack;
            row["estimators_agree"] = ok_pair;

            double ref = 0.0;
            if (obs == "P0") ref = rho_t(0, 0).real();
            else if (obs == "N") ref = (ladder_ops(cfg.dim).number.dense() * rho_t).trace().real();
            else if (obs == "N2") ref = (number_power(cfg.dim, 2).dense() * rho_t).trace().real();
            else if (obs == "Q") ref = (quadratures(cfg.dim).q.dense() * rho_t).trace().real();
            else if (obs == "P") ref = (quadratures(cfg.dim).p.dense() * rho_t).trace().real();
            row["lindblad"] = ref;
            const bool ok_ref = std::abs(d.mean - ref) <= 3.0 * d.se + slack;
            row["direct_matches_lindblad"] = ok_ref;
            if (!ok_pair) ++flags;
            if (!ok_ref) ++flags;
            table.push_back(row);
        }
    }
    out["observable_table"] = table;

    // density comparison at the final requested time
    const double t_last = cfg.times.back();
    Density rho0 = x0 * x0.adjoint();
    const Density rho_ref = reference_density(rho0, m, t_last);
    const auto cmp_direct = compare_mc_density(direct, t_last, rho_ref);
    const auto cmp_weighted = compare_mc_density(linear, t_last, rho_ref);
    json dens;
    dens["t"] = t_last;
    dens["direct_trace_distance"] = cmp_direct.trace_dist;
    dens["direct_aggregate_sigma"] = cmp_direct.aggregate_sigma;
    dens["weighted_trace_distance"] = cmp_weighted.trace_dist;
    dens["weighted_aggregate_sigma"] = cmp_weighted.aggregate_sigma;
    const bool ok_direct = cmp_direct.trace_dist <= 3.0 * cmp_direct.aggregate_sigma + slack;
    const bool ok_weighted = cmp_weighted.trace_dist <= 3.0 * cmp_weighted.aggregate_sigma + slack;
    dens["direct_within_tolerance"] = ok_direct;
    dens["weighted_within_tolerance"] = ok_weighted;
    if (!ok_direct) ++flags;
    if (!ok_weighted) ++flags;
    out["density"] = dens;

    out["flag_count"] = flags;
    write_json(fs::path(opt.out_dir) / "comparison.json", out);
    return flags > 0 ? 2 : 0;
}

int cmd_criteria(const CommandOptions& opt) {
    Config cfg = parse_config_file(opt.config_path);
    const bool enforce = opt.enforce || cfg.enforce;
    if (cfg.p < 4)
        throw std::invalid_argument("criteria: p must be >= 4");

    ModelSpec m = cfg.build_model_spec();
    OscillatorParams params = cfg.osc;
    if (cfg.model_name == "damped") {
        params = OscillatorParams{};
        params.beta2 = cfg.omega;
        params.alpha[0] = Complex(std::sqrt(cfg.A * (cfg.nu + 1.0)), 0.0);
        params.alpha[1] = Complex(std::sqrt(cfg.A * cfg.nu), 0.0);
    } else if (cfg.model_name == "two_photon") {
        params = OscillatorParams{};
        params.beta3 = cfg.beta3;
        params.alpha[3] = Complex(cfg.alpha4, 0.0);
        params.alpha[4] = Complex(cfg.alpha5, 0.0);
    } else if (cfg.model_name == "measurement") {
        throw std::invalid_argument("criteria: predicates are defined for the oscillator family");
    }

    const int maxdeg = std::max(m.max_ladder_degree(), 2);
    const int top = m.dim() - 1 - maxdeg;
    const int hi = std::min(top, 200);
    const int lo = std::max(1, hi / 8);
    CriteriaReport rep = build_criteria_report(m, params, cfg.p, lo, hi);

    fs::create_directories(opt.out_dir);
    json out;
    out["command"] = "criteria";
    out["config"] = config_json(cfg);
    out["p"] = rep.p;
    out["predicates"] = rep.predicates;
    out["growth_unbounded"] = rep.growth_unbounded;
    if (!rep.growth_unbounded) {
        out["alpha"] = rep.alpha;
        out["beta"] = rep.beta;
    }
    out["lyapunov_found"] = rep.lyapunov_found;
    if (rep.lyapunov_found) {
        out["lyapunov_alpha"] = rep.lyapunov.alpha;
        out["lyapunov_beta"] = rep.lyapunov.beta;
    }
    out["cj_level_lo"] = rep.level_lo;
    out["cj"] = rep.cj;
    out["leading_slope_raw"] = rep.leading_slope_raw;
    out["leading_slope_limit"] = rep.leading_slope_limit;
    write_json(fs::path(opt.out_dir) / "criteria.json", out);

    if (enforce) {
        for (const auto& [name, value] : rep.predicates)
            if (!value) return 2;
    }
    return 0;
}

int cmd_steady(const CommandOptions& opt) {
    Config cfg = parse_config_file(opt.config_path);
    const bool enforce = opt.enforce || cfg.enforce;
    ModelSpec m = cfg.build_model_spec();

    fs::create_directories(opt.out_dir);
    json out;
    out["command"] = "steady";
    out["config"] = config_json(cfg);

    const auto kernel = steady_state_kernel(m);
    out["kernel_dim"] = kernel.kernel_dim;
    json sv = json::array();
    for (int i = 0; i < kernel.singular_values.size(); ++i)
        sv.push_back(kernel.singular_values(i));
    out["smallest_singular_values"] = sv;

    int flags = 0;
    if (kernel.kernel_dim == 1) {
        const Density& rho = kernel.state;
        json diag = json::array();
        for (int q = 0; q < rho.rows(); ++q) diag.push_back(rho(q, q).real());
        out["steady_diag"] = diag;
        const double n_mean =
            (ladder_ops(cfg.dim).number.dense() * rho).trace().real();
        out["steady_mean_N"] = n_mean;

        // long-trajectory time average of <N>
        State x0 = cfg.initial_state();
        SolverConfig solver = cfg.solver;
        auto stream = GaussianStream(solver.seed, kStreamNonlinear, 0);
        const auto traj = simulate_nsse(m, x0, solver, stream, 0);
        const double burn = cfg.burn_in >= 0.0 ? cfg.burn_in : default_burn_in(m);
        const auto avg = time_average(traj, make_observable("N", cfg.dim), burn);
        out["time_average_N"] = avg.final_value;
        out["time_average_stderr"] = avg.batch_stderr;
        out["time_average_checkpoints"] = avg.running_values;
        const bool agree = std::abs(avg.final_value - n_mean) <= 3.0 * avg.batch_stderr;
        out["agreement"] = agree;
        if (!agree) ++flags;
    } else {
        json basis = json::array();
        for (const auto& b : kernel.basis) {
            json diag = json::array();
            for (int q = 0; q < b.rows(); ++q) diag.push_back(b(q, q).real());
            basis.push_back(diag);
        }
        out["kernel_basis_diagonals"] = basis;
    }

    out["flag_count"] = flags;
    write_json(fs::path(opt.out_dir) / "steady.json", out);

    if (kernel.kernel_dim != 1 && enforce) return 3;
    return (enforce && flags > 0) ? 2 : 0;
}

} // namespace sselab
