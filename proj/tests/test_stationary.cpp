#include <doctest.h>

#include <cmath>

#include "sselab/criteria.hpp"
#include "sselab/lindblad.hpp"
#include "sselab/nsse.hpp"
#include "sselab/stationary.hpp"

using namespace sselab;
using doctest::Approx;

TEST_CASE("time average of a constant trajectory is exact") {
    const int dim = 6;
    const ModelSpec m = build_model(dim, FockOperator::zero(dim), {});
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_final = 1.0;
    GaussianStream stream(0, kStreamNonlinear, 0);
    const Trajectory tr = simulate_nsse(m, basis_state(dim, 3), cfg, stream);
    const auto n_op = ladder_ops(dim).number;
    const auto avg = time_average(
        tr, [&](const State& x) { return expect_real(n_op, x); }, 0.2);
    CHECK(avg.final_value == Approx(3.0).epsilon(1e-13));
    for (double v : avg.running_values) CHECK(v == Approx(3.0).epsilon(1e-13));
    CHECK(avg.batch_stderr < 1e-13);
    CHECK_THROWS_AS(
        time_average(tr, [](const State&) { return 1.0; }, 2.0), std::invalid_argument);
}

TEST_CASE("long-run occupation average matches the stationary state") {
    // dim large enough that the thermal tail is negligible and the vectorized
    // generator has a detectable one-dimensional kernel
    const ModelSpec m = preset_damped(1.0, 1.0, 0.5, 24);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 50.0;
    cfg.seed = 7;
    cfg.record_stride = 10;
    GaussianStream stream(cfg.seed, kStreamNonlinear, 0);
    const Trajectory tr = simulate_nsse(m, basis_state(24, 0), cfg, stream);
    const auto n_op = ladder_ops(24).number;
    const auto avg = time_average(
        tr, [&](const State& x) { return expect_real(n_op, x); }, 10.0);
    const double ref = (n_op.dense() * steady_state(m)).trace().real();
    CHECK(ref == Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(avg.final_value - ref) <= 3.0 * avg.batch_stderr);

    // consecutive checkpoint values settle (Cauchy evidence)
    const auto& rv = avg.running_values;
    const double tail_gap = std::abs(rv[rv.size() - 1] - rv[rv.size() - 2]);
    CHECK(tail_gap <= 8.0 * avg.batch_stderr);
}

TEST_CASE("burn-in default scales like ten relaxation times") {
    const ModelSpec m = preset_damped(1.0, 1.0, 0.5, 12);
    CHECK(default_burn_in(m) == Approx(10.0).epsilon(0.01));
    const int dim = 6;
    CHECK(default_burn_in(build_model(dim, FockOperator::zero(dim), {})) == 0.0);
}

TEST_CASE("lyapunov diagnostic: zero D trivially satisfied") {
    const int dim = 8;
    const ModelSpec m = build_model(dim, ladder_ops(dim).number, {});
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_final = 0.5;
    cfg.n_traj = 4;
    const auto ens = run_ensemble_nsse(m, basis_state(dim, 2), cfg);
    const auto rep = lyapunov_diagnostic(ens, FockOperator::zero(dim),
                                         ladder_ops(dim).number, 0.0);
    CHECK(rep.flag_count() == 0);
    CHECK(rep.lhs_mean.back() == 0.0);
    CHECK(rep.k_hat == 0.0);
}

TEST_CASE("certified Lyapunov pair passes on the damped oscillator") {
    const ModelSpec m = preset_damped(1.0, 1.0, 0.5, 12);
    const auto c_op = ladder_ops(12).number;
    const auto pair = estimate_lyapunov_pair(c_op, m);
    REQUIRE(pair.alpha > 0.0);

    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    cfg.seed = 21;
    cfg.n_traj = 200;
    cfg.record_stride = 50;
    cfg.threads = 4;
    const auto ens = run_ensemble_nsse(m, basis_state(12, 0), cfg);
    const FockOperator d_op = Complex(std::sqrt(pair.alpha), 0.0) * c_op;
    const auto rep = lyapunov_diagnostic(ens, d_op, c_op, pair.beta);
    CHECK(rep.flag_count() == 0);
    CHECK(rep.k_hat >= 0.0);
}

TEST_CASE("driven model with beta = 0 must flag") {
    OscillatorParams p;
    p.beta1 = 1.5; // forcing
    p.alpha = {Complex(0.7, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0),
               Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0)};
    const ModelSpec m = preset_oscillator(p, 12);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    cfg.seed = 3;
    cfg.n_traj = 100;
    cfg.record_stride = 100;
    cfg.threads = 4;
    const auto ens = run_ensemble_nsse(m, basis_state(12, 0), cfg);
    const auto n_op = ladder_ops(12).number;
    const auto rep = lyapunov_diagnostic(ens, n_op, n_op, 0.0);
    CHECK(rep.flag_count() > 0);
}

TEST_CASE("empirical measure summary: unit-sphere support and occupation") {
    const ModelSpec m = preset_damped(1.0, 1.0, 0.5, 12);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 30.0;
    cfg.seed = 15;
    cfg.n_traj = 4;
    cfg.record_stride = 20;
    cfg.threads = 4;
    const auto ens = run_ensemble_nsse(m, basis_state(12, 0), cfg);

    const auto n_op = ladder_ops(12).number;
    ObservableBattery battery{
        {"norm", [](const State& x) { return x.norm(); }},
        {"N", [&](const State& x) { return expect_real(n_op, x); }},
    };
    const auto rows = empirical_measure_summary(ens, battery, 10.0);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mean == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(rows[1].mean - 0.5) <= 4.0 * rows[1].batch_stderr);

    CHECK_THROWS_AS(empirical_measure_summary(ens, {}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(empirical_measure_summary(ens, battery, 40.0), std::invalid_argument);
}

TEST_CASE("two-photon regime: moment column stays bounded across windows") {
    const ModelSpec m = preset_two_photon(0.0, 1.0, 0.3, 16);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 30.0;
    cfg.seed = 9;
    cfg.n_traj = 4;
    cfg.record_stride = 20;
    cfg.threads = 4;
    const State x0 = (basis_state(16, 0) + basis_state(16, 1)).normalized();
    const auto ens = run_ensemble_nsse(m, x0, cfg);
    const FockOperator n4 = number_power(16, 4);
    ObservableBattery battery{
        {"N4sq", [&](const State& x) { return n4.apply(x).squaredNorm(); }},
    };
    const auto rows = empirical_measure_summary(ens, battery, 6.0, 3);
    REQUIRE(rows.size() == 1);
    const auto& w = rows[0].window_means;
    REQUIRE(w.size() == 3);
    const double lo = *std::min_element(w.begin(), w.end());
    const double hi = *std::max_element(w.begin(), w.end());
    CHECK(hi <= 4.0 * (lo + 1.0)); // bounded, no runaway growth
}
