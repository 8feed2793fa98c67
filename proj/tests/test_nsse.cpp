#include <doctest.h>

#include <cmath>

#include "sselab/nsse.hpp"
#include "sselab/lindblad.hpp"
#include "support/dense_oracle.hpp"

using namespace sselab;
using doctest::Approx;

namespace {

State random_normalized(int dim, unsigned seed) {
    State x(dim);
    unsigned s = seed;
    auto next = [&s] {
        s = s * 1664525u + 1013904223u;
        return static_cast<double>(s) / 4294967296.0 - 0.5;
    };
    for (int j = 0; j < dim; ++j) x(j) = Complex(next(), next());
    x.normalize();
    return x;
}

} // namespace

TEST_CASE("drift without channels is -iHy") {
    const int dim = 8;
    const auto l = ladder_ops(dim);
    const ModelSpec m = build_model(dim, l.number, {});
    const State y = random_normalized(dim, 3);
    const State expected = (-kI * l.number).apply(y);
    CHECK((drift_nonlinear(y, m) - expected).norm() < 1e-15);
}

TEST_CASE("self-adjoint channel on an eigenstate: drift components cancel") {
    const int dim = 8;
    const auto l = ladder_ops(dim);
    const ModelSpec m = build_model(dim, FockOperator::zero(dim), {l.number});
    for (int j : {0, 2, 5}) {
        const State e = basis_state(dim, j);
        // G e_j + (j * N e_j - j²/2 e_j): the nonlinear terms add j²/2
        const State expected =
            m.effective_drift().apply(e) + (0.5 * j * j) * e;
        CHECK((drift_nonlinear(e, m) - expected).norm() < 1e-13);
        CHECK(drift_nonlinear(e, m).norm() < 1e-13); // total drift vanishes
        CHECK(diffusion_nonlinear(e, m, 0).norm() < 1e-13);
    }
}

TEST_CASE("diffusion of the annihilation channel vanishes on the vacuum") {
    const int dim = 8;
    const auto l = ladder_ops(dim);
    const ModelSpec m = build_model(dim, FockOperator::zero(dim), {l.a});
    CHECK(diffusion_nonlinear(basis_state(dim, 0), m, 0).norm() == 0.0);
    CHECK_THROWS_AS(diffusion_nonlinear(basis_state(dim, 0), m, 1), std::out_of_range);
    CHECK_THROWS_AS(diffusion_nonlinear(basis_state(dim, 0), m, -1), std::out_of_range);
}

TEST_CASE("fields match the dense term-by-term oracle on random states") {
    OscillatorParams op;
    op.beta1 = 0.3;
    op.beta2 = 1.0;
    op.beta3 = 0.1;
    op.alpha = {Complex(0.5, 0.0), Complex(0.4, 0.1), Complex(0.3, 0.0),
                Complex(0.25, 0.0), Complex(0.2, 0.0), Complex(0.1, 0.0)};
    const std::vector<ModelSpec> presets{
        preset_damped(1.0, 1.0, 0.5, 12),
        preset_two_photon(0.1, 1.0, 0.3, 12),
        preset_measurement(MeasurementParams{1.0, 1.0, 1.0, 0.5}, 12),
        preset_oscillator(op, 12),
    };
    for (const auto& m : presets) {
        for (unsigned seed = 1; seed <= 250; ++seed) {
            const State y = random_normalized(m.dim(), seed);
            const auto oracle_fields = oracle::dense_field_oracle(y, m);
            const State drift = drift_nonlinear(y, m);
            CHECK((drift - oracle::to_state(oracle_fields.drift)).norm() < 1e-13);
            for (int k = 0; k < m.channel_count(); ++k) {
                const State diff = diffusion_nonlinear(y, m, k);
                CHECK((diff - oracle::to_state(
                                  oracle_fields.diffusion[static_cast<std::size_t>(k)]))
                          .norm() < 1e-13);
            }
        }
    }
}

TEST_CASE("hamiltonian eigenstate stays put up to phase") {
    const int dim = 8;
    const auto l = ladder_ops(dim);
    const ModelSpec m = build_model(dim, l.number, {});
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 0.3;
    GaussianStream stream(1, kStreamNonlinear, 0);
    const Trajectory tr = simulate_nsse(m, basis_state(dim, 2), cfg, stream);
    for (const auto& x : tr.states)
        CHECK(std::abs(std::abs(x(2)) - 1.0) < 1e-12);
}

TEST_CASE("eigenstates of a commuting self-adjoint channel are fixed points") {
    const int dim = 8;
    const auto l = ladder_ops(dim);
    const ModelSpec m = build_model(dim, FockOperator::zero(dim), {l.number});
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 0.2;
    cfg.seed = 5;
    GaussianStream stream(cfg.seed, kStreamNonlinear, 0);
    const Trajectory tr = simulate_nsse(m, basis_state(dim, 3), cfg, stream);
    for (const auto& x : tr.states)
        CHECK(std::abs(std::abs(x(3)) - 1.0) < 1e-12);
}

TEST_CASE("renormalization keeps every recorded norm at one") {
    const ModelSpec m = preset_damped(1.0, 1.0, 0.5, 12);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 0.5;
    cfg.seed = 11;
    cfg.n_traj = 20;
    cfg.record_stride = 25;
    const auto ens = run_ensemble_nsse(m, basis_state(12, 0), cfg);
    for (const auto& tr : ens)
        for (double sq : tr.sq_norm) CHECK(std::abs(std::sqrt(sq) - 1.0) <= 1e-12);
}

TEST_CASE("one integrator step equals the public fields composed") {
    const ModelSpec m = preset_damped(1.0, 1.0, 0.5, 10);
    const State x0 = random_normalized(10, 77);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 1e-3;
    cfg.seed = 13;
    cfg.renormalize = false;
    GaussianStream stream(cfg.seed, kStreamNonlinear, 0);
    const Trajectory tr = simulate_nsse(m, x0, cfg, stream, 0);

    GaussianStream probe(cfg.seed, kStreamNonlinear, 0);
    const double sdt = std::sqrt(cfg.dt);
    State expected = x0 + cfg.dt * drift_nonlinear(x0, m);
    for (int k = 0; k < m.channel_count(); ++k)
        expected += (sdt * probe.normal(0, 2, static_cast<std::uint64_t>(k))) *
                    diffusion_nonlinear(x0, m, k);
    CHECK((tr.states.back() - expected).norm() == 0.0);
}

TEST_CASE("Ito norm balance ties the fields to the conservativity residual") {
    OscillatorParams op;
    op.beta1 = 0.2;
    op.beta2 = 1.0;
    op.alpha = {Complex(0.7, 0.0), Complex(0.3, 0.2), Complex(0.0, 0.0),
                Complex(0.4, 0.0), Complex(0.1, 0.0), Complex(0.0, 0.0)};
    const ModelSpec m = preset_oscillator(op, 14);
    for (unsigned seed = 1; seed <= 60; ++seed) {
        const State y = random_normalized(14, seed);
        double balance = 2.0 * y.dot(drift_nonlinear(y, m)).real();
        for (int k = 0; k < m.channel_count(); ++k)
            balance += diffusion_nonlinear(y, m, k).squaredNorm();
        const double residual = conservativity_residual(m, y);
        CHECK(std::abs(balance - residual) < 1e-11 * (1.0 + std::abs(residual)));
    }
}

TEST_CASE("non-normalized initial state is rejected") {
    const ModelSpec m = preset_damped(1.0, 1.0, 0.5, 12);
    SolverConfig cfg;
    GaussianStream stream(0, kStreamNonlinear, 0);
    CHECK_THROWS_AS(simulate_nsse(m, 2.0 * basis_state(12, 0), cfg, stream),
                    std::invalid_argument);
}

TEST_CASE("nsse blow-up raises with step information") {
    const ModelSpec m = preset_damped(1.0, 1.0, 0.5, 12);
    SolverConfig cfg;
    cfg.dt = 1000.0;
    cfg.t_final = 500000.0;
    cfg.renormalize = false;
    GaussianStream stream(2, kStreamNonlinear, 0);
    CHECK_THROWS_AS(simulate_nsse(m, basis_state(12, 11), cfg, stream), BlowUpError);
}

TEST_CASE("ensemble mean occupation tracks the master equation") {
    const ModelSpec m = preset_damped(1.0, 1.0, 0.5, 12);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 1.0;
    cfg.seed = 2024;
    cfg.n_traj = 800;
    cfg.record_stride = 250;
    cfg.threads = 4;
    const State x0 = basis_state(12, 0);
    const auto ens = run_ensemble_nsse(m, x0, cfg);

    const Density rho0 = x0 * x0.adjoint();
    const Density rho1 = evolve_density(rho0, m, 1.0, 1e-3);
    const auto n_op = ladder_ops(12).number;
    const double ref = (n_op.dense() * rho1).trace().real();

    double mean = 0.0;
    std::vector<double> vals;
    for (const auto& tr : ens) {
        vals.push_back(expect_real(n_op, tr.states.back()));
        mean += vals.back();
    }
    mean /= static_cast<double>(ens.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (vals.size() * (vals.size() - 1.0)));
    CHECK(std::abs(mean - ref) <= 3.0 * se + 5.0 * cfg.dt);
}

TEST_CASE("moment bound check: free model with safe constants has no flags") {
    const int dim = 8;
    const auto l = ladder_ops(dim);
    const ModelSpec m = build_model(dim, l.number, {});
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 0.2;
    cfg.n_traj = 4;
    cfg.record_stride = 50;
    const auto ens = run_ensemble_nsse(m, basis_state(dim, 2), cfg);
    const auto rep = moment_bound_check(ens, l.number, 0.1, 0.1);
    CHECK(rep.flag_count() == 0);
    CHECK(rep.lhs_mean.front() == Approx(4.0));
    CHECK_THROWS_AS(moment_bound_check(ens, l.number, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("moment bound check: zero constants on a driven model must flag") {
    const ModelSpec m = preset_damped(1.0, 1.0, 0.5, 12);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 0.5;
    cfg.seed = 31;
    cfg.n_traj = 200;
    cfg.record_stride = 100;
    cfg.threads = 4;
    const auto ens = run_ensemble_nsse(m, basis_state(12, 0), cfg);
    const auto rep = moment_bound_check(ens, ladder_ops(12).number, 0.0, 0.0);
    CHECK(rep.flag_count() > 0);
}
