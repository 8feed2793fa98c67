#pragma once

#include <functional>
#include <vector>

#include "sselab/model.hpp"
#include "sselab/rng.hpp"
#include "sselab/trajectory.hpp"

namespace sselab {

// One step of the Galerkin-truncated linear SSE
//   d phi = G phi dt + sum_k L_k phi dW^k.
// euler_maruyama: x + dt G x + sum_k dW_k L_k x
// semi_implicit:  solve (I - dt G) y = x + sum_k dW_k L_k x
State step_linear(const State& x, const Eigen::VectorXd& dW, double dt,
                  const ModelSpec& m, Scheme scheme);

// Factorizes (I - dt G) once so ensembles of semi-implicit steps stay cheap.
class LinearStepper {
public:
    LinearStepper(const ModelSpec& m, double dt, Scheme scheme);
    State step(const State& x, const Eigen::VectorXd& dW) const;
    const ModelSpec& model() const { return *m_; }

private:
    const ModelSpec* m_;
    double dt_;
    Scheme scheme_;
    Eigen::FullPivLU<DenseMatrix> lu_;
};

Trajectory simulate_linear(const ModelSpec& m, const State& xi, const SolverConfig& cfg,
                           const GaussianStream& stream, long traj_index = 0);

// Deterministic regardless of thread count: trajectory i always uses the
// stream derived from (cfg.seed, purpose_tag, i).
std::vector<Trajectory> run_ensemble_linear(const ModelSpec& m, const State& xi,
                                            const SolverConfig& cfg,
                                            std::uint64_t purpose_tag = kStreamLinear);

struct MomentReport {
    std::vector<double> times;
    std::vector<double> mean_sq_norm;
    std::vector<double> stderr_sq_norm;
    std::vector<bool> flagged;
    double drift_slack_coeff = 0.0; // the c in |mean - target| <= 3 stderr + c dt
    double target = 1.0;
    bool degenerate_stats = false; // single trajectory: stderr undefined
    // paired terminal-minus-initial martingale increment statistics
    double increment_mean = 0.0;
    double increment_stderr = 0.0;
    int flag_count() const;
};

MomentReport second_moment_report(const std::vector<Trajectory>& ensemble,
                                  double target_sq_norm, double drift_slack_coeff = 5.0);

} // namespace sselab
