#pragma once

#include <vector>

#include "sselab/model.hpp"
#include "sselab/rng.hpp"
#include "sselab/trajectory.hpp"

namespace sselab {

// Drift field of the norm-preserving equation:
//   G(y) = G y + sum_k ( Re<y, L_k y> L_k y - 1/2 Re²<y, L_k y> y )
State drift_nonlinear(const State& y, const ModelSpec& m);

// Diffusion field per channel: L_k(y) = L_k y - Re<y, L_k y> y
State diffusion_nonlinear(const State& y, const ModelSpec& m, int channel);

Trajectory simulate_nsse(const ModelSpec& m, const State& x0, const SolverConfig& cfg,
                         const GaussianStream& stream, long traj_index = 0);

std::vector<Trajectory> run_ensemble_nsse(const ModelSpec& m, const State& x0,
                                          const SolverConfig& cfg,
                                          std::uint64_t purpose_tag = kStreamNonlinear);

// Checks E||C X_t||² <= exp(alpha t)(E||C X_0||² + t alpha (E||X_0||² + beta))
// on the recorded grid.
struct MomentBoundReport {
    std::vector<double> times;
    std::vector<double> lhs_mean;
    std::vector<double> lhs_stderr;
    std::vector<double> rhs_bound;
    std::vector<bool> flagged;
    double alpha = 0.0;
    double beta = 0.0;
    int flag_count() const;
};

MomentBoundReport moment_bound_check(const std::vector<Trajectory>& ensemble,
                                     const FockOperator& C, double alpha, double beta);

} // namespace sselab
