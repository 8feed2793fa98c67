#pragma once

#include <functional>
#include <vector>

#include "sselab/model.hpp"
#include "sselab/trajectory.hpp"

namespace sselab {

// Turns a linear-SSE path into a reweighted unit-norm path:
// X_t = phi_t/||phi_t||, weight = ||phi_T||². The recorded sq_norm of the
// linear run is retained for diagnostics.
Trajectory normalize_and_weight(const Trajectory& linear_traj);

// Shifted Brownian increments under the reweighted measure:
//   dB_k = dW_k - dt 2 Re<X_s, L_k X_s>,  X_s the normalized state at the
// step start. Requires full-resolution recording (record_stride = 1, noise on).
Eigen::MatrixXd shifted_noise(const Trajectory& linear_traj, const ModelSpec& m);

struct WeightedEstimate {
    double value = 0.0;
    double stderr_ = 0.0; // self-normalized importance-sampling standard error
    double ess = 0.0;     // (sum w)² / sum w²
};

using StateFunctional = std::function<double(const State&)>;

// Self-normalized importance sampling over normalized+weighted trajectories.
WeightedEstimate weighted_expectation(const std::vector<Trajectory>& ensemble,
                                      const StateFunctional& f, double t);

} // namespace sselab
