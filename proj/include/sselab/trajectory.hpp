#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "sselab/hilbert.hpp"

namespace sselab {

enum class Scheme { EulerMaruyama, SemiImplicit };

struct SolverConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    Scheme scheme = Scheme::EulerMaruyama;
    std::uint64_t seed = 0;
    int n_traj = 1;
    int record_stride = 1;
    bool record_noise = false;
    bool renormalize = true; // nonlinear solver only
    int threads = 1;

    void validate() const;
    long n_steps() const;
};

// Recorded path of one trajectory. `times`/`states`/`sq_norm` are thinned by
// record_stride (t = 0 and the final step are always kept); `noise` holds the
// per-step Brownian increments at full resolution when requested.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<double> sq_norm;
    Eigen::MatrixXd noise; // n_steps x K, empty unless record_noise
    double weight = 1.0;
    double dt = 0.0;
    long n_steps = 0;

    int record_index(double t, double tol = 1e-9) const; // -1 if absent
};

// Common recorded grid across an ensemble; throws on mismatch.
const std::vector<double>& common_grid(const std::vector<Trajectory>& ensemble);

} // namespace sselab
