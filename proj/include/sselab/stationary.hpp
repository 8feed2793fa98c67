#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sselab/girsanov.hpp"
#include "sselab/model.hpp"
#include "sselab/trajectory.hpp"

namespace sselab {

// Long-run time average of f(X_s) past burn-in (trapezoidal), with running
// values at checkpoints and a batch-means error estimate.
struct TimeAverageResult {
    std::vector<double> checkpoint_times;
    std::vector<double> running_values;
    double final_value = 0.0;
    double batch_stderr = 0.0;
    int n_batches = 0;
};

TimeAverageResult time_average(const Trajectory& traj, const StateFunctional& f,
                               double burn_in, int n_checkpoints = 8,
                               int n_batches = 16);

// Empirical check of the Lyapunov estimate
//   int_0^t E||D X_s||² ds <= E||C X_0||² + 2 beta t.
// k_hat reports the time-average constant (1/t) int_0^t E||D X_s||² ds at the
// horizon.
struct LyapunovReport {
    std::vector<double> times;
    std::vector<double> lhs_mean;   // per-trajectory integrals, ensemble mean
    std::vector<double> lhs_stderr;
    std::vector<double> bound;
    std::vector<bool> flagged;
    double beta = 0.0;
    double k_hat = 0.0;
    int flag_count() const;
};

LyapunovReport lyapunov_diagnostic(const std::vector<Trajectory>& ensemble,
                                   const FockOperator& D, const FockOperator& C,
                                   double beta);

struct ObservableSummary {
    std::string name;
    double mean = 0.0;
    double batch_stderr = 0.0;
    std::vector<double> window_means; // consecutive-window averages past burn-in
};

using ObservableBattery = std::vector<std::pair<std::string, StateFunctional>>;

// Per-observable time-and-ensemble averages with batch-means errors and
// consecutive-window means (stationarity evidence). The norm column ||x|| and
// any ||D x||² entries are supplied through the battery.
std::vector<ObservableSummary> empirical_measure_summary(
    const std::vector<Trajectory>& ensemble, const ObservableBattery& battery,
    double burn_in, int n_windows = 3, int n_batches = 16);

// Default burn-in heuristic: 10 / (slowest decay-rate estimate), with the
// rate estimated from the channel norms. Crude and user-overridable.
double default_burn_in(const ModelSpec& m);

} // namespace sselab
