#include "sselab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sselab {

namespace {

// trapezoidal average of samples f_j on grid t_j over [t_lo, t_hi]
double trapezoid_average(const std::vector<double>& t, const std::vector<double>& f,
                         std::size_t lo, std::size_t hi) {
    if (hi <= lo) return f[lo];
    double acc = 0.0;
    for (std::size_t j = lo; j < hi; ++j)
        acc += 0.5 * (f[j] + f[j + 1]) * (t[j + 1] - t[j]);
    return acc / (t[hi] - t[lo]);
}

std::size_t first_index_at_or_after(const std::vector<double>& t, double t0) {
    for (std::size_t j = 0; j < t.size(); ++j)
        if (t[j] >= t0 - 1e-12) return j;
    return t.size();
}

} // namespace

TimeAverageResult time_average(const Trajectory& traj, const StateFunctional& f,
                               double burn_in, int n_checkpoints, int n_batches) {
    if (traj.times.empty()) throw std::invalid_argument("time_average: empty trajectory");
    const double t_final = traj.times.back();
    if (burn_in >= t_final)
        throw std::invalid_argument("time_average: burn_in must be < t_final");
    if (n_checkpoints < 2) n_checkpoints = 2;
    if (n_batches < 2) n_batches = 2;

    std::vector<double> vals(traj.times.size());
    for (std::size_t j = 0; j < traj.states.size(); ++j) vals[j] = f(traj.states[j]);

    const std::size_t lo = first_index_at_or_after(traj.times, burn_in);
    if (lo + 1 >= traj.times.size())
        throw std::invalid_argument("time_average: no samples past burn_in");

    TimeAverageResult out;
    for (int c = 1; c <= n_checkpoints; ++c) {
        const double frac = static_cast<double>(c) / n_checkpoints;
        const double t_ck = traj.times[lo] + frac * (t_final - traj.times[lo]);
        std::size_t hi = lo + 1;
        while (hi + 1 < traj.times.size() && traj.times[hi] < t_ck) ++hi;
        out.checkpoint_times.push_back(traj.times[hi]);
        out.running_values.push_back(trapezoid_average(traj.times, vals, lo, hi));
    }
    out.final_value = out.running_values.back();

    // batch means over equal sub-windows of [burn_in, t_final]
    std::vector<double> batches;
    const std::size_t span = traj.times.size() - 1 - lo;
    const std::size_t per = std::max<std::size_t>(1, span / static_cast<std::size_t>(n_batches));
    for (std::size_t b = lo; b + per <= traj.times.size() - 1; b += per)
        batches.push_back(trapezoid_average(traj.times, vals, b, b + per));
    out.n_batches = static_cast<int>(batches.size());
    if (out.n_batches >= 2) {
        const double bm = std::accumulate(batches.begin(), batches.end(), 0.0) /
                          static_cast<double>(batches.size());
        double var = 0.0;
        for (double v : batches) var += (v - bm) * (v - bm);
        var /= static_cast<double>(batches.size() - 1);
        out.batch_stderr = std::sqrt(var / static_cast<double>(batches.size()));
    }
    return out;
}

int LyapunovReport::flag_count() const {
    int n = 0;
    for (bool f : flagged) n += f ? 1 : 0;
    return n;
}

LyapunovReport lyapunov_diagnostic(const std::vector<Trajectory>& ensemble,
                                   const FockOperator& D, const FockOperator& C,
                                   double beta) {
    const auto& grid = common_grid(ensemble);
    const std::size_t n = ensemble.size();
    const std::size_t nt = grid.size();

    // per-trajectory running integrals of ||D X_s||²
    std::vector<std::vector<double>> integrals(n, std::vector<double>(nt, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& tr = ensemble[i];
        std::vector<double> g(nt);
        for (std::size_t j = 0; j < nt; ++j) g[j] = D.apply(tr.states[j]).squaredNorm();
        for (std::size_t j = 1; j < nt; ++j)
            integrals[i][j] = integrals[i][j - 1] +
                              0.5 * (g[j] + g[j - 1]) * (grid[j] - grid[j - 1]);
    }

    double cx0 = 0.0;
    for (const auto& tr : ensemble) cx0 += C.apply(tr.states.front()).squaredNorm();
    cx0 /= static_cast<double>(n);

    LyapunovReport rep;
    rep.times = std::vector<double>(grid.begin(), grid.end());
    rep.beta = beta;
    for (std::size_t j = 0; j < nt; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += integrals[i][j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = integrals[i][j] - mean;
            var += d * d;
        }
        const double se = (n < 2) ? 0.0
                                  : std::sqrt(var / (static_cast<double>(n) *
                                                     (static_cast<double>(n) - 1.0)));
        rep.lhs_mean.push_back(mean);
        rep.lhs_stderr.push_back(se);
        rep.bound.push_back(cx0 + 2.0 * beta * grid[j]);
        rep.flagged.push_back(mean > rep.bound.back() + 3.0 * se);
    }
    rep.k_hat = grid.back() > 0.0 ? rep.lhs_mean.back() / grid.back() : 0.0;
    return rep;
}

std::vector<ObservableSummary> empirical_measure_summary(
    const std::vector<Trajectory>& ensemble, const ObservableBattery& battery,
    double burn_in, int n_windows, int n_batches) {
    if (battery.empty())
        throw std::invalid_argument("empirical_measure_summary: empty battery");
    const auto& grid = common_grid(ensemble);
    const double t_final = grid.back();
    if (burn_in >= t_final)
        throw std::invalid_argument("empirical_measure_summary: burn_in >= t_final");
    if (n_windows < 1) n_windows = 1;

    const std::size_t lo = first_index_at_or_after(grid, burn_in);
    if (lo + 1 >= grid.size())
        throw std::invalid_argument("empirical_measure_summary: no samples past burn_in");

    std::vector<ObservableSummary> out;
    for (const auto& [name, f] : battery) {
        ObservableSummary s;
        s.name = name;

        std::vector<double> traj_means;
        std::vector<double> batches;
        std::vector<double> window_acc(static_cast<std::size_t>(n_windows), 0.0);

        for (const auto& tr : ensemble) {
            std::vector<double> vals(grid.size());
            for (std::size_t j = 0; j < grid.size(); ++j) vals[j] = f(tr.states[j]);
            traj_means.push_back(trapezoid_average(grid, vals, lo, grid.size() - 1));

            const std::size_t span = grid.size() - 1 - lo;
            const std::size_t per_b =
                std::max<std::size_t>(1, span / static_cast<std::size_t>(n_batches));
            for (std::size_t b = lo; b + per_b <= grid.size() - 1; b += per_b)
                batches.push_back(trapezoid_average(grid, vals, b, b + per_b));

            const std::size_t per_w =
                std::max<std::size_t>(1, span / static_cast<std::size_t>(n_windows));
            for (int w = 0; w < n_windows; ++w) {
                const std::size_t a = lo + static_cast<std::size_t>(w) * per_w;
                std::size_t b = (w + 1 == n_windows) ? grid.size() - 1 : a + per_w;
                b = std::min(b, grid.size() - 1);
                if (a < b)
                    window_acc[static_cast<std::size_t>(w)] +=
                        trapezoid_average(grid, vals, a, b);
            }
        }

        s.mean = std::accumulate(traj_means.begin(), traj_means.end(), 0.0) /
                 static_cast<double>(traj_means.size());
        if (batches.size() >= 2) {
            const double bm = std::accumulate(batches.begin(), batches.end(), 0.0) /
                              static_cast<double>(batches.size());
            double var = 0.0;
            for (double v : batches) var += (v - bm) * (v - bm);
            var /= static_cast<double>(batches.size() - 1);
            s.batch_stderr = std::sqrt(var / static_cast<double>(batches.size()));
        }
        for (double w : window_acc)
            s.window_means.push_back(w / static_cast<double>(ensemble.size()));
        out.push_back(std::move(s));
    }
    return out;
}

double default_burn_in(const ModelSpec& m) {
    if (m.channel_count() == 0 || m.dim() < 3) return 0.0;
    // dissipation strength probed on the lowest levels; the slowest channel
    // sets the burn-in
    double rate = std::numeric_limits<double>::infinity();
    for (const auto& l : m.channels()) {
        const double r1 = l.apply(basis_state(m.dim(), 1)).squaredNorm();
        const double r2 = l.apply(basis_state(m.dim(), 2)).squaredNorm();
        rate = std::min(rate, r1 > 0.0 ? r1 : r2);
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) return 0.0;
    return 10.0 / rate;
}

} // namespace sselab
