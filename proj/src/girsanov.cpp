#include "sselab/girsanov.hpp"

#include <cmath>
#include <sstream>

namespace sselab {

namespace {
constexpr double kNormFloor = 1e-300;
}

Trajectory normalize_and_weight(const Trajectory& linear_traj) {
    Trajectory out = linear_traj;
    for (std::size_t j = 0; j < out.states.size(); ++j) {
        const double sq = out.states[j].squaredNorm();
        if (!(sq > kNormFloor)) {
            std::ostringstream os;
            os << "normalize_and_weight: degenerate norm " << sq << " at recorded index "
               << j << " (t = " << out.times[j] << ")";
            throw DegenerateStateError(os.str());
        }
        out.states[j] /= std::sqrt(sq);
    }
    out.weight = linear_traj.sq_norm.back();
    return out;
}

Eigen::MatrixXd shifted_noise(const Trajectory& linear_traj, const ModelSpec& m) {
    const long n_steps = linear_traj.n_steps;
    if (linear_traj.noise.rows() != n_steps)
        throw std::invalid_argument("shifted_noise: noise increments were not recorded");
    if (static_cast<long>(linear_traj.times.size()) != n_steps + 1)
        throw std::invalid_argument("shifted_noise: requires record_stride = 1");
    if (linear_traj.noise.cols() != m.channel_count())
        throw DimensionMismatch("shifted_noise: channel count mismatch");

    const double dt = linear_traj.dt;
    Eigen::MatrixXd db(n_steps, m.channel_count());
    for (long s = 0; s < n_steps; ++s) {
        const State& phi = linear_traj.states[static_cast<std::size_t>(s)];
        const double sq = phi.squaredNorm();
        if (!(sq > kNormFloor))
            throw DegenerateStateError("shifted_noise: degenerate norm at step start");
        const State x = phi / std::sqrt(sq);
        for (int k = 0; k < m.channel_count(); ++k) {
            const double compensator = 2.0 * x.dot(m.channel(k).apply(x)).real();
            db(s, k) = linear_traj.noise(s, k) - dt * compensator;
        }
    }
    return db;
}

WeightedEstimate weighted_expectation(const std::vector<Trajectory>& ensemble,
                                      const StateFunctional& f, double t) {
    if (ensemble.empty())
        throw std::invalid_argument("weighted_expectation: empty ensemble");
    const auto& grid = common_grid(ensemble);
    (void)grid;
    const int j = ensemble.front().record_index(t);
    if (j < 0) throw std::invalid_argument("weighted_expectation: t not on recorded grid");

    double wsum = 0.0;
    double wsq = 0.0;
    std::vector<double> fv;
    std::vector<double> wv;
    fv.reserve(ensemble.size());
    wv.reserve(ensemble.size());
    for (const auto& tr : ensemble) {
        const double w = tr.weight;
        fv.push_back(f(tr.states[static_cast<std::size_t>(j)]));
        wv.push_back(w);
        wsum += w;
        wsq += w * w;
    }
    if (!(wsum > 0.0))
        throw DegenerateStateError("weighted_expectation: all weights are zero");

    WeightedEstimate est;
    for (std::size_t i = 0; i < fv.size(); ++i) est.value += wv[i] * fv[i];
    est.value /= wsum;
    double s2 = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i) {
        const double d = fv[i] - est.value;
        s2 += wv[i] * wv[i] * d * d;
    }
    est.stderr_ = std::sqrt(s2) / wsum;
    est.ess = wsum * wsum / wsq;
    return est;
}

} // namespace sselab
