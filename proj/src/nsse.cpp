#include "sselab/nsse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace sselab {

namespace {

// L_k y and e_k = Re<y, L_k y> for every channel; shared by drift, diffusion
// and the integrator so all paths agree bit-for-bit.
struct ChannelFields {
    std::vector<State> ly;
    std::vector<double> e;
};

ChannelFields channel_fields(const State& y, const ModelSpec& m) {
    ChannelFields f;
    const int K = m.channel_count();
    f.ly.reserve(static_cast<std::size_t>(K));
    f.e.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        f.ly.push_back(m.channel(k).apply(y));
        f.e.push_back(y.dot(f.ly.back()).real());
    }
    return f;
}

State assemble_drift(const State& y, const ModelSpec& m, const ChannelFields& f) {
    State g = m.effective_drift().apply(y);
    for (int k = 0; k < m.channel_count(); ++k) {
        const auto ku = static_cast<std::size_t>(k);
        g += f.e[ku] * f.ly[ku] - (0.5 * f.e[ku] * f.e[ku]) * y;
    }
    return g;
}

} // namespace

State drift_nonlinear(const State& y, const ModelSpec& m) {
    if (y.size() != m.dim()) throw DimensionMismatch("drift_nonlinear: dimension mismatch");
    return assemble_drift(y, m, channel_fields(y, m));
}

State diffusion_nonlinear(const State& y, const ModelSpec& m, int channel) {
    if (y.size() != m.dim()) throw DimensionMismatch("diffusion_nonlinear: dimension mismatch");
    if (channel < 0 || channel >= m.channel_count())
        throw std::out_of_range("diffusion_nonlinear: channel index out of range");
    const State ly = m.channel(channel).apply(y);
    const double e = y.dot(ly).real();
    return ly - e * y;
}

Trajectory simulate_nsse(const ModelSpec& m, const State& x0, const SolverConfig& cfg,
                         const GaussianStream& stream, long traj_index) {
    cfg.validate();
    if (x0.size() != m.dim()) throw DimensionMismatch("simulate_nsse: initial state dimension");
    if (!is_normalized(x0))
        throw std::invalid_argument("simulate_nsse: initial state must have unit norm");

    const long n_steps = cfg.n_steps();
    const int K = m.channel_count();
    const double sqrt_dt = std::sqrt(cfg.dt);

    Trajectory tr;
    tr.dt = cfg.dt;
    tr.n_steps = n_steps;
    tr.weight = 1.0;
    if (cfg.record_noise) tr.noise.resize(n_steps, K);

    auto record = [&](long step, const State& x) {
        tr.times.push_back(static_cast<double>(step) * cfg.dt);
        tr.states.push_back(x);
        tr.sq_norm.push_back(x.squaredNorm());
    };

    State x = x0;
    record(0, x);
    for (long s = 0; s < n_steps; ++s) {
        const ChannelFields f = channel_fields(x, m);
        State next = x + cfg.dt * assemble_drift(x, m, f);
        for (int k = 0; k < K; ++k) {
            const double dw = sqrt_dt * stream.normal(static_cast<std::uint64_t>(s),
                                                      static_cast<std::uint64_t>(K),
                                                      static_cast<std::uint64_t>(k));
            if (cfg.record_noise) tr.noise(s, k) = dw;
            const auto ku = static_cast<std::size_t>(k);
            next += dw * (f.ly[ku] - f.e[ku] * x);
        }
        if (!next.allFinite()) {
            std::ostringstream os;
            os << "simulate_nsse: non-finite state after step " << s << " (trajectory "
               << traj_index << ")";
            throw BlowUpError(s, traj_index, os.str());
        }
        if (cfg.renormalize) {
            const double nrm = next.norm();
            if (!(nrm > 0.0)) {
                std::ostringstream os;
                os << "simulate_nsse: degenerate zero-norm state at step " << s
                   << " (trajectory " << traj_index << ")";
                throw DegenerateStateError(os.str());
            }
            next /= nrm;
        }
        x = std::move(next);
        if ((s + 1) % cfg.record_stride == 0 || s + 1 == n_steps) record(s + 1, x);
    }
    return tr;
}

std::vector<Trajectory> run_ensemble_nsse(const ModelSpec& m, const State& x0,
                                          const SolverConfig& cfg,
                                          std::uint64_t purpose_tag) {
    cfg.validate();
    std::vector<Trajectory> out(static_cast<std::size_t>(cfg.n_traj));
    const int n_threads = std::min<int>(cfg.threads, cfg.n_traj);
    auto one = [&](int i) {
        GaussianStream stream(cfg.seed, purpose_tag, static_cast<std::uint64_t>(i));
        return simulate_nsse(m, x0, cfg, stream, i);
    };
    if (n_threads <= 1) {
        for (int i = 0; i < cfg.n_traj; ++i) out[static_cast<std::size_t>(i)] = one(i);
        return out;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= cfg.n_traj) return;
            try {
                out[static_cast<std::size_t>(i)] = one(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

int MomentBoundReport::flag_count() const {
    int n = 0;
    for (bool f : flagged) n += f ? 1 : 0;
    return n;
}

MomentBoundReport moment_bound_check(const std::vector<Trajectory>& ensemble,
                                     const FockOperator& C, double alpha, double beta) {
    if (alpha < 0.0 || beta < 0.0)
        throw std::invalid_argument("moment_bound_check: alpha, beta must be >= 0");
    const auto& grid = common_grid(ensemble);
    const std::size_t n = ensemble.size();

    MomentBoundReport rep;
    rep.times = grid;
    rep.alpha = alpha;
    rep.beta = beta;

    double cx0_mean = 0.0;
    double x0_mean = 0.0;
    for (const auto& tr : ensemble) {
        cx0_mean += C.apply(tr.states.front()).squaredNorm();
        x0_mean += tr.sq_norm.front();
    }
    cx0_mean /= static_cast<double>(n);
    x0_mean /= static_cast<double>(n);

    for (std::size_t j = 0; j < grid.size(); ++j) {
        double mean = 0.0;
        std::vector<double> vals;
        vals.reserve(n);
        for (const auto& tr : ensemble) {
            vals.push_back(C.apply(tr.states[j]).squaredNorm());
            mean += vals.back();
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        const double se = (n < 2) ? 0.0
                                  : std::sqrt(var / (static_cast<double>(n) *
                                                     (static_cast<double>(n) - 1.0)));
        const double t = grid[j];
        const double bound = std::exp(alpha * t) * (cx0_mean + t * alpha * (x0_mean + beta));
        rep.lhs_mean.push_back(mean);
        rep.lhs_stderr.push_back(se);
        rep.rhs_bound.push_back(bound);
        rep.flagged.push_back(mean > bound + 3.0 * se);
    }
    return rep;
}

} // namespace sselab
