#include "sselab/sse_linear.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace sselab {

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
    if (!(t_final >= dt)) throw std::invalid_argument("SolverConfig: t_final must be >= dt");
    if (n_traj < 1) throw std::invalid_argument("SolverConfig: n_traj must be >= 1");
    if (record_stride < 1) throw std::invalid_argument("SolverConfig: record_stride must be >= 1");
    if (threads < 1) throw std::invalid_argument("SolverConfig: threads must be >= 1");
}

long SolverConfig::n_steps() const {
    const long n = std::lround(t_final / dt);
    return n < 1 ? 1 : n;
}

int Trajectory::record_index(double t, double tol) const {
    for (std::size_t j = 0; j < times.size(); ++j)
        if (std::abs(times[j] - t) <= tol) return static_cast<int>(j);
    return -1;
}

const std::vector<double>& common_grid(const std::vector<Trajectory>& ensemble) {
    if (ensemble.empty()) throw std::invalid_argument("common_grid: empty ensemble");
    const auto& g = ensemble.front().times;
    for (const auto& tr : ensemble)
        if (tr.times != g)
            throw std::invalid_argument("common_grid: mismatched recorded grids");
    return g;
}

LinearStepper::LinearStepper(const ModelSpec& m, double dt, Scheme scheme)
    : m_(&m), dt_(dt), scheme_(scheme) {
    if (scheme_ == Scheme::SemiImplicit) {
        DenseMatrix a = DenseMatrix::Identity(m.dim(), m.dim()) -
                        dt * m.effective_drift().dense();
        lu_.compute(a);
        if (!lu_.isInvertible()) {
            std::ostringstream os;
            os << "semi-implicit step: (I - dt G) is singular at dt = " << dt
               << ", dim = " << m.dim();
            throw StepFailureError(os.str());
        }
    }
}

State LinearStepper::step(const State& x, const Eigen::VectorXd& dW) const {
    const auto& m = *m_;
    if (x.size() != m.dim()) throw DimensionMismatch("step_linear: state dimension mismatch");
    if (dW.size() != m.channel_count())
        throw DimensionMismatch("step_linear: dW must have one entry per channel");

    State noise_part = State::Zero(m.dim());
    for (int k = 0; k < m.channel_count(); ++k)
        noise_part += dW(k) * m.channel(k).apply(x);

    if (scheme_ == Scheme::EulerMaruyama)
        return x + dt_ * m.effective_drift().apply(x) + noise_part;
    return lu_.solve(x + noise_part);
}

State step_linear(const State& x, const Eigen::VectorXd& dW, double dt,
                  const ModelSpec& m, Scheme scheme) {
    return LinearStepper(m, dt, scheme).step(x, dW);
}

Trajectory simulate_linear(const ModelSpec& m, const State& xi, const SolverConfig& cfg,
                           const GaussianStream& stream, long traj_index) {
    cfg.validate();
    if (xi.size() != m.dim()) throw DimensionMismatch("simulate_linear: initial state dimension");
    if (!(xi.squaredNorm() > 0.0))
        throw std::invalid_argument("simulate_linear: initial state must be nonzero");

    const long n_steps = cfg.n_steps();
    const int K = m.channel_count();
    const double sqrt_dt = std::sqrt(cfg.dt);
    LinearStepper stepper(m, cfg.dt, cfg.scheme);

    Trajectory tr;
    tr.dt = cfg.dt;
    tr.n_steps = n_steps;
    if (cfg.record_noise) tr.noise.resize(n_steps, K);

    auto record = [&](long step, const State& x) {
        tr.times.push_back(static_cast<double>(step) * cfg.dt);
        tr.states.push_back(x);
        tr.sq_norm.push_back(x.squaredNorm());
    };

    State x = xi;
    record(0, x);
    Eigen::VectorXd dW(K);
    for (long s = 0; s < n_steps; ++s) {
        for (int k = 0; k < K; ++k)
            dW(k) = sqrt_dt * stream.normal(static_cast<std::uint64_t>(s),
                                            static_cast<std::uint64_t>(K),
                                            static_cast<std::uint64_t>(k));
        if (cfg.record_noise) tr.noise.row(s) = dW;
        x = stepper.step(x, dW);
        if (!x.allFinite()) {
            std::ostringstream os;
            os << "simulate_linear: non-finite state after step " << s
               << " (trajectory " << traj_index << ")";
            throw BlowUpError(s, traj_index, os.str());
        }
        if ((s + 1) % cfg.record_stride == 0 || s + 1 == n_steps) record(s + 1, x);
    }
    tr.weight = tr.sq_norm.back();
    return tr;
}

namespace {

template <typename SimulateOne>
std::vector<Trajectory> run_ensemble(const SolverConfig& cfg, SimulateOne&& one) {
    std::vector<Trajectory> out(static_cast<std::size_t>(cfg.n_traj));
    const int n_threads = std::min<int>(cfg.threads, cfg.n_traj);
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

} // namespace

std::vector<Trajectory> run_ensemble_linear(const ModelSpec& m, const State& xi,
                                            const SolverConfig& cfg,
                                            std::uint64_t purpose_tag) {
    cfg.validate();
    return run_ensemble(cfg, [&](int i) {
        GaussianStream stream(cfg.seed, purpose_tag, static_cast<std::uint64_t>(i));
        return simulate_linear(m, xi, cfg, stream, i);
    });
}

int MomentReport::flag_count() const {
    int n = 0;
    for (bool f : flagged) n += f ? 1 : 0;
    return n;
}

MomentReport second_moment_report(const std::vector<Trajectory>& ensemble,
                                  double target_sq_norm, double drift_slack_coeff) {
    const auto& grid = common_grid(ensemble);
    const std::size_t n = ensemble.size();
    const double dt = ensemble.front().dt;

    MomentReport rep;
    rep.times = grid;
    rep.target = target_sq_norm;
    rep.drift_slack_coeff = drift_slack_coeff;
    rep.degenerate_stats = (n < 2);

    for (std::size_t j = 0; j < grid.size(); ++j) {
        double mean = 0.0;
        for (const auto& tr : ensemble) mean += tr.sq_norm[j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& tr : ensemble) {
            const double d = tr.sq_norm[j] - mean;
            var += d * d;
        }
        const double se =
            rep.degenerate_stats
                ? std::numeric_limits<double>::quiet_NaN()
                : std::sqrt(var / (static_cast<double>(n) * (static_cast<double>(n) - 1.0)));
        rep.mean_sq_norm.push_back(mean);
        rep.stderr_sq_norm.push_back(se);
        rep.flagged.push_back(!rep.degenerate_stats &&
                              std::abs(mean - target_sq_norm) >
                                  3.0 * se + drift_slack_coeff * dt);
    }

    // paired increment statistics over the full horizon
    double inc_mean = 0.0;
    for (const auto& tr : ensemble) inc_mean += tr.sq_norm.back() - tr.sq_norm.front();
    inc_mean /= static_cast<double>(n);
    double inc_var = 0.0;
    for (const auto& tr : ensemble) {
        const double d = (tr.sq_norm.back() - tr.sq_norm.front()) - inc_mean;
        inc_var += d * d;
    }
    rep.increment_mean = inc_mean;
    rep.increment_stderr =
        rep.degenerate_stats
            ? std::numeric_limits<double>::quiet_NaN()
            : std::sqrt(inc_var / (static_cast<double>(n) * (static_cast<double>(n) - 1.0)));
    return rep;
}

} // namespace sselab
