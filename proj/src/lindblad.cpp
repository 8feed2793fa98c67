#include "sselab/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sselab {

namespace {

struct DenseModel {
    DenseMatrix g;
    DenseMatrix g_adj;
    std::vector<DenseMatrix> l;
    std::vector<DenseMatrix> l_adj;
};

DenseModel densify(const ModelSpec& m) {
    DenseModel d;
    d.g = m.effective_drift().dense();
    d.g_adj = d.g.adjoint();
    for (const auto& lk : m.channels()) {
        d.l.push_back(lk.dense());
        d.l_adj.push_back(d.l.back().adjoint());
    }
    return d;
}

Density rhs(const Density& rho, const DenseModel& d) {
    Density out = d.g * rho + rho * d.g_adj;
    for (std::size_t k = 0; k < d.l.size(); ++k) out += d.l[k] * rho * d.l_adj[k];
    return out;
}

Density hermitize(const Density& a) { return 0.5 * (a + a.adjoint()); }

} // namespace

Density lindblad_rhs(const Density& rho, const ModelSpec& m) {
    if (rho.rows() != m.dim() || rho.cols() != m.dim())
        throw DimensionMismatch("lindblad_rhs: dimension mismatch");
    return rhs(rho, densify(m));
}

void validate_density(const Density& rho, double herm_tol, double trace_tol,
                      double psd_tol) {
    if (rho.rows() != rho.cols())
        throw std::invalid_argument("validate_density: matrix must be square");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > herm_tol) {
        std::ostringstream os;
        os << "validate_density: Hermiticity defect " << herm;
        throw std::invalid_argument(os.str());
    }
    const double tr_err = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
    if (tr_err > trace_tol) {
        std::ostringstream os;
        os << "validate_density: trace error " << tr_err;
        throw std::invalid_argument(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Density> es(hermitize(rho));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("validate_density: eigensolve failed");
    if (es.eigenvalues().minCoeff() < -psd_tol) {
        std::ostringstream os;
        os << "validate_density: minimum eigenvalue " << es.eigenvalues().minCoeff();
        throw std::invalid_argument(os.str());
    }
}

Density evolve_density(const Density& rho0, const ModelSpec& m, double t_final,
                       double dt, double trace_tol) {
    if (rho0.rows() != m.dim() || rho0.cols() != m.dim())
        throw DimensionMismatch("evolve_density: dimension mismatch");
    if (!(dt > 0.0) || !(t_final >= 0.0))
        throw std::invalid_argument("evolve_density: bad time parameters");

    const DenseModel d = densify(m);
    const long n_steps = std::lround(t_final / dt);
    Density rho = rho0;
    for (long s = 0; s < n_steps; ++s) {
        const Density k1 = rhs(rho, d);
        const Density k2 = rhs(rho + (0.5 * dt) * k1, d);
        const Density k3 = rhs(rho + (0.5 * dt) * k2, d);
        const Density k4 = rhs(rho + dt * k3, d);
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = hermitize(rho);
        const double tr_err = std::abs(rho.trace().real() - 1.0);
        if (!std::isfinite(tr_err) || tr_err > trace_tol) {
            std::ostringstream os;
            os << "evolve_density: trace drift " << tr_err << " after step " << s
               << "; reduce dt or enlarge dim";
            throw IntegrationFailure(os.str());
        }
    }
    return rho;
}

double stable_ode_dt(const ModelSpec& m) {
    const double scale = 2.0 * m.effective_drift().max_abs() + 1.0;
    return std::min(1e-2, 0.1 / scale);
}

SteadyStateKernel steady_state_kernel(const ModelSpec& m, double rel_tol) {
    const int n = m.dim();
    const int nn = n * n;
    const DenseModel d = densify(m);

    // column-stacking vectorization: vec(A rho B) = (B^T kron A) vec(rho)
    DenseMatrix super = DenseMatrix::Zero(nn, nn);
    const DenseMatrix id = DenseMatrix::Identity(n, n);
    auto kron_into = [&](const DenseMatrix& bt, const DenseMatrix& a) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (bt(i, j) != Complex(0.0, 0.0))
                    super.block(i * n, j * n, n, n) += bt(i, j) * a;
    };
    kron_into(id, d.g);                         // G rho
    kron_into(d.g_adj.transpose(), id);         // rho G*
    for (std::size_t k = 0; k < d.l.size(); ++k)
        kron_into(d.l_adj[k].transpose(), d.l[k]); // L rho L*

    Eigen::BDCSVD<DenseMatrix> svd(super, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double cutoff = rel_tol * (smax > 0.0 ? smax : 1.0);

    SteadyStateKernel out;
    out.rel_tol = rel_tol;
    std::vector<int> kernel_cols;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) <= cutoff) kernel_cols.push_back(i);
    out.kernel_dim = static_cast<int>(kernel_cols.size());

    const int n_report = std::min<int>(static_cast<int>(sv.size()),
                                       std::max(out.kernel_dim + 2, 4));
    out.singular_values.resize(n_report);
    for (int i = 0; i < n_report; ++i) out.singular_values(i) = sv(sv.size() - 1 - i);

    for (int c : kernel_cols) {
        Eigen::Map<const DenseMatrix> mat(svd.matrixV().col(c).data(), n, n);
        out.basis.push_back(DenseMatrix(mat));
    }

    if (out.kernel_dim == 1) {
        Density rho = hermitize(out.basis.front());
        const double tr = rho.trace().real();
        if (std::abs(tr) < 1e-12)
            throw std::runtime_error("steady_state: kernel vector has vanishing trace");
        rho /= tr;
        validate_density(rho);
        out.state = rho;
    }
    return out;
}

Density steady_state(const ModelSpec& m, double rel_tol) {
    SteadyStateKernel k = steady_state_kernel(m, rel_tol);
    if (k.kernel_dim != 1) {
        std::ostringstream os;
        os << "steady_state: generator kernel has dimension " << k.kernel_dim
           << " (expected 1)";
        throw NonUniqueSteadyState(k.kernel_dim, os.str());
    }
    return k.state;
}

double trace_distance(const Density& a, const Density& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Density> es(hermitize(a - b));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("trace_distance: eigensolve failed");
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityComparison compare_mc_density(const std::vector<Trajectory>& ensemble, double t,
                                     const Density& rho_ref) {
    if (ensemble.empty())
        throw std::invalid_argument("compare_mc_density: empty ensemble");
    const int j = ensemble.front().record_index(t);
    if (j < 0) throw std::invalid_argument("compare_mc_density: t not on recorded grid");
    common_grid(ensemble);

    const int dim = static_cast<int>(ensemble.front().states.front().size());
    if (rho_ref.rows() != dim)
        throw DimensionMismatch("compare_mc_density: reference dimension mismatch");

    DensityComparison out;
    out.n_traj = static_cast<int>(ensemble.size());
    out.degenerate = out.n_traj < 2;

    double wsum = 0.0;
    Density rho = Density::Zero(dim, dim);
    std::vector<State> xs;
    xs.reserve(ensemble.size());
    for (const auto& tr : ensemble) {
        State x = tr.states[static_cast<std::size_t>(j)];
        const double nrm = x.norm();
        if (!(nrm > 0.0))
            throw DegenerateStateError("compare_mc_density: zero-norm state");
        x /= nrm;
        rho += tr.weight * (x * x.adjoint());
        wsum += tr.weight;
        xs.push_back(std::move(x));
    }
    if (!(wsum > 0.0))
        throw DegenerateStateError("compare_mc_density: all weights zero");
    rho /= wsum;

    out.rho_mc = rho;
    out.trace_dist = trace_distance(rho, rho_ref);

    // Frobenius aggregate of entrywise errors: for unit states
    // ||xx* - rho||_F² = 1 - 2 <x|rho|x> + ||rho||_F².
    const double rho_fro2 = rho.squaredNorm();
    double fro_var = 0.0;
    Eigen::VectorXd diag_var = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double wt = ensemble[i].weight / wsum;
        const double quad = (xs[i].adjoint() * rho * xs[i])(0, 0).real();
        fro_var += wt * wt * (1.0 - 2.0 * quad + rho_fro2);
        for (int q = 0; q < dim; ++q) {
            const double dq = std::norm(xs[i](q)) - rho(q, q).real();
            diag_var(q) += wt * wt * dq * dq;
        }
    }
    out.aggregate_sigma = 0.5 * std::sqrt(static_cast<double>(dim)) * std::sqrt(std::max(fro_var, 0.0));
    out.diag_stderr = diag_var.cwiseMax(0.0).cwiseSqrt();
    return out;
}

} // namespace sselab
