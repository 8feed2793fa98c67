#include "sselab/criteria.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sselab/rng.hpp"

namespace sselab {

namespace {

int interior_levels(const FockOperator& C, const ModelSpec& m) {
    const int maxdeg = std::max(m.max_ladder_degree(), C.bandwidth());
    return m.dim() - maxdeg;
}

// Hermitian matrix of the quadratic form: F = C²G + G*C² + sum_k L_k* C² L_k,
// restricted to the interior block where truncation cannot contaminate it.
DenseMatrix form_matrix(const FockOperator& C, const ModelSpec& m, int block) {
    const FockOperator c2 = C * C;
    FockOperator f = (c2 * m.effective_drift()) +
                     (m.effective_drift().adjoint() * c2);
    for (const auto& l : m.channels()) f = f + (l.adjoint() * (c2 * l));
    DenseMatrix fd = f.dense().topLeftCorner(block, block);
    return 0.5 * (fd + fd.adjoint().eval());
}

double lambda_max(const DenseMatrix& h) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("criteria: eigensolve failed");
    return es.eigenvalues().maxCoeff();
}

// The form keeps growing with the level exactly when the normalized ratio
// F_jj/(C²_jj + 1) is still increasing at the top of the interior window.
// Compare the two top quarters: a plateau (boundable form) gives a ratio
// near one, linear growth gives 4/3, faster growth more.
bool diagonal_is_unbounded(const DenseMatrix& f, const FockOperator& C) {
    const int n = static_cast<int>(f.rows());
    if (n < 16) return false;
    const DenseMatrix c2 = (C * C).dense();
    auto ratio = [&](int j) {
        return f(j, j).real() / (c2(j, j).real() + 1.0);
    };
    double mid_max = -std::numeric_limits<double>::infinity();
    double top_max = -std::numeric_limits<double>::infinity();
    for (int j = n / 2; j < 3 * n / 4; ++j) mid_max = std::max(mid_max, ratio(j));
    for (int j = 3 * n / 4; j < n; ++j) top_max = std::max(top_max, ratio(j));
    if (top_max <= 0.0) return false;
    return top_max > 1.15 * std::max(mid_max, 1e-9);
}

State random_interior_state(int dim, int block, std::uint64_t seed, int index) {
    State x = State::Zero(dim);
    for (int j = 0; j < block; ++j) {
        const std::uint64_t cell = static_cast<std::uint64_t>(index) * 4096 +
                                   static_cast<std::uint64_t>(j);
        const double re = detail::to_unit_open(detail::mix64(seed ^ detail::mix64(2 * cell))) - 0.5;
        const double im = detail::to_unit_open(detail::mix64(seed ^ detail::mix64(2 * cell + 1))) - 0.5;
        x(j) = Complex(re, im);
    }
    x /= x.norm();
    return x;
}

double form_value(const FockOperator& C, const ModelSpec& m, const State& x) {
    const State cx = C.apply(x);
    double v = 2.0 * cx.dot(C.apply(m.effective_drift().apply(x))).real();
    for (const auto& l : m.channels()) v += C.apply(l.apply(x)).squaredNorm();
    return v;
}

} // namespace

std::vector<double> drift_form_diagonal(const FockOperator& C, const ModelSpec& m,
                                        int level_lo, int level_hi) {
    if (C.dim() != m.dim())
        throw DimensionMismatch("drift_form_diagonal: C dimension mismatch");
    const int top = interior_levels(C, m) - 1;
    if (level_lo < 0 || level_hi < level_lo)
        throw std::invalid_argument("drift_form_diagonal: bad level range");
    if (level_hi > top) {
        std::ostringstream os;
        os << "drift_form_diagonal: level " << level_hi
           << " touches the truncation boundary (max interior level " << top << ")";
        throw std::invalid_argument(os.str());
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(level_hi - level_lo + 1));
    for (int j = level_lo; j <= level_hi; ++j)
        out.push_back(form_value(C, m, basis_state(m.dim(), j)));
    return out;
}

double leading_slope_estimate(const FockOperator& C, const ModelSpec& m, int p, int j) {
    if (j < 4) throw std::invalid_argument("leading_slope_estimate: j too small");
    const int j_half = j / 2;
    const auto c_lo = drift_form_diagonal(C, m, j_half, j_half);
    const auto c_hi = drift_form_diagonal(C, m, j, j);
    const double r_lo = c_lo[0] / std::pow(static_cast<double>(j_half), 2 * p + 1);
    const double r_hi = c_hi[0] / std::pow(static_cast<double>(j), 2 * p + 1);
    // j r(j) = s j + q + O(1/j); two evaluations eliminate q
    return (j * r_hi - j_half * r_lo) / static_cast<double>(j - j_half);
}

GrowthConstants estimate_growth_constants(const FockOperator& C, const ModelSpec& m) {
    if (C.dim() != m.dim())
        throw DimensionMismatch("estimate_growth_constants: C dimension mismatch");
    const int block = interior_levels(C, m);
    if (block < 2)
        throw std::invalid_argument("estimate_growth_constants: interior block too small");

    const DenseMatrix f = form_matrix(C, m, block);
    if (diagonal_is_unbounded(f, C))
        throw UnboundedFormError(
            "estimate_growth_constants: quadratic form grows with the level; "
            "no dimension-independent bound exists");

    const DenseMatrix c2 = (C * C).dense().topLeftCorner(block, block);
    DenseMatrix weight = c2 + DenseMatrix::Identity(block, block);

    double ratio_max = 0.0;
    for (int j = 0; j < block; ++j)
        ratio_max = std::max(ratio_max, f(j, j).real() / weight(j, j).real());

    std::vector<double> alphas{0.0};
    if (ratio_max > 0.0) {
        const double top = 10.0 * ratio_max;
        const double bottom = top * 1e-4;
        for (int i = 0; i < 63; ++i)
            alphas.push_back(bottom * std::pow(top / bottom, i / 62.0));
    }

    GrowthConstants best;
    double best_sum = std::numeric_limits<double>::infinity();
    for (double a : alphas) {
        const double beta = std::max(0.0, lambda_max(f - a * weight));
        if (a + beta < best_sum) {
            best_sum = a + beta;
            best = {a, beta};
        }
    }

    // certification: every interior basis vector and 100 seeded random states
    const double scale = 1e-9 * (1.0 + std::abs(f.cwiseAbs().maxCoeff()));
    for (int j = 0; j < block; ++j) {
        const State e = basis_state(m.dim(), j);
        const double lhs = form_value(C, m, e);
        const double rhs = best.alpha * (C.apply(e).squaredNorm() + 1.0) + best.beta;
        if (lhs > rhs + scale)
            throw std::logic_error("estimate_growth_constants: certification failed on basis");
    }
    for (int i = 0; i < 100; ++i) {
        const State x = random_interior_state(m.dim(), block, 0x48313343ull, i);
        const double lhs = form_value(C, m, x);
        const double rhs = best.alpha * (C.apply(x).squaredNorm() + 1.0) + best.beta;
        if (lhs > rhs + scale)
            throw std::logic_error("estimate_growth_constants: certification failed on random state");
    }
    return best;
}

LyapunovPair estimate_lyapunov_pair(const FockOperator& C, const ModelSpec& m) {
    if (C.dim() != m.dim())
        throw DimensionMismatch("estimate_lyapunov_pair: C dimension mismatch");
    const int block = interior_levels(C, m);
    if (block < 8)
        throw std::invalid_argument("estimate_lyapunov_pair: interior block too small");

    const DenseMatrix f = form_matrix(C, m, block);
    const DenseMatrix c2 = (C * C).dense().topLeftCorner(block, block);

    // largest alpha for which F + alpha C² could stay bounded above: the form
    // must decay at least like -alpha C² at the top of the spectrum
    double alpha_cap = std::numeric_limits<double>::infinity();
    for (int j = block / 2; j < block; ++j) {
        const double c2j = c2(j, j).real();
        if (c2j > 0.0) alpha_cap = std::min(alpha_cap, -f(j, j).real() / c2j);
    }
    if (!(alpha_cap > 0.0) || !std::isfinite(alpha_cap))
        throw UnboundedFormError(
            "estimate_lyapunov_pair: no alpha > 0 with decaying form; "
            "no Lyapunov pair (C, sqrt(alpha) C) exists at this truncation");

    LyapunovPair best;
    double best_quality = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 32; ++i) {
        const double a = alpha_cap * (static_cast<double>(i) / 33.0);
        const DenseMatrix shifted = f + a * c2;
        // reject candidates whose diagonal still grows at the boundary
        double top_val = -std::numeric_limits<double>::infinity();
        double mid_val = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < block / 2; ++j) mid_val = std::max(mid_val, shifted(j, j).real());
        for (int j = 0; j < block; ++j) top_val = std::max(top_val, shifted(j, j).real());
        if (top_val > std::max(mid_val, 1.0) * 1.9) continue;
        const double beta = std::max(0.0, 0.5 * lambda_max(shifted));
        const double quality = (beta + 1e-12) / a;
        if (quality < best_quality) {
            best_quality = quality;
            best = {a, beta};
        }
    }
    if (!(best.alpha > 0.0))
        throw UnboundedFormError("estimate_lyapunov_pair: no feasible alpha candidate");

    // certification on unit interior states: Q(x) + alpha ||Cx||² <= 2 beta
    const double scale = 1e-9 * (1.0 + std::abs(f.cwiseAbs().maxCoeff()));
    for (int j = 0; j < block; ++j) {
        const State e = basis_state(m.dim(), j);
        const double lhs = form_value(C, m, e) + best.alpha * C.apply(e).squaredNorm();
        if (lhs > 2.0 * best.beta + scale)
            throw std::logic_error("estimate_lyapunov_pair: certification failed on basis");
    }
    for (int i = 0; i < 100; ++i) {
        const State x = random_interior_state(m.dim(), block, 0x48333343ull, i);
        const double lhs = form_value(C, m, x) + best.alpha * C.apply(x).squaredNorm();
        if (lhs > 2.0 * best.beta + scale)
            throw std::logic_error("estimate_lyapunov_pair: certification failed on random state");
    }
    return best;
}

bool well_posed_predicate(const OscillatorParams& p) {
    return std::abs(p.alpha[3]) >= std::abs(p.alpha[4]);
}

bool stationarity_predicate(const OscillatorParams& p, int power) {
    if (power < 4)
        throw std::invalid_argument("stationarity_predicate: requires p >= 4");
    const double a4 = std::abs(p.alpha[3]);
    const double a5 = std::abs(p.alpha[4]);
    if (a4 > a5) return true;
    if (a4 == a5) {
        const double a1 = std::abs(p.alpha[0]);
        const double a2 = std::abs(p.alpha[1]);
        return a2 * a2 - a1 * a1 + 4.0 * (2.0 * power + 1.0) * a4 * a4 < 0.0;
    }
    return false;
}

CriteriaReport build_criteria_report(const ModelSpec& m, const OscillatorParams& params,
                                     int p, int cj_lo, int cj_hi) {
    CriteriaReport rep;
    rep.p = p;
    rep.level_lo = cj_lo;
    const FockOperator c_op = number_power(m.dim(), p);
    rep.cj = drift_form_diagonal(c_op, m, cj_lo, cj_hi);
    rep.leading_slope_raw =
        rep.cj.back() / std::pow(static_cast<double>(cj_hi), 2 * p + 1);
    rep.leading_slope_limit = leading_slope_estimate(c_op, m, p, cj_hi);
    rep.predicates["well_posed"] = well_posed_predicate(params);
    rep.predicates["stationary_measure"] = stationarity_predicate(params, p);
    try {
        const FockOperator c_n = number_power(m.dim(), 1);
        const GrowthConstants gc = estimate_growth_constants(c_n, m);
        rep.alpha = gc.alpha;
        rep.beta = gc.beta;
    } catch (const UnboundedFormError&) {
        rep.growth_unbounded = true;
    }
    try {
        const FockOperator c_n = number_power(m.dim(), 1);
        rep.lyapunov = estimate_lyapunov_pair(c_n, m);
        rep.lyapunov_found = true;
    } catch (const UnboundedFormError&) {
        rep.lyapunov_found = false;
    } catch (const std::invalid_argument&) {
        rep.lyapunov_found = false;
    }
    return rep;
}

} // namespace sselab
