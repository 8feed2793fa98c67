#include "sselab/hilbert.hpp"

#include <cmath>

namespace sselab {

namespace {

void check_entries(int dim, const std::vector<Triplet>& entries) {
    if (dim < 1) throw std::invalid_argument("FockOperator: dim must be >= 1");
    for (const auto& t : entries) {
        if (t.row() < 0 || t.row() >= dim || t.col() < 0 || t.col() >= dim)
            throw std::out_of_range("FockOperator: entry index out of range");
        if (!std::isfinite(t.value().real()) || !std::isfinite(t.value().imag()))
            throw std::invalid_argument("FockOperator: non-finite entry");
    }
}

} // namespace

FockOperator::FockOperator(int dim, const std::vector<Triplet>& entries) {
    check_entries(dim, entries);
    mat_.resize(dim, dim);
    mat_.setFromTriplets(entries.begin(), entries.end());
    mat_.makeCompressed();
    classify();
}

FockOperator::FockOperator(SparseCMat mat) : mat_(std::move(mat)) {
    if (mat_.rows() != mat_.cols())
        throw std::invalid_argument("FockOperator: matrix must be square");
    mat_.makeCompressed();
    classify();
}

void FockOperator::classify() {
    const double defect = hermiticity_defect();
    const double tol = 1e-12 * (1.0 + max_abs());
    if (defect <= tol) {
        sym_ = Symmetry::Hermitian;
        return;
    }
    // anti-Hermitian: M + M^H = 0
    double anti = 0.0;
    SparseCMat s = SparseCMat(mat_.adjoint()) + mat_;
    for (int k = 0; k < s.outerSize(); ++k)
        for (SparseCMat::InnerIterator it(s, k); it; ++it)
            anti = std::max(anti, std::abs(it.value()));
    sym_ = (anti <= tol) ? Symmetry::AntiHermitian : Symmetry::General;
}

FockOperator FockOperator::identity(int dim) {
    SparseCMat m(dim, dim);
    m.setIdentity();
    return FockOperator(std::move(m));
}

FockOperator FockOperator::zero(int dim) {
    return FockOperator(SparseCMat(dim, dim));
}

State FockOperator::apply(const State& x) const {
    if (x.size() != mat_.cols())
        throw DimensionMismatch("FockOperator::apply: dimension mismatch");
    return mat_ * x;
}

FockOperator FockOperator::adjoint() const {
    return FockOperator(SparseCMat(mat_.adjoint()));
}

double FockOperator::max_abs() const {
    double m = 0.0;
    for (int k = 0; k < mat_.outerSize(); ++k)
        for (SparseCMat::InnerIterator it(mat_, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

double FockOperator::hermiticity_defect() const {
    double d = 0.0;
    SparseCMat diff = mat_ - SparseCMat(mat_.adjoint());
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseCMat::InnerIterator it(diff, k); it; ++it)
            d = std::max(d, std::abs(it.value()));
    return d;
}

int FockOperator::bandwidth() const {
    int b = 0;
    for (int k = 0; k < mat_.outerSize(); ++k)
        for (SparseCMat::InnerIterator it(mat_, k); it; ++it)
            if (it.value() != Complex(0.0, 0.0))
                b = std::max(b, std::abs(static_cast<int>(it.row() - it.col())));
    return b;
}

FockOperator FockOperator::truncated(int new_dim) const {
    if (new_dim < 1 || new_dim > dim())
        throw std::invalid_argument("FockOperator::truncated: bad dimension");
    std::vector<Triplet> kept;
    for (int k = 0; k < mat_.outerSize(); ++k)
        for (SparseCMat::InnerIterator it(mat_, k); it; ++it)
            if (it.row() < new_dim && it.col() < new_dim)
                kept.emplace_back(it.row(), it.col(), it.value());
    return FockOperator(new_dim, kept);
}

FockOperator operator+(const FockOperator& a, const FockOperator& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("operator+: dimension mismatch");
    return FockOperator(SparseCMat(a.mat_ + b.mat_));
}

FockOperator operator-(const FockOperator& a, const FockOperator& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("operator-: dimension mismatch");
    return FockOperator(SparseCMat(a.mat_ - b.mat_));
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("operator*: dimension mismatch");
    return FockOperator(SparseCMat(a.mat_ * b.mat_));
}

FockOperator operator*(Complex s, const FockOperator& a) {
    return FockOperator(SparseCMat(s * a.mat_));
}

LadderOps ladder_ops(int dim) {
    if (dim < 2) throw std::invalid_argument("ladder_ops: dim must be >= 2");
    std::vector<Triplet> ta, tad, tn;
    for (int j = 1; j < dim; ++j)
        ta.emplace_back(j - 1, j, Complex(std::sqrt(static_cast<double>(j)), 0.0));
    for (int j = 0; j + 1 < dim; ++j)
        tad.emplace_back(j + 1, j, Complex(std::sqrt(static_cast<double>(j + 1)), 0.0));
    for (int j = 1; j < dim; ++j)
        tn.emplace_back(j, j, Complex(static_cast<double>(j), 0.0));
    return LadderOps{FockOperator(dim, ta), FockOperator(dim, tad), FockOperator(dim, tn)};
}

QuadratureOps quadratures(int dim) {
    if (dim < 2) throw std::invalid_argument("quadratures: dim must be >= 2");
    const auto l = ladder_ops(dim);
    const Complex inv_sqrt2(1.0 / std::sqrt(2.0), 0.0);
    FockOperator q = inv_sqrt2 * (l.a + l.a_dagger);
    FockOperator p = (kI * inv_sqrt2) * (l.a_dagger - l.a);
    return QuadratureOps{std::move(q), std::move(p)};
}

FockOperator adjoint(const FockOperator& op) { return op.adjoint(); }

State apply(const FockOperator& op, const State& x) { return op.apply(x); }

State basis_state(int dim, int level) {
    if (level < 0 || level >= dim)
        throw std::out_of_range("basis_state: level out of range");
    State x = State::Zero(dim);
    x(level) = Complex(1.0, 0.0);
    return x;
}

double squared_norm(const State& x) { return x.squaredNorm(); }

bool is_normalized(const State& x, double tol) {
    return std::abs(x.squaredNorm() - 1.0) <= tol;
}

Complex inner(const State& x, const State& y) {
    if (x.size() != y.size()) throw DimensionMismatch("inner: dimension mismatch");
    return x.dot(y); // Eigen's dot conjugates the first argument
}

double expect_real(const FockOperator& op, const State& x) {
    return inner(x, op.apply(x)).real();
}

FockOperator number_power(int dim, int pow) {
    if (dim < 1) throw std::invalid_argument("number_power: dim must be >= 1");
    if (pow < 0) throw std::invalid_argument("number_power: pow must be >= 0");
    std::vector<Triplet> t;
    for (int j = 0; j < dim; ++j) {
        double v = 1.0;
        for (int q = 0; q < pow; ++q) v *= static_cast<double>(j);
        if (v != 0.0) t.emplace_back(j, j, Complex(v, 0.0));
    }
    return FockOperator(dim, t);
}

} // namespace sselab
