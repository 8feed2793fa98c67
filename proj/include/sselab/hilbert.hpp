#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <vector>

#include "sselab/errors.hpp"

namespace sselab {

using Complex = std::complex<double>;
// State vector in the truncated Fock basis e_0..e_{dim-1}.
using State = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;
using SparseCMat = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

inline constexpr Complex kI{0.0, 1.0};

// Sparse operator on the truncated basis. All operators in scope are banded
// (bandwidth <= 2), so sparse products are exact.
class FockOperator {
public:
    enum class Symmetry { Hermitian, AntiHermitian, General };

    FockOperator() = default;
    FockOperator(int dim, const std::vector<Triplet>& entries);
    explicit FockOperator(SparseCMat mat);

    static FockOperator identity(int dim);
    static FockOperator zero(int dim);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const SparseCMat& matrix() const { return mat_; }
    Symmetry symmetry() const { return sym_; }

    State apply(const State& x) const;
    FockOperator adjoint() const;

    double max_abs() const;
    // max_ij |M_ij - conj(M_ji)|
    double hermiticity_defect() const;
    // largest |row - col| over stored entries (ladder degree)
    int bandwidth() const;

    DenseMatrix dense() const { return DenseMatrix(mat_); }
    // P_m  M  P_m for m <= dim
    FockOperator truncated(int new_dim) const;

    friend FockOperator operator+(const FockOperator& a, const FockOperator& b);
    friend FockOperator operator-(const FockOperator& a, const FockOperator& b);
    friend FockOperator operator*(const FockOperator& a, const FockOperator& b);
    friend FockOperator operator*(Complex s, const FockOperator& a);

private:
    SparseCMat mat_;
    Symmetry sym_ = Symmetry::General;
    void classify();
};

struct LadderOps {
    FockOperator a;
    FockOperator a_dagger;
    FockOperator number;
};

// a e_0 = 0, a e_j = sqrt(j) e_{j-1}; a† e_j = sqrt(j+1) e_{j+1} with the top
// raise killed by the truncation; number = a† a.
LadderOps ladder_ops(int dim);

struct QuadratureOps {
    FockOperator q; // (a + a†)/sqrt(2)
    FockOperator p; // i (a† - a)/sqrt(2)
};

QuadratureOps quadratures(int dim);

FockOperator adjoint(const FockOperator& op);
State apply(const FockOperator& op, const State& x);

State basis_state(int dim, int level);
double squared_norm(const State& x);
bool is_normalized(const State& x, double tol = 1e-12);
// antilinear in the first argument
Complex inner(const State& x, const State& y);
// Re<x, A x>
double expect_real(const FockOperator& op, const State& x);

// pow >= 0; diagonal powers of the number operator (reference operators N^p)
FockOperator number_power(int dim, int pow);

} // namespace sselab
