#include <doctest.h>

#include <cmath>

#include "sselab/hilbert.hpp"
#include "support/dense_oracle.hpp"

using namespace sselab;
using doctest::Approx;

namespace {

State random_state(int dim, unsigned seed) {
    State x(dim);
    unsigned s = seed;
    auto next = [&s] {
        s = s * 1664525u + 1013904223u;
        return static_cast<double>(s) / 4294967296.0 - 0.5;
    };
    for (int j = 0; j < dim; ++j) x(j) = Complex(next(), next());
    return x;
}

} // namespace

TEST_CASE("ladder operators act as on the Fock basis") {
    const auto l = ladder_ops(4);
    CHECK(l.a.apply(basis_state(4, 0)).norm() == 0.0);
    const State up = l.a_dagger.apply(basis_state(4, 1));
    CHECK(std::abs(up(2) - Complex(std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(up(0)) + std::abs(up(1)) + std::abs(up(3)) == 0.0);
    const State n3 = l.number.apply(basis_state(4, 3));
    CHECK(std::abs(n3(3) - Complex(3.0, 0.0)) < 1e-15);
    // truncation kills the top raise
    CHECK(l.a_dagger.apply(basis_state(4, 3)).norm() == 0.0);
    CHECK_THROWS_AS(ladder_ops(1), std::invalid_argument);
}

TEST_CASE("number equals a_dagger * a") {
    const auto l = ladder_ops(9);
    const FockOperator prod = l.a_dagger * l.a;
    CHECK((prod.dense() - l.number.dense()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("quadratures reproduce the number operator on interior levels") {
    const int dim = 6;
    const auto quad = quadratures(dim);
    CHECK(quad.q.symmetry() == FockOperator::Symmetry::Hermitian);
    CHECK(quad.p.symmetry() == FockOperator::Symmetry::Hermitian);

    const FockOperator lhs =
        Complex(0.5, 0.0) * (quad.q * quad.q + quad.p * quad.p - FockOperator::identity(dim));
    const auto l = ladder_ops(dim);
    for (int j = 0; j <= dim - 3; ++j) {
        const State d = lhs.apply(basis_state(dim, j)) - l.number.apply(basis_state(dim, j));
        CHECK(d.norm() < 1e-12);
    }
    // top level corrupted by the truncation
    const State top = lhs.apply(basis_state(dim, 5)) - l.number.apply(basis_state(dim, 5));
    CHECK(top.norm() > 0.5);
}

TEST_CASE("canonical commutator [Q,P] = i on interior levels") {
    const int dim = 6;
    const auto quad = quadratures(dim);
    // brute-force dense product as the oracle
    const auto qd = oracle::to_dense(quad.q);
    const auto pd = oracle::to_dense(quad.p);
    const auto e1 = oracle::to_vec(basis_state(dim, 1));
    const auto qp = oracle::matvec(qd, oracle::matvec(pd, e1));
    const auto pq = oracle::matvec(pd, oracle::matvec(qd, e1));
    for (int j = 0; j < dim; ++j) {
        const Complex expected = (j == 1) ? kI : Complex(0.0, 0.0);
        CHECK(std::abs(qp[j] - pq[j] - expected) < 1e-12);
    }
}

TEST_CASE("adjoint is the conjugate transpose and an involution") {
    const auto l = ladder_ops(5);
    CHECK((adjoint(l.a).dense() - l.a_dagger.dense()).cwiseAbs().maxCoeff() == 0.0);

    std::vector<Triplet> t{{0, 1, Complex(0.3, -2.0)}, {3, 2, Complex(-1.0, 0.25)}};
    const FockOperator h(5, t);
    CHECK((adjoint(adjoint(h)).dense() - h.dense()).cwiseAbs().maxCoeff() == 0.0);

    const FockOperator in = kI * l.number;
    CHECK(in.symmetry() == FockOperator::Symmetry::AntiHermitian);
    CHECK((adjoint(in).dense() + in.dense()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("apply: identity, diagonal action, nilpotence") {
    const int dim = 6;
    const State x = random_state(dim, 11);
    CHECK((FockOperator::identity(dim).apply(x) - x).norm() == 0.0);

    const auto l = ladder_ops(dim);
    State y = (basis_state(dim, 0) + basis_state(dim, 3)) / std::sqrt(2.0);
    const State ny = l.number.apply(y);
    CHECK(std::abs(ny(3) - Complex(3.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(ny(0)) == 0.0);

    const FockOperator a2 = l.a * l.a;
    CHECK(a2.apply(basis_state(dim, 1)).norm() == 0.0);

    CHECK_THROWS_AS(l.number.apply(random_state(dim + 1, 3)), DimensionMismatch);
}

TEST_CASE("adjointness away from the truncation boundary") {
    const int dim = 10;
    const auto l = ladder_ops(dim);
    for (unsigned seed = 1; seed <= 20; ++seed) {
        State x = random_state(dim, seed);
        State y = random_state(dim, seed + 100);
        x(dim - 1) = 0.0; // support on 0..dim-2
        y(dim - 1) = 0.0;
        const Complex lhs = inner(l.a_dagger.apply(x), y);
        const Complex rhs = inner(x, l.a.apply(y));
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("commutation relation [a, a_dagger] = 1 on interior support") {
    const int dim = 10;
    const auto l = ladder_ops(dim);
    for (unsigned seed = 1; seed <= 10; ++seed) {
        State x = random_state(dim, seed);
        x(dim - 1) = 0.0;
        const State c = l.a.apply(l.a_dagger.apply(x)) - l.a_dagger.apply(l.a.apply(x));
        CHECK((c - x).norm() < 1e-12 * x.norm());
    }
}

TEST_CASE("apply is linear") {
    const int dim = 8;
    const auto l = ladder_ops(dim);
    const FockOperator op = l.a + Complex(0.0, 0.7) * l.number;
    for (unsigned seed = 1; seed <= 10; ++seed) {
        const State x = random_state(dim, seed);
        const State y = random_state(dim, seed + 31);
        const Complex al(0.3, -1.2), be(-0.8, 0.45);
        const State lhs = op.apply(al * x + be * y);
        const State rhs = al * op.apply(x) + be * op.apply(y);
        CHECK((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }
}

TEST_CASE("operator construction validates entries") {
    CHECK_THROWS_AS(FockOperator(3, {Triplet(3, 0, Complex(1.0, 0.0))}), std::out_of_range);
    CHECK_THROWS_AS(
        FockOperator(3, {Triplet(0, 0, Complex(std::nan(""), 0.0))}),
        std::invalid_argument);
    const auto l = ladder_ops(4);
    CHECK(l.number.symmetry() == FockOperator::Symmetry::Hermitian);
    CHECK(l.a.symmetry() == FockOperator::Symmetry::General);
    CHECK(l.number.hermiticity_defect() == 0.0);
    CHECK(l.a.bandwidth() == 1);
    CHECK((l.a * l.a).bandwidth() == 2);
}

TEST_CASE("state helpers") {
    const State e2 = basis_state(5, 2);
    CHECK(squared_norm(e2) == 1.0);
    CHECK(is_normalized(e2));
    CHECK(expect_real(ladder_ops(5).number, e2) == Approx(2.0));
    CHECK_THROWS_AS(basis_state(5, 7), std::out_of_range);
    // antilinear in the first argument
    const State x = random_state(5, 9), y = random_state(5, 10);
    CHECK(std::abs(inner(x, y) - std::conj(inner(y, x))) < 1e-14);
}
