#include <doctest.h>

#include <cmath>

#include "idemkit/canonical.hpp"
#include "idemkit/rng.hpp"
#include "test_helpers.hpp"

using namespace idemkit;
using test::mat2;

namespace {
const double kSqrt2 = std::sqrt(2.0);

Matrix direct_sum(const Matrix& A, const Matrix& B) {
    Matrix M = Matrix::Zero(A.rows() + B.rows(), A.cols() + B.cols());
    M.topLeftCorner(A.rows(), A.cols()) = A;
    M.bottomRightCorner(B.rows(), B.cols()) = B;
    return M;
}
} // namespace

TEST_CASE("canonical_form: the 2x2 seed case") {
    auto Q = idem::validate(mat2(1, 1, 0, 0));
    auto cf = canon::canonical_form(Q);
    CHECK(cf.h1 == 0);
    CHECK(cf.h4 == 0);
    CHECK(cf.h5 == 1);
    // C = 1, B = sqrt(2), D = (1 + sqrt(2)) / 2
    CHECK(std::real(cf.D(0, 0)) == doctest::Approx((1 + kSqrt2) / 2).epsilon(1e-12));
    CHECK(test::dist(canon::assemble(cf), Q.Q) <= 1e-12);
    CHECK(test::dist(canon::assemble_matched(cf), idem::matched_projection(Q)) <= 1e-12);
}

TEST_CASE("canonical_form: direct sums split into h1/h4") {
    Matrix Q4 = direct_sum(mat2(1, 1, 0, 0), mat2(1, 0, 0, 0));
    auto Q = idem::validate(Q4);
    auto cf = canon::canonical_form(Q);
    CHECK(cf.h1 == 1);
    CHECK(cf.h4 == 1);
    CHECK(cf.h5 == 1);
    CHECK(std::real(cf.D(0, 0)) == doctest::Approx((1 + kSqrt2) / 2).epsilon(1e-12));
    CHECK(test::dist(canon::assemble(cf), Q4) <= 1e-12);
}

TEST_CASE("canonical_form refuses projections") {
    auto P = idem::random_idempotent(4, 2, 0.0, 9);
    CHECK_THROWS_AS(canon::canonical_form(P), errors::IsProjection);
}

TEST_CASE("canonical reconstruction and norm identities on random idempotents") {
    for (auto [n, k, a, seed] : {std::tuple{8, 3, 0.4, 50}, std::tuple{20, 9, 1.8, 51},
                                 std::tuple{60, 25, 3.5, 52}}) {
        auto Q = idem::random_idempotent(n, k, a, static_cast<std::uint64_t>(seed));
        auto cf = canon::canonical_form(Q);
        CHECK(cf.h1 + cf.h4 + 2 * cf.h5 == n);
        CHECK(test::dist(canon::assemble(cf), Q.Q) <= 1e-8 * (1 + Q.norm));
        CHECK(test::dist(canon::assemble_matched(cf), idem::matched_projection(Q)) <=
              1e-8 * (1 + Q.norm));
        CHECK(test::dist(cf.V * cf.V.adjoint(), Matrix::Identity(n, n)) <= 1e-11);
        const double normD = linalg::operator_norm(cf.D);
        // |Q| = max(1, 2|D| - 1) and |D| = (|Q| + 1)/2
        CHECK(Q.norm == doctest::Approx(std::max(1.0, 2 * normD - 1)).epsilon(1e-10));
        CHECK(normD == doctest::Approx((Q.norm + 1) / 2).epsilon(1e-10));
        // D >= I with trivial kernel of D - I
        auto eg = linalg::herm_eig(cf.D);
        CHECK(eg.values(0) > 1.0);
    }
}

TEST_CASE("invariant subspaces match the form and reconstitute m(Q)") {
    auto Q = idem::random_idempotent(12, 5, 1.2, 77);
    auto cf = canon::canonical_form(Q);
    auto sub = canon::invariant_subspaces(Q);
    CHECK(sub.H1.cols() == cf.h1);
    CHECK(sub.H4.cols() == cf.h4);
    CHECK(sub.H5.cols() == cf.h5);
    CHECK(sub.H6.cols() == cf.h5);
    // mutual orthogonality
    CHECK(Matrix(sub.H1.adjoint() * sub.H4).norm() <= 1e-10);
    CHECK(Matrix(sub.H1.adjoint() * sub.H5).norm() <= 1e-9);
    CHECK(Matrix(sub.H1.adjoint() * sub.H6).norm() <= 1e-9);
    CHECK(Matrix(sub.H4.adjoint() * sub.H5).norm() <= 1e-9);
    CHECK(Matrix(sub.H4.adjoint() * sub.H6).norm() <= 1e-9);
    CHECK(Matrix(sub.H5.adjoint() * sub.H6).norm() <= 1e-9);
    // P_H1 + P_H5 = m(Q)
    Matrix m = idem::matched_projection(Q);
    CHECK(test::dist(sub.H1 * sub.H1.adjoint() + sub.H5 * sub.H5.adjoint(), m) <= 1e-9);
}

TEST_CASE("invariant subspaces of the projection-free 2x2 case") {
    auto sub = canon::invariant_subspaces(idem::validate(mat2(1, 1, 0, 0)));
    CHECK(sub.H1.cols() == 0);
    CHECK(sub.H4.cols() == 0);
    CHECK(sub.H5.cols() == 1);
    CHECK(sub.H6.cols() == 1);
}

TEST_CASE("appending identity or zero blocks shifts h1/h4") {
    Matrix base = mat2(1, 1, 0, 0);
    auto cf0 = canon::canonical_form(idem::validate(base));

    Matrix plus_one = direct_sum(base, Matrix::Identity(1, 1));
    auto cf1 = canon::canonical_form(idem::validate(plus_one));
    CHECK(cf1.h1 == cf0.h1 + 1);
    CHECK(cf1.h4 == cf0.h4);

    Matrix plus_zero = direct_sum(base, Matrix::Zero(1, 1));
    auto cf2 = canon::canonical_form(idem::validate(plus_zero));
    CHECK(cf2.h4 == cf0.h4 + 1);
    CHECK(cf2.h1 == cf0.h1);
}

TEST_CASE("eigen transfer between D and l(D)") {
    auto r = canon::verify_eigen_transfer(mat2(1, 0, 0, 2), 1e-8);
    CHECK(r.ok);
    CHECK_FALSE(r.near_identity);

    Matrix nearly = mat2(1.0, 0, 0, 1.0 + 1e-12);
    r = canon::verify_eigen_transfer(nearly, 1e-8);
    CHECK(r.near_identity);

    auto gen = rng::engine(5);
    Matrix U = rng::haar_unitary(6, gen);
    RealVector vals(6);
    vals << 1.0, 1.3, 1.7, 2.2, 2.9, 3.4;
    Matrix D = U * vals.asDiagonal() * U.adjoint();
    r = canon::verify_eigen_transfer((D + D.adjoint()) / 2.0, 1e-8);
    CHECK(r.ok);
}

TEST_CASE("the D_a comparison chain") {
    // D_a = (D - aI)/|D - aI| is positive definite for a < d/(2d-1), and
    // D_a - l(D)/l(d) factors as A (dI - D) with A positive definite.
    auto gen = rng::engine(6);
    Matrix U = rng::haar_unitary(5, gen);
    RealVector vals(5);
    vals << 1.1, 1.5, 2.0, 2.6, 3.0;
    Matrix D = U * vals.asDiagonal() * U.adjoint();
    D = (D + D.adjoint()) / 2.0;
    const double d = linalg::operator_norm(D);
    const double ld = std::sqrt(d * d - d);
    const Matrix I = Matrix::Identity(5, 5);
    Matrix L = linalg::func_calculus(D, [](double t) { return std::sqrt(t * t - t); });

    for (double a : {-1.0, 0.0, 0.3, d / (2 * d - 1) - 1e-3}) {
        Matrix Da = (D - a * I) / linalg::operator_norm(D - a * I);
        auto eg = linalg::herm_eig(Da);
        CHECK(eg.values(0) > 0.0);
        Matrix lhs = Da - L / ld;
        Matrix A = ((d - a) * (d - a) * ld * ld * (Da + L / ld)).inverse() *
                   ((a * a - 2 * d * a + d) * D + a * a * (d - 1) * I);
        A = (A + A.adjoint()) / 2.0;
        CHECK(test::dist(lhs, A * (d * I - D)) <= 1e-10);
        auto egA = linalg::herm_eig(A);
        CHECK(egA.values(0) > 0.0);
    }
}
