#include <doctest.h>

#include <cmath>

#include "idemkit/idempotent.hpp"
#include "idemkit/rng.hpp"
#include "test_helpers.hpp"

using namespace idemkit;
using test::mat2;

namespace {
const double kSqrt2 = std::sqrt(2.0);

// The 2x2 workhorse: Q = [[1,1],[0,0]], |Q| = sqrt(2), B = sqrt(2).
const Matrix kQ21 = test::mat2(1, 1, 0, 0);
} // namespace

TEST_CASE("validate: projections, skew idempotents, rejects") {
    auto P = idem::validate(mat2(1, 0, 0, 0));
    CHECK(P.projection);
    CHECK(P.norm == doctest::Approx(1.0));

    auto Q = idem::validate(kQ21);
    CHECK_FALSE(Q.projection);
    CHECK(Q.norm == doctest::Approx(kSqrt2)); // top eigenvalue of QQ* is 2

    CHECK_THROWS_AS(idem::validate(mat2(1, 1, 0, 1)), errors::NotIdempotent);
    CHECK_THROWS_AS(idem::validate(Matrix::Ones(2, 3)), errors::BadDims);
}

TEST_CASE("random_idempotent: controlled norm and errors") {
    auto P = idem::random_idempotent(2, 1, 0.0, 5);
    CHECK(P.projection);

    auto Q = idem::random_idempotent(4, 2, 1.0, 5);
    CHECK(Q.norm == doctest::Approx(kSqrt2).epsilon(1e-10)); // |Q| = sqrt(1+|A|^2)
    CHECK(Q.defect <= idem::default_idem_tol(Q.norm));

    CHECK_THROWS_AS(idem::random_idempotent(3, 3, 1.0, 5), errors::BadDims);
    CHECK_THROWS_AS(idem::random_idempotent(3, 0, 1.0, 5), errors::BadDims);
}

TEST_CASE("block_form: unitary frame and the [[I,A],[0,0]] shape") {
    auto Q = idem::random_idempotent(9, 4, 1.7, 21);
    auto bf = idem::block_form(Q);
    Matrix U(9, 9);
    U << bf.U1, bf.U2;
    CHECK(test::dist(U * U.adjoint(), Matrix::Identity(9, 9)) <= 1e-12);
    Matrix blocked = U.adjoint() * Q.Q * U;
    CHECK(test::dist(blocked.topLeftCorner(4, 4), Matrix::Identity(4, 4)) <= 1e-11);
    CHECK(blocked.bottomRows(5).norm() <= 1e-11);
    CHECK(test::dist(blocked.topRightCorner(4, 5), bf.A) <= 1e-12);
    // B >= I
    auto eg = linalg::herm_eig(bf.B);
    CHECK(eg.values(0) >= 1.0 - 1e-12);
    CHECK(linalg::operator_norm(bf.A) == doctest::Approx(1.7).epsilon(1e-10));
}

TEST_CASE("matched_projection: fixes projections, frozen 2x2 value") {
    auto P = idem::random_idempotent(5, 2, 0.0, 8);
    CHECK(test::dist(idem::matched_projection(P), P.Q) <= 1e-11);

    // Block formula with B = sqrt(2): m = [[(2+s)/4, s/4], [s/4, (2-s)/4]], s = sqrt(2).
    Matrix expected = mat2((2 + kSqrt2) / 4, kSqrt2 / 4, kSqrt2 / 4, (2 - kSqrt2) / 4);
    auto Q = idem::validate(kQ21);
    CHECK_MATRIX_NEAR(idem::matched_projection(Q), expected, 1e-13);
    CHECK_MATRIX_NEAR(idem::matched_projection_block(idem::block_form(Q)), expected, 1e-13);
}

TEST_CASE("matched_projection laws on random idempotents") {
    for (std::uint64_t seed : {1, 2, 3}) {
        auto Q = idem::random_idempotent(11, 4, 0.5 + 1.1 * double(seed), seed);
        const Matrix I = Matrix::Identity(11, 11);
        Matrix m = idem::matched_projection(Q);
        const double tol = 1e-10 * (1 + Q.norm * Q.norm);

        CHECK(test::dist(m * m, m) <= tol);
        CHECK(test::dist(m, m.adjoint()) <= tol);
        // m(Q*) = m(Q), m(I-Q) = I - m(Q)
        CHECK(test::dist(idem::matched_projection(idem::validate(Matrix(Q.Q.adjoint()))), m) <= tol);
        CHECK(test::dist(idem::matched_projection(idem::validate(I - Q.Q)), I - m) <= tol);
        // m(Q) Q = (|Q| + Q)/2
        Matrix absQ = linalg::psd_sqrt(Q.Q.adjoint() * Q.Q);
        CHECK(test::dist(m * Q.Q, (absQ + Q.Q) / 2.0) <= tol);
        // R(m(Q)) = R(|Q*| + Q*) as projections
        Matrix absQs = linalg::psd_sqrt(Q.Q * Q.Q.adjoint());
        Matrix rb = linalg::range_basis(absQs + Q.Q.adjoint());
        CHECK(test::dist(rb * rb.adjoint(), m) <= 1e-9 * (1 + Q.norm * Q.norm));
        // H2 = R(m) ∩ N(Q) and H3 = N(m) ∩ R(Q) are trivial
        Matrix mb = linalg::range_basis(m);
        Matrix mk = linalg::kernel_basis(m);
        CHECK(linalg::intersect_subspaces(mb, linalg::kernel_basis(Q.Q)).cols() == 0);
        CHECK(linalg::intersect_subspaces(mk, linalg::range_basis(Q.Q)).cols() == 0);
    }
}

TEST_CASE("range and null projections") {
    auto P = idem::random_idempotent(6, 3, 0.0, 33);
    const Matrix I = Matrix::Identity(6, 6);
    CHECK(test::dist(idem::range_projection(P), P.Q) <= 1e-11);
    CHECK(test::dist(idem::null_projection(P), I - P.Q) <= 1e-11);

    // Q = [[1,1],[0,0]]: Q + Q* - I = [[1,1],[1,-1]], inverse worked by hand.
    auto Q = idem::validate(kQ21);
    CHECK_MATRIX_NEAR(idem::range_projection(Q), mat2(1, 0, 0, 0), 1e-13);
    CHECK_MATRIX_NEAR(idem::null_projection(Q), mat2(0.5, -0.5, -0.5, 0.5), 1e-13);

    Matrix P1 = idem::range_projection(Q);
    CHECK(test::dist(P1 * Q.Q, Q.Q) <= 1e-12);
    CHECK(linalg::operator_norm(Q.Q * idem::null_projection(Q)) <= 1e-12);
}

TEST_CASE("reconstruct_from_matched recovers Q") {
    auto P = idem::random_idempotent(5, 2, 0.0, 44);
    CHECK(test::dist(idem::reconstruct_from_matched(P), P.Q) <= 1e-10);

    auto Q = idem::validate(kQ21);
    CHECK(test::dist(idem::reconstruct_from_matched(Q), Q.Q) <= 1e-10);

    auto R = idem::random_idempotent(6, 3, 2.0, 45);
    CHECK(test::dist(idem::reconstruct_from_matched(R), R.Q) <= 1e-8);
}
