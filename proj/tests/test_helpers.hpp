#pragma once

#include <doctest.h>

#include "idemkit/linalg.hpp"
#include "idemkit/types.hpp"

namespace idemkit::test {

inline double dist(const Matrix& A, const Matrix& B) { return linalg::operator_norm(A - B); }

inline Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
    Matrix M(2, 2);
    M << a, b, c, d;
    return M;
}

#define CHECK_MATRIX_NEAR(A, B, tol) CHECK(idemkit::test::dist((A), (B)) <= (tol))

} // namespace idemkit::test
