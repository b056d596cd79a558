#pragma once

#include <functional>

#include "idemkit/errors.hpp"
#include "idemkit/types.hpp"

namespace idemkit::linalg {

inline constexpr double kRankTol = 1e-10;   // relative singular-value cutoff
inline constexpr double kSymTol = 1e-10;    // relative Hermitian-defect gate
inline constexpr double kGapTol = 1e-8;     // eigenvalue-1 window for subspace intersection

struct HermEig {
    RealVector values; // ascending
    Matrix vectors;    // unitary, columns paired with values
};

/// Spectral decomposition of a Hermitian matrix. Throws NotHermitian when the
/// Hermitian defect exceeds sym_tol relative to the norm, NoConvergence on
/// solver failure.
HermEig herm_eig(const Matrix& M, double sym_tol = kSymTol);

/// Moore-Penrose inverse via SVD; rank decided by sigma > rank_tol * sigma_max.
Matrix moore_penrose(const Matrix& M, double rank_tol = kRankTol);

/// f applied through the spectral decomposition: V diag(f(lambda)) V*.
/// DomainError when f is non-finite at a computed eigenvalue.
Matrix func_calculus(const Matrix& M, const std::function<double(double)>& f,
                     double sym_tol = kSymTol);

/// Square root of a PSD matrix with the rank decision taken on the eigenvalues
/// *before* the square root. Roundoff noise in a zero eigenvalue of M sits at
/// eps*|M|, which sqrt would amplify to sqrt(eps) -- past any sane singular
/// value cutoff. Flooring first keeps the kernel exact.
Matrix psd_sqrt(const Matrix& M, double rank_tol = kRankTol);

double operator_norm(const Matrix& M);

Matrix positive_part(const Matrix& T, double sym_tol = kSymTol);
Matrix negative_part(const Matrix& T, double sym_tol = kSymTol);

struct Polar {
    Matrix isometry; // partial isometry V with M = V|M|
    Matrix abs;      // |M| = (M*M)^{1/2}
};
Polar polar(const Matrix& M, double rank_tol = kRankTol);

/// Orthonormal basis of the range (columns) resp. kernel.
Matrix range_basis(const Matrix& M, double rank_tol = kRankTol);
Matrix kernel_basis(const Matrix& M, double rank_tol = kRankTol);

/// Intersection of two subspaces given by orthonormal bases X, Y: the
/// eigenvalue-1 eigenspace of P_X P_Y P_X, accepted within gap_tol.
Matrix intersect_subspaces(const Matrix& X, const Matrix& Y, double gap_tol = kGapTol);

bool all_finite(const Matrix& M);

} // namespace idemkit::linalg
