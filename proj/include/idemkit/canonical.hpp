#pragma once

#include "idemkit/idempotent.hpp"

namespace idemkit::canon {

using idem::Idempotent;

/// The 4-block normal form of a non-projection idempotent:
///   V Q V*    = I_{h1} + 0_{h4} + [[D, -l(D)], [l(D), I-D]]
///   V m(Q) V* = I_{h1} + 0_{h4} + I_{h5} + 0_{h5}
/// with D >= I, N(D - I) = {0}, and l(t) = sqrt(t^2 - t).
struct CanonicalForm {
    Matrix V; // unitary, n x n
    Eigen::Index h1 = 0, h4 = 0, h5 = 0;
    Matrix D; // Hermitian h5 x h5
};

/// Construction: block form, SVD of the A block splitting zero from nonzero
/// singular values, per-pair scalars C -> B=(I+C^2)^{1/2} -> D=(I+B)/2, then
/// the 2x2 unitary symmetry W folding [[1, c], [0, 0]] into the D-block shape.
/// IsProjection when |A| is below tol (the normal form needs a non-projection).
CanonicalForm canonical_form(const Idempotent& Q, double split_tol = linalg::kRankTol);

/// V* (I_{h1} + 0_{h4} + [[D,-l(D)],[l(D),I-D]]) V — the idempotent the form encodes.
Matrix assemble(const CanonicalForm& cf);
/// V* (I_{h1} + 0_{h4} + I_{h5} + 0_{h5}) V — the matched projection it encodes.
Matrix assemble_matched(const CanonicalForm& cf);

/// Orthonormal bases of the invariant subspaces, built independently of
/// canonical_form: H1 = R(Q) ∩ R(Q*), H4 = N(Q) ∩ N(Q*),
/// H5 = R(m(Q) Q (I-m(Q))), H6 = R((I-m(Q)) Q m(Q)).
struct Subspaces {
    Matrix H1, H4, H5, H6;
};
Subspaces invariant_subspaces(const Idempotent& Q, double gap_tol = linalg::kGapTol);

/// Checks that the top eigenspace of D and the l(|D|)-eigenspace of l(D)
/// coincide. near_identity flags |D| <= 1 + tol, where l(|D|) ~ 0 and the
/// comparison degenerates.
struct EigenTransfer {
    bool ok = false;
    bool near_identity = false;
    double subspace_gap = 0.0;
};
EigenTransfer verify_eigen_transfer(const Matrix& D, double tol);

} // namespace idemkit::canon
