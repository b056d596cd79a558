#pragma once

#include <cstdint>

#include "idemkit/linalg.hpp"
#include "idemkit/types.hpp"

namespace idemkit::idem {

/// Validated idempotent with its recorded defect |Q^2 - Q| and norm |Q|.
struct Idempotent {
    Matrix Q;
    double defect = 0.0;
    double norm = 0.0;
    bool projection = false;

    Eigen::Index dim() const { return Q.rows(); }
};

inline double default_idem_tol(double norm) { return 1e-9 * (1.0 + norm * norm); }

/// Checks Q^2 = Q within idem_tol (default 1e-9 * (1 + |Q|^2)) and classifies
/// projections by the additional test |Q - Q*| <= idem_tol.
Idempotent validate(const Matrix& Q, double idem_tol = -1.0);

/// Column-block coordinates of a (possibly non-projection) idempotent:
/// [U1 U2] unitary, U1 spans R(Q), U2 spans N(Q*), and
/// [U1 U2]* Q [U1 U2] = [[I, A], [0, 0]] with B = (I + A A*)^{1/2}.
struct BlockForm {
    Matrix U1, U2;
    Matrix A;
    Matrix B;
};
BlockForm block_form(const Idempotent& Q, double rank_tol = linalg::kRankTol);

/// W* [[I, A], [0, 0]] W for Haar-random W and random A scaled so |A| = a.
Idempotent random_idempotent(int n, int k, double a, std::uint64_t seed);

/// The matched projection m(Q) = (1/2)(|Q*|+Q*) |Q*|^dag (|Q*|+I)^{-1} (|Q*|+Q).
Matrix matched_projection(const Idempotent& Q);

/// m(Q_s) through the block formula, where Q_s carries the scaled block s*A.
/// s = 1 recovers m(Q); the s-family is the first leg of the distance solver.
Matrix matched_projection_block(const BlockForm& bf, double s = 1.0);

/// P_{R(Q)} = Q (Q + Q* - I)^{-1} and P_{N(Q)} = (Q - I)(Q + Q* - I)^{-1}.
/// SingularPencil when the inverse exceeds cond_cap (defect too large).
Matrix range_projection(const Idempotent& Q, double cond_cap = 1e6);
Matrix null_projection(const Idempotent& Q, double cond_cap = 1e6);

/// Q rebuilt from P_{R(Q)} and m(Q) alone:
/// [P (2m - I) P]^dag P (2m - I). Exists to exercise that identity.
Matrix reconstruct_from_matched(const Idempotent& Q, double rank_tol = linalg::kRankTol);

} // namespace idemkit::idem
