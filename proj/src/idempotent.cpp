#include "idemkit/idempotent.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "idemkit/errors.hpp"
#include "idemkit/rng.hpp"

namespace idemkit::idem {

using linalg::operator_norm;

Idempotent validate(const Matrix& Q, double idem_tol) {
    if (Q.rows() != Q.cols()) throw errors::BadDims("validate: idempotent must be square");
    if (!linalg::all_finite(Q)) throw errors::BadParam("validate: non-finite entries");
    Idempotent out;
    out.Q = Q;
    out.norm = operator_norm(Q);
    out.defect = operator_norm(Q * Q - Q);
    const double tol = idem_tol > 0 ? idem_tol : default_idem_tol(out.norm);
    if (out.defect > tol)
        throw errors::NotIdempotent("validate: |Q^2-Q| = " + std::to_string(out.defect));
    out.projection = operator_norm(Q - Q.adjoint()) <= tol;
    return out;
}

BlockForm block_form(const Idempotent& Q, double rank_tol) {
    // Left singular vectors give R(Q) and its orthocomplement N(Q*) in one pass.
    Eigen::JacobiSVD<Matrix> svd(Q.Q, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    const double cutoff = rank_tol * (s.size() > 0 ? s(0) : 0.0);
    Eigen::Index k = 0;
    while (k < s.size() && s(k) > cutoff) ++k;
    BlockForm bf;
    bf.U1 = svd.matrixU().leftCols(k);
    bf.U2 = svd.matrixU().rightCols(Q.dim() - k);
    bf.A = bf.U1.adjoint() * Q.Q * bf.U2;
    bf.B = linalg::psd_sqrt(Matrix::Identity(k, k) + bf.A * bf.A.adjoint());
    return bf;
}

Idempotent random_idempotent(int n, int k, double a, std::uint64_t seed) {
    if (n < 2 || k < 1 || k > n - 1)
        throw errors::BadDims("random_idempotent: need 1 <= k <= n-1");
    if (a < 0) throw errors::BadParam("random_idempotent: skew magnitude must be >= 0");
    auto gen = rng::engine(seed);
    Matrix A = rng::gaussian(k, n - k, gen);
    double na = operator_norm(A);
    if (a == 0.0 || na == 0.0)
        A.setZero();
    else
        A *= a / na;
    Matrix blocked = Matrix::Zero(n, n);
    blocked.topLeftCorner(k, k) = Matrix::Identity(k, k);
    blocked.topRightCorner(k, n - k) = A;
    Matrix W = rng::haar_unitary(n, gen);
    return validate(W * blocked * W.adjoint());
}

Matrix matched_projection(const Idempotent& Q) {
    const Eigen::Index n = Q.dim();
    const Matrix I = Matrix::Identity(n, n);
    Matrix G = Q.Q * Q.Q.adjoint();
    G = (G + G.adjoint()) / 2.0;
    // |Q*| and |Q*|^dag from one spectral pass, rank decided before the sqrt.
    linalg::HermEig eg = linalg::herm_eig(G);
    const double top = eg.values(eg.values.size() - 1);
    RealVector root(eg.values.size()), inv(eg.values.size());
    for (Eigen::Index i = 0; i < eg.values.size(); ++i) {
        if (eg.values(i) > linalg::kRankTol * top) {
            root(i) = std::sqrt(eg.values(i));
            inv(i) = 1.0 / root(i);
        } else {
            root(i) = 0.0;
            inv(i) = 0.0;
        }
    }
    Matrix absQs = eg.vectors * root.asDiagonal() * eg.vectors.adjoint();
    Matrix pinv = eg.vectors * inv.asDiagonal() * eg.vectors.adjoint();
    Matrix m = 0.5 * (absQs + Q.Q.adjoint()) * pinv * (absQs + I).inverse() * (absQs + Q.Q);
    return (m + m.adjoint()) / 2.0;
}

Matrix matched_projection_block(const BlockForm& bf, double s) {
    const Eigen::Index k = bf.U1.cols();
    const Matrix Ik = Matrix::Identity(k, k);
    Matrix As = s * bf.A;
    Matrix Bs = linalg::psd_sqrt(Ik + As * As.adjoint());
    Matrix Binv = Bs.inverse();
    Matrix M11 = 0.5 * (Bs + Ik) * Binv;
    Matrix M12 = 0.5 * Binv * As;
    Matrix M22 = 0.5 * As.adjoint() * (Bs * (Bs + Ik)).inverse() * As;
    const Eigen::Index n = bf.U1.rows();
    Matrix U(n, n);
    U << bf.U1, bf.U2;
    Matrix blocked(n, n);
    blocked.topLeftCorner(k, k) = M11;
    blocked.topRightCorner(k, n - k) = M12;
    blocked.bottomLeftCorner(n - k, k) = M12.adjoint();
    blocked.bottomRightCorner(n - k, n - k) = M22;
    Matrix m = U * blocked * U.adjoint();
    return (m + m.adjoint()) / 2.0;
}

namespace {

Matrix pencil_inverse(const Idempotent& Q, double cond_cap) {
    const Matrix I = Matrix::Identity(Q.dim(), Q.dim());
    Matrix S = Q.Q + Q.Q.adjoint() - I;
    Matrix Sinv = S.inverse();
    // (Q + Q* - I)^2 >= I for exact idempotents, so a large inverse only
    // appears when the idempotent defect has corrupted the pencil.
    if (!linalg::all_finite(Sinv) || operator_norm(Sinv) > cond_cap)
        throw errors::SingularPencil("range/null projection: Q + Q* - I badly conditioned");
    return Sinv;
}

} // namespace

Matrix range_projection(const Idempotent& Q, double cond_cap) {
    Matrix P = Q.Q * pencil_inverse(Q, cond_cap);
    return (P + P.adjoint()) / 2.0;
}

Matrix null_projection(const Idempotent& Q, double cond_cap) {
    const Matrix I = Matrix::Identity(Q.dim(), Q.dim());
    Matrix P = (Q.Q - I) * pencil_inverse(Q, cond_cap);
    return (P + P.adjoint()) / 2.0;
}

Matrix reconstruct_from_matched(const Idempotent& Q, double rank_tol) {
    const Matrix I = Matrix::Identity(Q.dim(), Q.dim());
    Matrix P = range_projection(Q);
    Matrix m = matched_projection(Q);
    Matrix T = 2.0 * m - I;
    Matrix S1 = P * T * P;
    Matrix S2 = P * T;
    return linalg::moore_penrose((S1 + S1.adjoint()) / 2.0, rank_tol) * S2;
}

} // namespace idemkit::idem
