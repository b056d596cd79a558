#include "idemkit/canonical.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "idemkit/errors.hpp"

namespace idemkit::canon {

using linalg::operator_norm;

CanonicalForm canonical_form(const Idempotent& Q, double split_tol) {
    const Eigen::Index n = Q.dim();
    idem::BlockForm bf = idem::block_form(Q);
    const Eigen::Index k = bf.U1.cols();

    Eigen::JacobiSVD<Matrix> svd(bf.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
    if (smax <= idem::default_idem_tol(Q.norm))
        throw errors::IsProjection("canonical_form: Q is a projection within tolerance");
    Eigen::Index h5 = 0;
    while (h5 < sigma.size() && sigma(h5) > split_tol * smax) ++h5;

    CanonicalForm cf;
    cf.h5 = h5;
    cf.h1 = k - h5;
    cf.h4 = (n - k) - h5;

    // Rotated block coordinates: Q acts as [[1, sigma_i], [0, 0]] on each
    // (X1_i, X2_i) pair and as 1 / 0 on the leftover range / null directions.
    Matrix X1 = bf.U1 * svd.matrixU();
    Matrix X2 = bf.U2 * svd.matrixV();

    cf.D = Matrix::Zero(h5, h5);
    Matrix Z(n, n); // columns ordered H1 | H4 | H5 | H6
    for (Eigen::Index i = 0; i < cf.h1; ++i) Z.col(i) = X1.col(h5 + i);
    for (Eigen::Index i = 0; i < cf.h4; ++i) Z.col(cf.h1 + i) = X2.col(h5 + i);
    for (Eigen::Index i = 0; i < h5; ++i) {
        const double c = sigma(i);
        const double B = std::sqrt(1.0 + c * c);
        const double D = 0.5 * (1.0 + B);
        cf.D(i, i) = D;
        const double w11 = std::sqrt(D / B);
        const double w12 = std::sqrt((D - 1.0) / B);
        Z.col(cf.h1 + cf.h4 + i) = w11 * X1.col(i) + w12 * X2.col(i);
        Z.col(cf.h1 + cf.h4 + h5 + i) = w12 * X1.col(i) - w11 * X2.col(i);
    }
    cf.V = Z.adjoint();
    return cf;
}

namespace {

Matrix blocks_of(const CanonicalForm& cf, bool matched) {
    const Eigen::Index n = cf.h1 + cf.h4 + 2 * cf.h5;
    Matrix M = Matrix::Zero(n, n);
    M.topLeftCorner(cf.h1, cf.h1) = Matrix::Identity(cf.h1, cf.h1);
    const Eigen::Index off = cf.h1 + cf.h4;
    if (matched) {
        M.block(off, off, cf.h5, cf.h5) = Matrix::Identity(cf.h5, cf.h5);
        return M;
    }
    Matrix I5 = Matrix::Identity(cf.h5, cf.h5);
    Matrix L = linalg::func_calculus(cf.D, [](double t) { return std::sqrt(t * t - t); });
    M.block(off, off, cf.h5, cf.h5) = cf.D;
    M.block(off, off + cf.h5, cf.h5, cf.h5) = -L;
    M.block(off + cf.h5, off, cf.h5, cf.h5) = L;
    M.block(off + cf.h5, off + cf.h5, cf.h5, cf.h5) = I5 - cf.D;
    return M;
}

} // namespace

Matrix assemble(const CanonicalForm& cf) { return cf.V.adjoint() * blocks_of(cf, false) * cf.V; }

Matrix assemble_matched(const CanonicalForm& cf) {
    return cf.V.adjoint() * blocks_of(cf, true) * cf.V;
}

Subspaces invariant_subspaces(const Idempotent& Q, double gap_tol) {
    const Eigen::Index n = Q.dim();
    const Matrix I = Matrix::Identity(n, n);
    Matrix m = idem::matched_projection(Q);
    Matrix rQ = linalg::range_basis(Q.Q);
    Matrix rQs = linalg::range_basis(Q.Q.adjoint());
    Matrix nQ = linalg::kernel_basis(Q.Q);
    Matrix nQs = linalg::kernel_basis(Q.Q.adjoint());
    Subspaces s;
    s.H1 = linalg::intersect_subspaces(rQ, rQs, gap_tol);
    s.H4 = linalg::intersect_subspaces(nQ, nQs, gap_tol);
    s.H5 = linalg::range_basis(m * Q.Q * (I - m));
    s.H6 = linalg::range_basis((I - m) * Q.Q * m);
    return s;
}

EigenTransfer verify_eigen_transfer(const Matrix& D, double tol) {
    EigenTransfer r;
    const double d = operator_norm(D);
    if (d <= 1.0 + tol) {
        r.near_identity = true;
        r.ok = true;
        return r;
    }
    Matrix L = linalg::func_calculus(D, [](double t) { return std::sqrt(std::max(t * t - t, 0.0)); });
    const double ld = std::sqrt(d * d - d);
    linalg::HermEig egD = linalg::herm_eig(D);
    linalg::HermEig egL = linalg::herm_eig(L);
    auto top_space = [&](const linalg::HermEig& eg, double at) {
        Eigen::Index first = eg.values.size();
        while (first > 0 && eg.values(first - 1) >= at - tol) --first;
        return Matrix(eg.vectors.rightCols(eg.values.size() - first));
    };
    Matrix UD = top_space(egD, d);
    Matrix UL = top_space(egL, ld);
    if (UD.cols() != UL.cols()) {
        r.subspace_gap = 1.0;
        return r;
    }
    r.subspace_gap = operator_norm(UD * UD.adjoint() - UL * UL.adjoint());
    r.ok = r.subspace_gap <= tol;
    return r;
}

} // namespace idemkit::canon
