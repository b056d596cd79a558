#include "idemkit/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace idemkit::linalg {

namespace {

double herm_defect(const Matrix& M) { return (M - M.adjoint()).norm(); }

} // namespace

bool all_finite(const Matrix& M) { return M.allFinite(); }

HermEig herm_eig(const Matrix& M, double sym_tol) {
    if (M.rows() != M.cols()) throw errors::BadDims("herm_eig: matrix not square");
    const double scale = M.norm();
    if (herm_defect(M) > sym_tol * (1.0 + scale))
        throw errors::NotHermitian("herm_eig: Hermitian defect above tolerance");
    Matrix H = (M + M.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    if (es.info() != Eigen::Success)
        throw errors::NoConvergence("herm_eig: eigensolver did not converge");
    return HermEig{es.eigenvalues(), es.eigenvectors()};
}

Matrix moore_penrose(const Matrix& M, double rank_tol) {
    if (rank_tol <= 0) throw errors::BadParam("moore_penrose: rank_tol must be positive");
    if (M.size() == 0) return M.adjoint();
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = rank_tol * (s.size() > 0 ? s(0) : 0.0);
    RealVector inv = RealVector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Matrix func_calculus(const Matrix& M, const std::function<double(double)>& f, double sym_tol) {
    HermEig eg = herm_eig(M, sym_tol);
    RealVector mapped(eg.values.size());
    for (Eigen::Index i = 0; i < eg.values.size(); ++i) {
        double y = f(eg.values(i));
        if (!std::isfinite(y))
            throw errors::DomainError("func_calculus: f undefined at eigenvalue " +
                                      std::to_string(eg.values(i)));
        mapped(i) = y;
    }
    return eg.vectors * mapped.asDiagonal() * eg.vectors.adjoint();
}

Matrix psd_sqrt(const Matrix& M, double rank_tol) {
    HermEig eg = herm_eig(M);
    const double top = eg.values.size() ? std::abs(eg.values(eg.values.size() - 1)) : 0.0;
    RealVector r(eg.values.size());
    for (Eigen::Index i = 0; i < eg.values.size(); ++i) {
        double v = eg.values(i);
        r(i) = (v > rank_tol * top) ? std::sqrt(v) : 0.0;
    }
    return eg.vectors * r.asDiagonal() * eg.vectors.adjoint();
}

double operator_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    Matrix G = M.adjoint() * M;
    G = (G + G.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
    double top = es.eigenvalues()(es.eigenvalues().size() - 1);
    return top > 0 ? std::sqrt(top) : 0.0;
}

Matrix positive_part(const Matrix& T, double sym_tol) {
    return func_calculus(T, [](double t) { return t > 0 ? t : 0.0; }, sym_tol);
}

Matrix negative_part(const Matrix& T, double sym_tol) {
    return func_calculus(T, [](double t) { return t < 0 ? -t : 0.0; }, sym_tol);
}

Polar polar(const Matrix& M, double rank_tol) {
    Matrix abs = psd_sqrt(M.adjoint() * M, rank_tol);
    Matrix V = M * moore_penrose(abs, rank_tol);
    return Polar{V, abs};
}

Matrix range_basis(const Matrix& M, double rank_tol) {
    if (M.size() == 0) return Matrix(M.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    const double cutoff = rank_tol * (s.size() > 0 ? s(0) : 0.0);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > cutoff) ++r;
    return svd.matrixU().leftCols(r);
}

Matrix kernel_basis(const Matrix& M, double rank_tol) {
    if (M.size() == 0) return Matrix(M.cols(), 0);
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cutoff = rank_tol * (s.size() > 0 ? s(0) : 0.0);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > cutoff) ++r;
    return svd.matrixV().rightCols(M.cols() - r);
}

Matrix intersect_subspaces(const Matrix& X, const Matrix& Y, double gap_tol) {
    if (X.rows() != Y.rows()) throw errors::BadDims("intersect_subspaces: ambient mismatch");
    const Eigen::Index n = X.rows();
    if (X.cols() == 0 || Y.cols() == 0) return Matrix(n, 0);
    Matrix P1 = X * X.adjoint();
    Matrix P2 = Y * Y.adjoint();
    Matrix T = P1 * P2 * P1;
    HermEig eg = herm_eig((T + T.adjoint()) / 2.0);
    Eigen::Index first = eg.values.size();
    while (first > 0 && eg.values(first - 1) >= 1.0 - gap_tol) --first;
    return eg.vectors.rightCols(eg.values.size() - first);
}

} // namespace idemkit::linalg
