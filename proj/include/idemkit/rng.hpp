#pragma once

#include <cstdint>
#include <random>

#include "idemkit/types.hpp"

namespace idemkit::rng {

/// splitmix64 step; decorrelates per-sample streams derived from one seed.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 engine(std::uint64_t seed) { return std::mt19937_64(mix(seed)); }

/// Stream for sample `index` of a seeded experiment. Independent of thread
/// scheduling, so Monte-Carlo loops are reproducible under OpenMP.
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(mix(mix(seed) + index));
}

inline Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = Complex(nd(gen), nd(gen));
    return M;
}

/// Haar-distributed unitary: QR of a complex Gaussian with the phase of
/// diag(R) folded into Q.
inline Matrix haar_unitary(Eigen::Index n, std::mt19937_64& gen) {
    Matrix Z = gaussian(n, n, gen);
    Eigen::HouseholderQR<Matrix> qr(Z);
    Matrix Q = qr.householderQ();
    Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        Complex r = R(j, j);
        double m = std::abs(r);
        Q.col(j) *= (m > 0) ? r / m : Complex(1, 0);
    }
    return Q;
}

/// V diag(I_k, 0) V* with Haar V and rank uniform on {0,...,n}.
inline Matrix random_projection(Eigen::Index n, std::mt19937_64& gen) {
    std::uniform_int_distribution<Eigen::Index> rk(0, n);
    Eigen::Index k = rk(gen);
    if (k == 0) return Matrix::Zero(n, n);
    if (k == n) return Matrix::Identity(n, n);
    Matrix V = haar_unitary(n, gen);
    Matrix left = V.leftCols(k);
    return left * left.adjoint();
}

inline Vector random_unit_vector(Eigen::Index n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(nd(gen), nd(gen));
    return v / v.norm();
}

} // namespace idemkit::rng
