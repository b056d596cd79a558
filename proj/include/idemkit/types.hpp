#pragma once

#include <Eigen/Dense>
#include <complex>

namespace idemkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Matrix2 = Eigen::Matrix2cd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

} // namespace idemkit
