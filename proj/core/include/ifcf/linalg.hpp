#pragma once

// Small dense tensors used pointwise. Everything is stack-allocated with a
// compile-time capacity so that per-grid-point geometry never touches the heap.

#include <Eigen/Dense>

namespace ifcf {

inline constexpr int kMaxDim = 4;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Spectral decomposition of a real symmetric matrix. Eigenvalues ascending;
/// eigenvector columns normalized with the first nonzero component positive.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

/// n = 1, 2 in closed form, otherwise Eigen's self-adjoint QR solver.
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Inverse of a symmetric positive definite matrix; closed form for n <= 2.
Matrix spd_inverse(const Matrix& a);

/// L^{-1} for the Cholesky factor a = L L^T. Returns false if a is not
/// positive definite. Closed form for n <= 2.
bool cholesky_inverse_factor(const Matrix& a, Matrix& lower_inv);

/// Largest absolute eigenvalue of a symmetric matrix.
double operator_norm_symmetric(const Matrix& a);

}  // namespace ifcf
