#include "ifcf/linalg.hpp"

#include <cmath>

namespace ifcf {
namespace {

void normalize_signs(Matrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > 1e-14) {
        if (vectors(i, j) < 0.0) vectors.col(j) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix& a) {
  const auto n = a.rows();
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);

  if (n == 1) {
    out.values(0) = a(0, 0);
    out.vectors(0, 0) = 1.0;
    return out;
  }

  if (n == 2) {
    const double off = 0.5 * (a(0, 1) + a(1, 0));
    const double mean = 0.5 * (a(0, 0) + a(1, 1));
    const double half_diff = 0.5 * (a(0, 0) - a(1, 1));
    const double radius = std::hypot(half_diff, off);
    out.values(0) = mean - radius;
    out.values(1) = mean + radius;
    if (radius == 0.0) {
      out.vectors.setIdentity();
      return out;
    }
    // Eigenvector of the larger eigenvalue from whichever row of (a - lambda I)
    // is better conditioned.
    double x = 0.0;
    double y = 0.0;
    if (half_diff >= 0.0) {
      x = half_diff + radius;
      y = off;
    } else {
      x = off;
      y = radius - half_diff;
    }
    const double norm = std::hypot(x, y);
    x /= norm;
    y /= norm;
    out.vectors(0, 1) = x;
    out.vectors(1, 1) = y;
    out.vectors(0, 0) = -y;
    out.vectors(1, 0) = x;
    normalize_signs(out.vectors);
    return out;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  normalize_signs(out.vectors);
  return out;
}

Matrix spd_inverse(const Matrix& a) {
  const auto n = a.rows();
  Matrix out(n, n);
  if (n == 1) {
    out(0, 0) = 1.0 / a(0, 0);
  } else if (n == 2) {
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    out(0, 0) = a(1, 1) / det;
    out(1, 1) = a(0, 0) / det;
    out(0, 1) = -a(0, 1) / det;
    out(1, 0) = -a(1, 0) / det;
  } else {
    out = a.ldlt().solve(Matrix::Identity(n, n));
  }
  return out;
}

bool cholesky_inverse_factor(const Matrix& a, Matrix& lower_inv) {
  const auto n = a.rows();
  lower_inv.setZero(n, n);
  if (n <= 2) {
    if (!(a(0, 0) > 0.0)) return false;
    const double l11 = std::sqrt(a(0, 0));
    lower_inv(0, 0) = 1.0 / l11;
    if (n == 1) return true;
    const double l21 = a(1, 0) / l11;
    const double pivot = a(1, 1) - l21 * l21;
    if (!(pivot > 0.0)) return false;
    const double l22 = std::sqrt(pivot);
    lower_inv(1, 1) = 1.0 / l22;
    lower_inv(1, 0) = -l21 / (l11 * l22);
    return true;
  }
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return false;
  lower_inv = llt.matrixL().solve(Matrix::Identity(n, n));
  return true;
}

double operator_norm_symmetric(const Matrix& a) {
  const auto eig = symmetric_eigen(a);
  return eig.values.cwiseAbs().maxCoeff();
}

}  // namespace ifcf
