#pragma once

#include <Eigen/SparseCore>

#include <functional>

#include "minmax/types.hpp"

namespace minmax {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// A linear map R^cols -> R^rows given by its action and adjoint action.
struct LinearMap {
  Index rows = 0;
  Index cols = 0;
  std::function<Vector(const Vector&)> apply;
  std::function<Vector(const Vector&)> apply_adjoint;

  static LinearMap from_dense(Matrix A);
  static LinearMap from_sparse(SparseMatrix A);
};

/// ||A|| by power iteration on A*A. The estimate is accepted once the
/// Rayleigh-quotient residual of A*A certifies relative accuracy tol.
/// Throws ArgumentError for a zero map.
double operator_norm(const LinearMap& A, double tol = 1e-10, int max_iters = 100000);
double operator_norm(const Matrix& A, double tol = 1e-10);

struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme eigenvalues of a symmetric operator on R^n via Lanczos with full
/// reorthogonalization. Stops early once both extremes are stable.
EigenRange symmetric_extreme_eigenvalues(const std::function<Vector(const Vector&)>& apply,
                                         Index n, std::uint64_t seed = 0x5eed);

}  // namespace minmax
