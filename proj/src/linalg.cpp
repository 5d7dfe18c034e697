#include "minmax/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "minmax/rng.hpp"

namespace minmax {

LinearMap LinearMap::from_dense(Matrix A) {
  LinearMap map;
  map.rows = A.rows();
  map.cols = A.cols();
  auto shared = std::make_shared<const Matrix>(std::move(A));
  map.apply = [shared](const Vector& x) -> Vector { return (*shared) * x; };
  map.apply_adjoint = [shared](const Vector& r) -> Vector { return shared->transpose() * r; };
  return map;
}

LinearMap LinearMap::from_sparse(SparseMatrix A) {
  LinearMap map;
  map.rows = A.rows();
  map.cols = A.cols();
  auto shared = std::make_shared<const SparseMatrix>(std::move(A));
  map.apply = [shared](const Vector& x) -> Vector { return (*shared) * x; };
  map.apply_adjoint = [shared](const Vector& r) -> Vector { return shared->transpose() * r; };
  return map;
}

namespace {

Vector random_unit(RandomStream& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  const double nv = v.norm();
  if (nv == 0.0) v.setOnes();
  return v / v.norm();
}

}  // namespace

double operator_norm(const LinearMap& A, double tol, int max_iters) {
  if (A.cols <= 0 || A.rows <= 0) throw DimensionError("operator_norm: empty map");
  RandomStream rng(A.rows * 1000003 + A.cols, "operator_norm");

  Vector v = random_unit(rng, A.cols);
  double lambda = 0.0;
  for (int attempt = 0; attempt < 3; ++attempt) {
    lambda = A.apply(v).squaredNorm();
    if (lambda > 0.0) break;
    v = random_unit(rng, A.cols);
  }
  if (!(lambda > 0.0)) throw ArgumentError("operator_norm: zero linear map");

  for (int it = 0; it < max_iters; ++it) {
    const Vector w = A.apply(v);
    lambda = w.squaredNorm();
    const Vector z = A.apply_adjoint(w);
    const double residual = (z - lambda * v).norm();
    if (residual <= tol * lambda) break;
    v = z / z.norm();
  }
  return std::sqrt(lambda);
}

double operator_norm(const Matrix& A, double tol) {
  return operator_norm(LinearMap::from_dense(A), tol);
}

EigenRange symmetric_extreme_eigenvalues(const std::function<Vector(const Vector&)>& apply,
                                         Index n, std::uint64_t seed) {
  if (n <= 0) throw DimensionError("symmetric_extreme_eigenvalues: empty operator");
  RandomStream rng(seed, "lanczos");

  Matrix Q(n, n);
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples q_j and q_{j+1}
  alpha.reserve(n);
  beta.reserve(n);
  Q.col(0) = random_unit(rng, n);

  EigenRange range;
  double scale = 0.0;
  for (Index j = 0; j < n; ++j) {
    Vector w = apply(Q.col(j));
    const double a = Q.col(j).dot(w);
    alpha.push_back(a);
    w -= a * Q.col(j);
    if (j > 0) w -= beta[j - 1] * Q.col(j - 1);
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass) {
      const auto basis = Q.leftCols(j + 1);
      w -= basis * (basis.transpose() * w);
    }
    const double b = w.norm();
    scale = std::max({scale, std::abs(a), b});

    const Index m = j + 1;
    Vector diag = Eigen::Map<const Vector>(alpha.data(), m);
    Vector sub(std::max<Index>(m - 1, 0));
    for (Index i = 0; i + 1 < m; ++i) sub[i] = beta[i];
    const bool breakdown = b <= 1e-13 * std::max(scale, 1e-300) || m == n;
    if (breakdown || m % 4 == 0) {
      Eigen::SelfAdjointEigenSolver<Matrix> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const Vector& theta = tri.eigenvalues();
      range.min = theta[0];
      range.max = theta[m - 1];
      if (breakdown) return range;
      // Ritz residual for eigenpair i is b * |last component of s_i|
      const double res_min = b * std::abs(tri.eigenvectors()(m - 1, 0));
      const double res_max = b * std::abs(tri.eigenvectors()(m - 1, m - 1));
      if (res_min <= 1e-11 * scale && res_max <= 1e-11 * scale) return range;
    }
    beta.push_back(b);
    Q.col(j + 1) = w / b;
  }
  return range;
}

}  // namespace minmax
