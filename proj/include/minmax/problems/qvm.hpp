#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "minmax/linalg.hpp"
#include "minmax/problem.hpp"

namespace minmax {

/// Maximum of k nonconvex quadratics over the simplex:
///   g_i(x) = alpha_i/2 |C_i x - d_i|^2 - beta_i/2 |D_i B_i x|^2,
///   Phi(x, y) = sum_i y_i g_i(x),  x in Delta^n, y in Delta^k.
struct QvmInstance {
  Index n = 0;
  Index l = 0;
  Index k = 0;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<SparseMatrix> C;  // l x n
  std::vector<SparseMatrix> B;  // n x n
  std::vector<Vector> D;        // diagonals of D_i
  std::vector<Vector> d;        // length l
  Matrix P;                     // n x k, column i = alpha_i C_i^T d_i
  double M_target = 0.0;
  double m_target = 0.0;
  double density = 0.05;
  std::uint64_t seed = 0;

  // Extreme Hessian eigenvalues of each g_i.
  std::vector<double> lambda_max;
  std::vector<double> lambda_min;

  /// Recomputes P from alpha, C and d.
  void update_P();
  /// Evaluates g(x) (stacked g_i).
  Vector g(const Vector& x) const;
  /// grad g_i(x).
  Vector grad_g(Index i, const Vector& x) const;
  /// Hessian of g_i as a dense matrix.
  Matrix hessian(Index i) const;
  void validate() const;
};

struct QvmParams {
  Index n = 200;
  Index l = 10;
  Index k = 5;
  double M = 10.0;
  double m = 1.0;
  double density = 0.05;
  std::uint64_t seed = 1;
};

/// Random instance with alpha_i, beta_i calibrated so that
/// lambda_max(hess g_i) = M and lambda_min(hess g_i) = -m.
/// Throws CalibrationError if 100 alternating rounds do not reach 1%.
QvmInstance qvm_generate(const QvmParams& params);

/// m = max_i -lambda_min, L_x = max_i lambda_max, L_y = L_x sqrt(k) + |P|,
/// D_y = sqrt(2).
MinMaxProblem qvm_problem(std::shared_ptr<const QvmInstance> instance);

/// Uniform point 1/n of the x-simplex.
Vector qvm_initial_point(const QvmInstance& instance);

}  // namespace minmax
