#include "minmax/problem.hpp"

#include <cmath>
#include <limits>

namespace minmax {

void MinMaxProblem::validate() const {
  if (n_x <= 0 || n_y <= 0) throw DimensionError("MinMaxProblem: nonpositive dimensions");
  if (!phi_value || !grad_x_phi || !h_resolvent || !h_value || !y_resolvent) {
    throw ArgumentError("MinMaxProblem: missing oracle");
  }
  if (!(m > 0.0) || !(L_x > 0.0) || !(L_y >= 0.0) || !(D_y >= 0.0)) {
    throw ArgumentError("MinMaxProblem: m, L_x must be positive and L_y, D_y nonnegative");
  }
  if (m > L_x * (1.0 + 1e-12)) throw ArgumentError("MinMaxProblem: requires m <= L_x");
}

double indicator_value(const ConvexSet& set, const Vector& x) {
  return set.contains(x, 1e-9) ? 0.0 : std::numeric_limits<double>::infinity();
}

void attach_indicator(MinMaxProblem& problem, const ConvexSet& set) {
  problem.x_set = set;
  problem.h_value = [set](const Vector& x) { return indicator_value(set, x); };
  problem.h_resolvent = [set](double, const Vector& x0) { return set.project(x0); };
}

LinearConstraint LinearConstraint::from_dense(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size()) throw DimensionError("LinearConstraint: rows(A) != size(b)");
  LinearConstraint c;
  c.A = LinearMap::from_dense(A);
  c.b = b;
  c.norm_A = operator_norm(c.A, 1e-8);
  return c;
}

}  // namespace minmax
