#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "minmax/linalg.hpp"
#include "minmax/projections.hpp"
#include "minmax/types.hpp"

namespace minmax {

using PairValue = std::function<double(const Vector& x, const Vector& y)>;
using PairGradient = std::function<Vector(const Vector& x, const Vector& y)>;
using PointValue = std::function<double(const Vector& x)>;
using Resolvent = std::function<Vector(double lambda, const Vector& x0)>;
using YResolvent = std::function<Vector(double lambda, const Vector& x, const Vector& y0)>;

/// Oracle bundle for min_x max_{y in Y} Phi(x, y) + h(x).
///
/// h_resolvent(lambda, x0) = argmin { lambda h(x) + 1/2 |x - x0|^2 }
/// y_resolvent(lambda, x, y0) = argmax_{y in Y} { lambda Phi(x, y) - 1/2 |y - y0|^2 }
///
/// grad_y_phi and max_value are optional; the verifier needs the former and
/// the smoothing sandwich checks use the latter (exact p(x) = max_y Phi).
struct MinMaxProblem {
  std::string family;
  Index n_x = 0;
  Index n_y = 0;

  PairValue phi_value;
  PairGradient grad_x_phi;
  PairGradient grad_y_phi;
  Resolvent h_resolvent;
  PointValue h_value;
  YResolvent y_resolvent;
  PointValue max_value;

  // Geometry of dom h (h is its indicator, or h = 0 for Whole) and of Y.
  ConvexSet x_set;
  ConvexSet y_set;

  double m = 0.0;
  double L_x = 0.0;
  double L_y = 0.0;
  double D_y = 0.0;

  /// Checks constants and that every required oracle is present.
  void validate() const;
  bool has_y_gradient() const { return static_cast<bool>(grad_y_phi); }
};

/// Fills h_value / h_resolvent with the indicator of `set` (or h = 0).
void attach_indicator(MinMaxProblem& problem, const ConvexSet& set);

/// Extended-value indicator of `set`, tolerant to 1e-9 rounding.
double indicator_value(const ConvexSet& set, const Vector& x);

/// Linear equality constraint A x = b.
struct LinearConstraint {
  LinearMap A;
  Vector b;
  double norm_A = 0.0;

  static LinearConstraint from_dense(const Matrix& A, const Vector& b);
  Vector residual(const Vector& x) const { return A.apply(x) - b; }
};

/// Primal-dual certificate (u, v, x, y[, r]) with measured residual norms.
struct StationaryCertificate {
  Vector u_bar;
  Vector v_bar;
  Vector x_bar;
  Vector y_bar;
  std::optional<Vector> r_bar;
  double norm_u = 0.0;
  double norm_v = 0.0;
  std::optional<double> feas_violation;

  void refresh_norms() {
    norm_u = u_bar.norm();
    norm_v = v_bar.norm();
  }
};

}  // namespace minmax
