#include "minmax/smoothing.hpp"

#include <cmath>

namespace minmax {

SmoothingConstants smoothing_constants(double m, double L_x, double L_y, double xi) {
  if (!(xi > 0.0)) throw ArgumentError("smoothing_constants: xi must be positive");
  SmoothingConstants c;
  c.Q_xi = xi * L_y + std::sqrt(xi * (L_x + m));
  c.L_xi = L_y * c.Q_xi + L_x;
  return c;
}

SmoothingConstants smoothing_constants(const MinMaxProblem& problem, double xi) {
  return smoothing_constants(problem.m, problem.L_x, problem.L_y, xi);
}

SmoothedObjective::SmoothedObjective(const MinMaxProblem& problem, double xi, Vector y0)
    : problem_(&problem),
      xi_(xi),
      y0_(std::move(y0)),
      constants_(smoothing_constants(problem, xi)) {
  if (y0_.size() != problem.n_y) throw DimensionError("SmoothedObjective: y0 has wrong size");
}

Vector SmoothedObjective::y_xi(const Vector& x) const {
  return problem_->y_resolvent(xi_, x, y0_);
}

double SmoothedObjective::value_at(const Vector& x, const Vector& y) const {
  return problem_->phi_value(x, y) - (y - y0_).squaredNorm() / (2.0 * xi_);
}

double SmoothedObjective::value(const Vector& x) const { return value_at(x, y_xi(x)); }

Vector SmoothedObjective::gradient(const Vector& x) const {
  return problem_->grad_x_phi(x, y_xi(x));
}

SmoothedObjective::Evaluation SmoothedObjective::evaluate(const Vector& x) const {
  Evaluation e;
  e.y = y_xi(x);
  e.value = value_at(x, e.y);
  e.gradient = problem_->grad_x_phi(x, e.y);
  return e;
}

}  // namespace minmax
