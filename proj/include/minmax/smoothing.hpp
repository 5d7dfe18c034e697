#pragma once

#include "minmax/problem.hpp"

namespace minmax {

struct SmoothingConstants {
  double Q_xi = 0.0;  // Lipschitz constant of y_xi
  double L_xi = 0.0;  // Lipschitz constant of grad p_xi
};

/// Q = xi L_y + sqrt(xi (L_x + m)),  L = L_y Q + L_x.
/// Throws ArgumentError for xi <= 0.
SmoothingConstants smoothing_constants(const MinMaxProblem& problem, double xi);
SmoothingConstants smoothing_constants(double m, double L_x, double L_y, double xi);

/// The prox-regularized max function
///   p_xi(x) = max_{y in Y} Phi(x, y) - |y - y0|^2 / (2 xi)
/// evaluated through the exact y-resolvent. Holds a reference to the
/// problem, which must outlive it.
class SmoothedObjective {
 public:
  SmoothedObjective(const MinMaxProblem& problem, double xi, Vector y0);

  const MinMaxProblem& problem() const { return *problem_; }
  double xi() const { return xi_; }
  const Vector& y0() const { return y0_; }
  double Q_xi() const { return constants_.Q_xi; }
  double L_xi() const { return constants_.L_xi; }

  /// argmax of the (1/xi)-strongly concave inner problem.
  Vector y_xi(const Vector& x) const;
  double value(const Vector& x) const;
  double value_at(const Vector& x, const Vector& y) const;
  Vector gradient(const Vector& x) const;

  struct Evaluation {
    Vector y;
    double value = 0.0;
    Vector gradient;
  };
  /// Value and gradient sharing one resolvent call.
  Evaluation evaluate(const Vector& x) const;

 private:
  const MinMaxProblem* problem_;
  double xi_;
  Vector y0_;
  SmoothingConstants constants_;
};

}  // namespace minmax
