#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "minmax/acg.hpp"
#include "minmax/problem.hpp"

namespace minmax {

/// Oracles of the composite problem min f(x) + h(x), f smooth and
/// m-weakly convex with M-Lipschitz gradient.
struct CompositeOracles {
  std::function<double(const Vector&)> f_value;
  std::function<Vector(const Vector&)> f_grad;
  // Optional fused evaluation (saves work when value and gradient share an
  // inner solve).
  std::function<std::pair<double, Vector>(const Vector&)> f_value_grad;
  Resolvent h_resolvent;
  PointValue h_value;

  std::pair<double, Vector> value_grad(const Vector& x) const {
    if (f_value_grad) return f_value_grad(x);
    return {f_value(x), f_grad(x)};
  }
};

/// Wraps every oracle so that each call is recorded in `tally`, which must
/// outlive the returned object.
CompositeOracles count_oracles(const CompositeOracles& oracles, OracleTally& tally);

struct AippConfig {
  double lambda = 0.0;  // 0 selects 1/(4m)
  double sigma = 0.5;
  double rho_bar = 1e-2;
  std::int64_t max_outer = 10'000'000;
  double time_limit = 0.0;  // seconds, <= 0 means none
  std::int64_t max_acg_iters = 10'000'000;
};

struct AippIterationRecord {
  std::int64_t k = 0;
  std::int64_t acg_iterations = 0;
  double residual = 0.0;  // |x_{k-1} - x + u|
  double eps = 0.0;
  double lambda = 0.0;
};

struct AippResult {
  Vector x_bar;
  Vector u_bar;
  Vector x;  // iterate the refinement was applied to
  SolveReport report;
  std::vector<AippIterationRecord> history;
};

struct Refinement {
  Vector x_bar;
  Vector u_bar;
  Vector grad_x;      // grad f(x)
  Vector grad_x_bar;  // grad f(x_bar)
};

/// x_bar = argmin { <grad f(x), x' - x> + h(x') + M_lambda/2 |x' - x|^2 },
/// u_bar = M_lambda (x - x_bar) + grad f(x_bar) - grad f(x).
Refinement refine(const Vector& x, const std::function<Vector(const Vector&)>& f_grad,
                  const Resolvent& h_resolvent, double M_lambda);

/// Minimum number of ACG iterations per prox subproblem.
std::int64_t aipp_min_acg_iterations(double lambda, double M);

/// The subproblem lambda (f + h) + 1/2 |. - x_prev|^2 split for the ACG.
AcgInputs aipp_subproblem(const CompositeOracles& oracles, double lambda, double M,
                          const Vector& x_prev);

/// Accelerated inexact proximal point method. Returns with termination
/// Converged once |u_bar| <= rho_bar; TimeLimit / IterLimit otherwise, with
/// the refinement of the last iterate as a partial answer.
/// Throws InvalidCurvature if lambda > 1/(2m).
AippResult aipp_solve(const CompositeOracles& oracles, double m, double M,
                      const AippConfig& config, const Vector& x0,
                      const Deadline* deadline = nullptr);

}  // namespace minmax
