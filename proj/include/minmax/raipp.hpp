#pragma once

#include <cstdint>
#include <vector>

#include "minmax/aipp.hpp"

namespace minmax {

/// Adaptive variant of AIPP: variable stepsize lambda, adaptive tau and a
/// backtracked curvature estimate M~.
struct RaippConfig {
  double rho_bar = 1e-2;
  double sigma_hat = 0.999;     // inner HPE acceptance
  double lambda0 = 0.0;         // 0 selects 1/m
  double lambda_cap = 100.0;    // lambda <= lambda_cap / m
  double M_start_factor = 0.01; // M~ starts at M_start_factor * M_guess
  double model_tol = 1e-10;     // slack in the curvature tests
  std::int64_t budget_factor = 10;
  std::int64_t max_outer = 10'000'000;
  double time_limit = 0.0;
  std::int64_t max_acg_iters = 10'000'000;
};

struct RaippIterationRecord {
  std::int64_t k = 0;
  double lambda = 0.0;  // stepsize used by the accepted subproblem
  double tau = 0.0;     // tau after the update
  double pi = 0.0;
  double M_tilde = 0.0;
  std::int64_t acg_iterations = 0;  // including discarded attempts
  int halvings = 0;
  bool good = false;
};

struct RaippResult {
  Vector x_bar;
  Vector u_bar;
  Vector x;
  SolveReport report;
  std::vector<RaippIterationRecord> history;
  double M_tilde = 0.0;
};

/// tau update: 1.5 tau / pi if pi > 1.5, 1.2 tau / pi if pi < 1.2, else tau.
double raipp_tau_update(double tau_prev, double pi);

RaippResult raipp_solve(const CompositeOracles& oracles, double m, double M_guess,
                        const RaippConfig& config, const Vector& x0,
                        const Deadline* deadline = nullptr);

}  // namespace minmax
