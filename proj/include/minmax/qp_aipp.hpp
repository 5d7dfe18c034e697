#pragma once

#include <vector>

#include "minmax/aipp_s.hpp"

namespace minmax {

struct QpAippConfig {
  InnerMethod inner = InnerMethod::Aipp;
  AippConfig aipp;     // rho_bar is overwritten by the driver
  RaippConfig raipp;   // likewise
  double hat_c = 0.0;
  int max_doublings = 60;
  double max_c_ratio = 1e16;  // c / c0 beyond this is treated as divergence
  bool warm_start = true;     // start round i+1 from the x_bar of round i
  double time_limit = 0.0;
};

struct PenaltyRound {
  double c = 0.0;
  double feasibility = 0.0;  // |A x_bar - b|
  double norm_u = 0.0;
  std::int64_t acg_iterations = 0;
  Termination termination = Termination::Converged;
};

struct QpAippResult {
  Vector x_bar;
  Vector u_bar;
  Vector r_bar;  // c (A x_bar - b)
  double c_final = 0.0;
  SolveReport report;
  std::vector<PenaltyRound> rounds;
};

/// f_c = f + c/2 |A x - b|^2 with gradient grad f + c A*(A x - b).
CompositeOracles penalized_oracles(const CompositeOracles& oracles,
                                   const LinearConstraint& constraint, double c);

/// Quadratic penalty AIPP for min f + h subject to A x = b. Starts with
/// c = hat_c + M / |A|^2 and doubles c until |A x_bar - b| <= eta_bar.
/// Throws DivergenceError once the doubling cap is exceeded.
QpAippResult qp_aipp_solve(const CompositeOracles& oracles, double m, double M,
                           const LinearConstraint& constraint, const QpAippConfig& config,
                           const Vector& x0, double rho_bar, double eta_bar,
                           const Deadline* deadline = nullptr);

struct QpAippSOptions {
  QpAippConfig qp;
  double xi = 0.0;  // 0 selects D_y / rho_y
  bool relative = false;
};

struct QpPrimalDualResult {
  StationaryCertificate cert;  // r_bar and feas_violation are set
  SolveReport report;
  std::vector<PenaltyRound> rounds;
  double xi = 0.0;
  double rho_bar = 0.0;
  double grad_norm_x0 = 0.0;
  double norm_u_rel = 0.0;
};

/// Smoothing plus quadratic penalty for linearly constrained min-max.
QpPrimalDualResult qp_aipp_s_solve(const MinMaxProblem& problem,
                                   const LinearConstraint& constraint, double rho_x,
                                   double rho_y, double eta, const Vector& x0, const Vector& y0,
                                   const QpAippSOptions& options = {});

}  // namespace minmax
