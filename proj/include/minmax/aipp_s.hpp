#pragma once

#include "minmax/aipp.hpp"
#include "minmax/problem.hpp"
#include "minmax/raipp.hpp"
#include "minmax/smoothing.hpp"

namespace minmax {

enum class InnerMethod { Aipp, Raipp };

struct AippSOptions {
  double xi = 0.0;        // 0 selects D_y / rho_y
  bool relative = false;  // target |u| <= rho_x (|grad p_xi(x0)| + 1)
  InnerMethod inner = InnerMethod::Aipp;
  AippConfig aipp;        // lambda 0 selects 1/(4m), sigma defaults to 1/2
  RaippConfig raipp;
  double time_limit = 0.0;  // seconds, <= 0 means none
};

struct PrimalDualResult {
  StationaryCertificate cert;
  SolveReport report;
  double xi = 0.0;
  double rho_bar = 0.0;      // absolute target passed to the inner method
  double grad_norm_x0 = 0.0; // |grad p_xi(x0)|
  double norm_u_rel = 0.0;   // |u| / (|grad p_xi(x0)| + 1)
};

/// D_y / rho_y, or 1 / rho_y when Y is a single point.
double default_xi(const MinMaxProblem& problem, double rho_y);

/// p_xi and h as composite oracles. Every y-resolvent solve is added to
/// tally.y_resolvent; the remaining categories are counted by the solver.
CompositeOracles smoothed_oracles(const SmoothedObjective& smoothed, OracleTally& tally);

/// (u, (y0 - y_xi(x)) / xi, x, y_xi(x)) with norms filled in.
StationaryCertificate smoothing_certificate(const SmoothedObjective& smoothed, const Vector& x,
                                            const Vector& u);

/// Smoothing scheme for a (rho_x, rho_y)-primal-dual stationary point.
PrimalDualResult solve_primal_dual(const MinMaxProblem& problem, double rho_x, double rho_y,
                                   const Vector& x0, const Vector& y0,
                                   const AippSOptions& options = {});

struct DirectionalBounds {
  double dd_lower_bound = 0.0;  // lower bound on the directional derivative
  double distance_bound = 0.0;  // distance to the near-stationary point
};

/// Bounds implied by a primal-dual certificate, evaluated with its measured
/// residual norms.
DirectionalBounds near_directional_certificate(const StationaryCertificate& cert, double m,
                                               double D_y);

/// min { m delta^2 / (2 D_y), delta^2 / (32 m D_y) }.
double directional_tau(double delta, double m, double D_y);

struct DirectionalResult {
  PrimalDualResult primal_dual;
  double tau = 0.0;
  double rho_x = 0.0;
  DirectionalBounds bounds;          // from measured residuals
  DirectionalBounds target_bounds;   // from (rho_x, tau)
};

/// Runs solve_primal_dual with (rho_x, rho_y) = (delta / 2, tau). The
/// relative flag in options is ignored.
DirectionalResult solve_directional(const MinMaxProblem& problem, double delta,
                                    const Vector& x0, const Vector& y0,
                                    const AippSOptions& options = {});

enum class ProxDirection { DeltaToEps, EpsToDelta };

/// DeltaToEps: lambda^3 eps / (lambda^2 + 2 (1 - lambda m)(1 + lambda)).
/// EpsToDelta: delta min{1, 1/lambda}.
/// Requires 0 < lambda < 1/m.
double prox_stationarity_bounds(double lambda, double m, double value, ProxDirection direction);

struct NashResiduals {
  double rx = 0.0;
  double ry = 0.0;
};

/// Min-norm residuals dist(0, grad_x Phi + N_X(x)) and
/// dist(0, -grad_y Phi + N_Y(y)). Needs grad_y_phi.
NashResiduals nash_residuals(const MinMaxProblem& problem, const Vector& x, const Vector& y);

/// 1 + (sqrt(xi) L_y + sqrt(L_x)) / sqrt(m).
double omega_xi(const MinMaxProblem& problem, double xi);

}  // namespace minmax
