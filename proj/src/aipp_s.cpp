#include "minmax/aipp_s.hpp"

#include <cmath>

namespace minmax {

double default_xi(const MinMaxProblem& problem, double rho_y) {
  if (!(rho_y > 0.0)) throw ArgumentError("default_xi: rho_y must be positive");
  return (problem.D_y > 0.0 ? problem.D_y : 1.0) / rho_y;
}

CompositeOracles smoothed_oracles(const SmoothedObjective& s, OracleTally& tally) {
  const SmoothedObjective* sp = &s;
  OracleTally* t = &tally;
  const MinMaxProblem& p = s.problem();
  CompositeOracles o;
  o.f_value = [sp, t](const Vector& x) {
    ++t->y_resolvent;
    return sp->value(x);
  };
  o.f_grad = [sp, t](const Vector& x) {
    ++t->y_resolvent;
    return sp->gradient(x);
  };
  o.f_value_grad = [sp, t](const Vector& x) -> std::pair<double, Vector> {
    ++t->y_resolvent;
    auto e = sp->evaluate(x);
    return {e.value, std::move(e.gradient)};
  };
  o.h_resolvent = p.h_resolvent;
  o.h_value = p.h_value;
  return o;
}

StationaryCertificate smoothing_certificate(const SmoothedObjective& s, const Vector& x,
                                            const Vector& u) {
  StationaryCertificate c;
  c.x_bar = x;
  c.u_bar = u;
  c.y_bar = s.y_xi(x);
  c.v_bar = (s.y0() - c.y_bar) / s.xi();
  c.refresh_norms();
  return c;
}

PrimalDualResult solve_primal_dual(const MinMaxProblem& problem, double rho_x, double rho_y,
                                   const Vector& x0, const Vector& y0,
                                   const AippSOptions& opt) {
  problem.validate();
  if (!(rho_x > 0.0) || !(rho_y > 0.0)) throw ArgumentError("solve_primal_dual: tolerances > 0");
  if (x0.size() != problem.n_x) throw DimensionError("solve_primal_dual: x0 has wrong size");

  const Deadline clock(0.0);
  Deadline deadline(opt.time_limit);

  PrimalDualResult res;
  res.xi = opt.xi > 0.0 ? opt.xi : default_xi(problem, rho_y);
  const SmoothedObjective smoothed(problem, res.xi, y0);

  OracleTally y_tally;
  const CompositeOracles oracles = smoothed_oracles(smoothed, y_tally);

  res.grad_norm_x0 = oracles.f_grad(x0).norm();
  res.rho_bar = opt.relative ? rho_x * (res.grad_norm_x0 + 1.0) : rho_x;

  Vector x;
  Vector u;
  if (opt.inner == InnerMethod::Aipp) {
    AippConfig cfg = opt.aipp;
    cfg.rho_bar = res.rho_bar;
    AippResult r = aipp_solve(oracles, problem.m, smoothed.L_xi(), cfg, x0, &deadline);
    x = std::move(r.x_bar);
    u = std::move(r.u_bar);
    res.report = r.report;
  } else {
    RaippConfig cfg = opt.raipp;
    cfg.rho_bar = res.rho_bar;
    RaippResult r = raipp_solve(oracles, problem.m, smoothed.L_xi(), cfg, x0, &deadline);
    x = std::move(r.x_bar);
    u = std::move(r.u_bar);
    res.report = r.report;
  }
  res.cert = smoothing_certificate(smoothed, x, u);
  ++y_tally.y_resolvent;
  res.report.tally.y_resolvent += y_tally.y_resolvent;
  res.report.tally.grad_x += 1;  // gradient at x0
  res.norm_u_rel = res.cert.norm_u / (res.grad_norm_x0 + 1.0);
  res.report.wall_time = clock.elapsed();
  return res;
}

DirectionalBounds near_directional_certificate(const StationaryCertificate& cert, double m,
                                               double D_y) {
  if (!(m > 0.0) || !(D_y >= 0.0)) throw ArgumentError("near_directional_certificate: bad constants");
  DirectionalBounds b;
  b.dd_lower_bound = -cert.norm_u - 2.0 * std::sqrt(2.0 * m * D_y * cert.norm_v);
  b.distance_bound = std::sqrt(2.0 * D_y * cert.norm_v / m);
  return b;
}

double directional_tau(double delta, double m, double D_y) {
  if (!(delta > 0.0) || !(m > 0.0) || !(D_y > 0.0)) {
    throw ArgumentError("directional_tau: arguments must be positive");
  }
  const double d2 = delta * delta;
  return std::min(m * d2 / (2.0 * D_y), d2 / (32.0 * m * D_y));
}

DirectionalResult solve_directional(const MinMaxProblem& problem, double delta,
                                    const Vector& x0, const Vector& y0,
                                    const AippSOptions& options) {
  DirectionalResult res;
  res.tau = directional_tau(delta, problem.m, problem.D_y);
  res.rho_x = delta / 2.0;
  AippSOptions opt = options;
  opt.relative = false;
  res.primal_dual = solve_primal_dual(problem, res.rho_x, res.tau, x0, y0, opt);
  res.bounds = near_directional_certificate(res.primal_dual.cert, problem.m, problem.D_y);

  StationaryCertificate target;
  target.norm_u = res.rho_x;
  target.norm_v = res.tau;
  res.target_bounds = near_directional_certificate(target, problem.m, problem.D_y);
  return res;
}

double prox_stationarity_bounds(double lambda, double m, double value, ProxDirection direction) {
  if (!(m > 0.0)) throw ArgumentError("prox_stationarity_bounds: m must be positive");
  if (!(lambda > 0.0) || lambda * m >= 1.0) {
    throw ArgumentError("prox_stationarity_bounds: requires 0 < lambda < 1/m");
  }
  if (direction == ProxDirection::DeltaToEps) {
    const double l2 = lambda * lambda;
    return l2 * lambda * value / (l2 + 2.0 * (1.0 - lambda * m) * (1.0 + lambda));
  }
  return value * std::min(1.0, 1.0 / lambda);
}

NashResiduals nash_residuals(const MinMaxProblem& problem, const Vector& x, const Vector& y) {
  if (!problem.has_y_gradient()) {
    throw UnsupportedError("nash_residuals: problem has no y-gradient oracle");
  }
  NashResiduals r;
  r.rx = normal_cone_distance(problem.x_set, x, problem.grad_x_phi(x, y));
  r.ry = normal_cone_distance(problem.y_set, y, -problem.grad_y_phi(x, y));
  return r;
}

double omega_xi(const MinMaxProblem& problem, double xi) {
  if (!(xi > 0.0)) throw ArgumentError("omega_xi: xi must be positive");
  return 1.0 + (std::sqrt(xi) * problem.L_y + std::sqrt(problem.L_x)) / std::sqrt(problem.m);
}

}  // namespace minmax
