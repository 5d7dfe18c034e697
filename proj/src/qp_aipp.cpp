#include "minmax/qp_aipp.hpp"

#include <fmt/format.h>

namespace minmax {

CompositeOracles penalized_oracles(const CompositeOracles& o, const LinearConstraint& A,
                                   double c) {
  CompositeOracles p;
  p.f_value = [f = o.f_value, A, c](const Vector& x) {
    return f(x) + 0.5 * c * A.residual(x).squaredNorm();
  };
  p.f_grad = [g = o.f_grad, A, c](const Vector& x) -> Vector {
    return g(x) + c * A.A.apply_adjoint(A.residual(x));
  };
  p.f_value_grad = [o, A, c](const Vector& x) -> std::pair<double, Vector> {
    auto [v, g] = o.value_grad(x);
    const Vector r = A.residual(x);
    return {v + 0.5 * c * r.squaredNorm(), g + c * A.A.apply_adjoint(r)};
  };
  p.h_resolvent = o.h_resolvent;
  p.h_value = o.h_value;
  return p;
}

QpAippResult qp_aipp_solve(const CompositeOracles& oracles, double m, double M,
                           const LinearConstraint& constraint, const QpAippConfig& cfg,
                           const Vector& x0, double rho_bar, double eta_bar,
                           const Deadline* deadline) {
  if (!(rho_bar > 0.0) || !(eta_bar > 0.0)) throw ArgumentError("qp_aipp_solve: tolerances > 0");
  if (!(constraint.norm_A > 0.0)) throw ArgumentError("qp_aipp_solve: A must be nonzero");
  if (cfg.hat_c < 0.0) throw ArgumentError("qp_aipp_solve: hat_c must be nonnegative");

  Deadline local(cfg.time_limit);
  const Deadline& dl = deadline ? *deadline : local;
  const Deadline clock(0.0);
  const double nA2 = constraint.norm_A * constraint.norm_A;
  const double c0 = cfg.hat_c + M / nA2;

  QpAippResult res;
  double c = c0;
  Vector start = x0;
  for (int doublings = 0;; ++doublings) {
    const CompositeOracles pen = penalized_oracles(oracles, constraint, c);
    const double M_c = M + c * nA2;
    Vector x_bar;
    Vector u_bar;
    SolveReport round_report;
    if (cfg.inner == InnerMethod::Aipp) {
      AippConfig a = cfg.aipp;
      a.rho_bar = rho_bar;
      AippResult r = aipp_solve(pen, m, M_c, a, start, &dl);
      x_bar = std::move(r.x_bar);
      u_bar = std::move(r.u_bar);
      round_report = r.report;
    } else {
      RaippConfig a = cfg.raipp;
      a.rho_bar = rho_bar;
      RaippResult r = raipp_solve(pen, m, M_c, a, start, &dl);
      x_bar = std::move(r.x_bar);
      u_bar = std::move(r.u_bar);
      round_report = r.report;
    }

    res.report.outer_iterations += round_report.outer_iterations;
    res.report.acg_iterations += round_report.acg_iterations;
    res.report.tally += round_report.tally;

    const Vector resid = constraint.residual(x_bar);
    PenaltyRound round{c, resid.norm(), u_bar.norm(), round_report.acg_iterations,
                       round_report.termination};
    res.rounds.push_back(round);

    const bool feasible = round.feasibility <= eta_bar;
    if (feasible || round_report.termination != Termination::Converged) {
      res.x_bar = std::move(x_bar);
      res.u_bar = std::move(u_bar);
      res.r_bar = c * resid;
      res.c_final = c;
      res.report.penalty_c_final = c;
      res.report.termination = round_report.termination;
      res.report.terminal_value = oracles.f_value(res.x_bar) + oracles.h_value(res.x_bar);
      res.report.wall_time = clock.elapsed();
      return res;
    }
    if (doublings + 1 > cfg.max_doublings || 2.0 * c > cfg.max_c_ratio * c0) {
      throw DivergenceError(fmt::format(
          "QP-AIPP: penalty parameter reached {:.3e} without |Ax-b| <= {:.3e} (last {:.3e})",
          c, eta_bar, round.feasibility));
    }
    if (cfg.warm_start) start = x_bar;
    c *= 2.0;
  }
}

QpPrimalDualResult qp_aipp_s_solve(const MinMaxProblem& problem,
                                   const LinearConstraint& constraint, double rho_x,
                                   double rho_y, double eta, const Vector& x0, const Vector& y0,
                                   const QpAippSOptions& opt) {
  problem.validate();
  if (!(rho_x > 0.0) || !(rho_y > 0.0) || !(eta > 0.0)) {
    throw ArgumentError("qp_aipp_s_solve: tolerances must be positive");
  }
  if (x0.size() != problem.n_x || constraint.A.cols != problem.n_x) {
    throw DimensionError("qp_aipp_s_solve: dimension mismatch");
  }
  const Deadline clock(0.0);
  Deadline deadline(opt.qp.time_limit);

  QpPrimalDualResult res;
  res.xi = opt.xi > 0.0 ? opt.xi : default_xi(problem, rho_y);
  const SmoothedObjective smoothed(problem, res.xi, y0);
  OracleTally y_tally;
  const CompositeOracles oracles = smoothed_oracles(smoothed, y_tally);
  res.grad_norm_x0 = oracles.f_grad(x0).norm();
  res.rho_bar = opt.relative ? rho_x * (res.grad_norm_x0 + 1.0) : rho_x;

  QpAippResult r = qp_aipp_solve(oracles, problem.m, smoothed.L_xi(), constraint, opt.qp, x0,
                                 res.rho_bar, eta, &deadline);
  res.cert = smoothing_certificate(smoothed, r.x_bar, r.u_bar);
  res.cert.r_bar = r.r_bar;
  res.cert.feas_violation = constraint.residual(r.x_bar).norm();
  res.report = r.report;
  res.report.tally.y_resolvent += y_tally.y_resolvent + 1;
  res.report.tally.grad_x += 1;
  res.report.wall_time = clock.elapsed();
  res.rounds = std::move(r.rounds);
  res.norm_u_rel = res.cert.norm_u / (res.grad_norm_x0 + 1.0);
  return res;
}

}  // namespace minmax
