#include "minmax/raipp.hpp"

#include <cmath>
#include <fmt/format.h>

namespace minmax {

double raipp_tau_update(double tau_prev, double pi) {
  if (!(pi > 0.0)) return tau_prev;
  if (pi > 1.5) return 1.5 * tau_prev / pi;
  if (pi < 1.2) return 1.2 * tau_prev / pi;
  return tau_prev;
}

namespace {

enum class Attempt { Accepted, Converged, Halve };

}  // namespace

RaippResult raipp_solve(const CompositeOracles& oracles_in, double m, double M_guess,
                        const RaippConfig& cfg, const Vector& x0, const Deadline* deadline) {
  if (!(m > 0.0) || !(M_guess > 0.0)) throw ArgumentError("raipp_solve: m and M must be positive");
  if (!(cfg.sigma_hat > 0.0 && cfg.sigma_hat < 1.0)) {
    throw ArgumentError("raipp_solve: sigma_hat not in (0,1)");
  }
  if (!(cfg.rho_bar > 0.0)) throw ArgumentError("raipp_solve: rho_bar must be positive");

  Deadline local(cfg.time_limit);
  const Deadline& dl = deadline ? *deadline : local;
  const Deadline clock(0.0);

  RaippResult res;
  const CompositeOracles o = count_oracles(oracles_in, res.report.tally);

  const double lambda0 = cfg.lambda0 > 0.0 ? cfg.lambda0 : 1.0 / m;
  const double lambda_max = cfg.lambda_cap / m;
  const double lambda_min = 1e-12 / m;
  double lambda = std::min(lambda0, lambda_max);
  double M_t = cfg.M_start_factor * M_guess;
  double tau = 10.0 * (lambda0 * M_guess + 1.0);
  bool good_so_far = true;
  const double rs = std::sqrt(cfg.sigma_hat);

  auto finish = [&](const Vector& x, Termination t, std::optional<Refinement> r = std::nullopt) {
    if (!r) r = refine(x, o.f_grad, o.h_resolvent, M_t + 1.0 / lambda);
    res.x = x;
    res.x_bar = std::move(r->x_bar);
    res.u_bar = std::move(r->u_bar);
    res.M_tilde = M_t;
    res.report.terminal_value = o.f_value(res.x_bar) + o.h_value(res.x_bar);
    res.report.termination = t;
    res.report.wall_time = clock.elapsed();
    return res;
  };

  Vector x_prev = x0;
  try {
    for (std::int64_t k = 1; k <= cfg.max_outer; ++k) {
      RaippIterationRecord rec;
      rec.k = k;
      AcgState st;
      std::optional<Refinement> accepted_ref;

      while (true) {
        AcgInputs in = aipp_subproblem(o, lambda, M_t, x_prev);
        st = AcgState::initial(x_prev);
        Attempt outcome = Attempt::Halve;
        AcgStepTrace trace;
        std::int64_t steps = 0;
        while (true) {
          if (dl.expired()) throw TimeLimitReached();
          if (steps >= cfg.max_acg_iters) {
            throw AcgNonConvergence("R-AIPP inner solver exceeded its iteration cap", st);
          }
          AcgState next = acg_step(st, in, &trace);
          ++steps;
          ++res.report.acg_iterations;
          ++rec.acg_iterations;

          const double gap = trace.linearization_gap(next.z);
          const double d2 = (next.z - trace.z_tilde).squaredNorm();
          const double tol = cfg.model_tol * std::max(1.0, std::abs(trace.psi_s_tilde));
          if (gap > 0.5 * in.L * d2 + tol) {
            // upper model violated: the curvature estimate is too small
            M_t *= 2.0;
            in.L = lambda * M_t + 0.5;
            continue;
          }
          if (gap < -tol) break;  // psi_s not convex along this step
          st = std::move(next);
          if (st.eps_raw < -st.eps_tol) break;
          const std::int64_t budget =
              cfg.budget_factor *
              static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(2.0 * in.L) / rs));
          if (st.j > budget) break;

          if (st.hpe_satisfied(cfg.sigma_hat)) {
            Refinement r = refine(st.z, o.f_grad, o.h_resolvent, M_t + 1.0 / lambda);
            const double un = r.u_bar.norm();
            if (un <= cfg.rho_bar) {
              accepted_ref = std::move(r);
              outcome = Attempt::Converged;
              break;
            }
            if (lambda * un <= tau * st.hpe_residual()) {
              accepted_ref = std::move(r);
              outcome = Attempt::Accepted;
              break;
            }
          }
        }
        if (outcome != Attempt::Halve) {
          rec.lambda = lambda;
          rec.M_tilde = M_t;
          if (outcome == Attempt::Converged) {
            rec.tau = tau;
            rec.good = good_so_far;
            res.history.push_back(rec);
            res.report.outer_iterations = k;
            return finish(st.z, Termination::Converged, std::move(accepted_ref));
          }
          break;
        }
        lambda /= 2.0;
        good_so_far = false;
        ++rec.halvings;
        if (lambda < lambda_min) {
          throw DivergenceError(fmt::format(
              "R-AIPP: stepsize fell below {:.3e}; the curvature data look inconsistent",
              lambda_min));
        }
      }

      const double res_norm = st.hpe_residual();
      rec.pi = res_norm > 0.0 ? lambda * accepted_ref->u_bar.norm() / res_norm : 0.0;
      tau = raipp_tau_update(tau, rec.pi);
      rec.tau = tau;
      rec.good = good_so_far;
      res.history.push_back(rec);
      res.report.outer_iterations = k;
      x_prev = st.z;
      if (good_so_far) lambda = std::min(2.0 * lambda, lambda_max);
    }
  } catch (const TimeLimitReached&) {
    return finish(x_prev, Termination::TimeLimit);
  }
  return finish(x_prev, Termination::IterLimit);
}

}  // namespace minmax
