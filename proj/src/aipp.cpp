#include "minmax/aipp.hpp"

#include <cmath>

namespace minmax {

CompositeOracles count_oracles(const CompositeOracles& o, OracleTally& tally) {
  CompositeOracles c;
  OracleTally* t = &tally;
  c.f_value = [f = o.f_value, t](const Vector& x) {
    ++t->phi_value;
    return f(x);
  };
  c.f_grad = [g = o.f_grad, t](const Vector& x) {
    ++t->grad_x;
    return g(x);
  };
  if (o.f_value_grad) {
    c.f_value_grad = [fg = o.f_value_grad, t](const Vector& x) {
      ++t->phi_value;
      ++t->grad_x;
      return fg(x);
    };
  }
  c.h_resolvent = [r = o.h_resolvent, t](double lambda, const Vector& x) {
    ++t->h_resolvent;
    return r(lambda, x);
  };
  c.h_value = [h = o.h_value, t](const Vector& x) {
    ++t->h_value;
    return h(x);
  };
  return c;
}

Refinement refine(const Vector& x, const std::function<Vector(const Vector&)>& f_grad,
                  const Resolvent& h_resolvent, double M_lambda) {
  if (!(M_lambda > 0.0)) throw ArgumentError("refine: M_lambda must be positive");
  Refinement r;
  r.grad_x = f_grad(x);
  r.x_bar = h_resolvent(1.0 / M_lambda, x - r.grad_x / M_lambda);
  r.grad_x_bar = f_grad(r.x_bar);
  r.u_bar = M_lambda * (x - r.x_bar) + r.grad_x_bar - r.grad_x;
  return r;
}

std::int64_t aipp_min_acg_iterations(double lambda, double M) {
  return static_cast<std::int64_t>(std::ceil(6.0 * std::sqrt(2.0 * lambda * M + 1.0)));
}

AcgInputs aipp_subproblem(const CompositeOracles& o, double lambda, double M,
                          const Vector& x_prev) {
  AcgInputs in;
  in.mu = 0.5;
  in.L = lambda * M + 0.5;
  in.z0 = x_prev;
  in.psi_s_value = [f = o.f_value, lambda, x_prev](const Vector& x) {
    return lambda * f(x) + 0.25 * (x - x_prev).squaredNorm();
  };
  in.psi_s_grad = [g = o.f_grad, lambda, x_prev](const Vector& x) -> Vector {
    return lambda * g(x) + 0.5 * (x - x_prev);
  };
  in.psi_s_value_grad = [o, lambda, x_prev](const Vector& x) -> std::pair<double, Vector> {
    auto [v, g] = o.value_grad(x);
    return {lambda * v + 0.25 * (x - x_prev).squaredNorm(), lambda * g + 0.5 * (x - x_prev)};
  };
  in.psi_n_value = [h = o.h_value, lambda, x_prev](const Vector& x) {
    return lambda * h(x) + 0.25 * (x - x_prev).squaredNorm();
  };
  // argmin lambda h(y) + 1/4 |y - x_prev|^2 + 1/(2 alpha) |y - a|^2: the two
  // quadratics merge into one centred at c with weight 1/alpha'.
  in.psi_n_prox = [r = o.h_resolvent, lambda, x_prev](double alpha, const Vector& a) {
    const double alpha_p = 1.0 / (0.5 + 1.0 / alpha);
    const Vector c = alpha_p * (0.5 * x_prev + a / alpha);
    return r(lambda * alpha_p, c);
  };
  return in;
}

AippResult aipp_solve(const CompositeOracles& oracles_in, double m, double M,
                      const AippConfig& cfg, const Vector& x0, const Deadline* deadline) {
  if (!(m > 0.0) || !(M > 0.0)) throw ArgumentError("aipp_solve: m and M must be positive");
  if (!(cfg.sigma > 0.0 && cfg.sigma < 1.0)) throw ArgumentError("aipp_solve: sigma not in (0,1)");
  if (!(cfg.rho_bar > 0.0)) throw ArgumentError("aipp_solve: rho_bar must be positive");
  const double lambda = cfg.lambda > 0.0 ? cfg.lambda : 1.0 / (4.0 * m);
  if (lambda > (1.0 + 1e-12) / (2.0 * m)) {
    throw InvalidCurvature("aipp_solve: lambda exceeds 1/(2m)");
  }

  Deadline local(cfg.time_limit);
  const Deadline& dl = deadline ? *deadline : local;
  const Deadline clock(0.0);

  AippResult res;
  const CompositeOracles o = count_oracles(oracles_in, res.report.tally);

  const double rho_hat = cfg.rho_bar / 4.0;
  const double M_lambda = M + 1.0 / lambda;
  const double eps_hat = cfg.rho_bar * cfg.rho_bar / (32.0 * M_lambda);
  const std::int64_t min_iters = aipp_min_acg_iterations(lambda, M);

  auto finish = [&](const Vector& x, Termination t, std::optional<Refinement> r = std::nullopt) {
    if (!r) r = refine(x, o.f_grad, o.h_resolvent, M_lambda);
    res.x = x;
    res.x_bar = std::move(r->x_bar);
    res.u_bar = std::move(r->u_bar);
    res.report.terminal_value = o.f_value(res.x_bar) + o.h_value(res.x_bar);
    res.report.termination = t;
    res.report.wall_time = clock.elapsed();
    return res;
  };

  Vector x_prev = x0;
  try {
    for (std::int64_t k = 1; k <= cfg.max_outer; ++k) {
      const AcgInputs in = aipp_subproblem(o, lambda, M, x_prev);
      AcgState st = AcgState::initial(x_prev);
      AcgOptions opt;
      opt.sigma = cfg.sigma;
      opt.min_iters = min_iters;
      opt.max_iters = cfg.max_acg_iters;
      opt.deadline = &dl;
      AcgCounts counts = run_acg(in, st, opt);
      res.report.acg_iterations += counts.iterations;

      AippIterationRecord rec{k, counts.iterations, st.hpe_residual(), st.eps, lambda};
      res.report.outer_iterations = k;

      if (st.hpe_residual() <= lambda * rho_hat / 5.0) {
        opt.min_iters = 0;
        opt.predicate = [bound = eps_hat * lambda](const AcgState& s) { return s.eps <= bound; };
        counts = run_acg(in, st, opt);
        res.report.acg_iterations += counts.iterations;
        rec.acg_iterations += counts.iterations;
        rec.eps = st.eps;
        res.history.push_back(rec);
        Refinement r = refine(st.z, o.f_grad, o.h_resolvent, M_lambda);
        if (r.u_bar.norm() <= cfg.rho_bar) return finish(st.z, Termination::Converged, std::move(r));
        // Rounding can keep the refined residual just above the target;
        // keep iterating from the refined subproblem solution.
      } else {
        res.history.push_back(rec);
      }
      x_prev = st.z;
    }
  } catch (const TimeLimitReached&) {
    return finish(x_prev, Termination::TimeLimit);
  }
  return finish(x_prev, Termination::IterLimit);
}

}  // namespace minmax
