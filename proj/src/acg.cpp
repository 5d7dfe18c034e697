#include "minmax/acg.hpp"

#include <cmath>
#include <fmt/format.h>

namespace minmax {

void AcgInputs::validate() const {
  if (!(mu >= 0.0) || !(L > 0.0) || L < mu) {
    throw ArgumentError("AcgInputs: requires mu >= 0, L > 0 and L >= mu");
  }
  if (!psi_s_value_grad && (!psi_s_value || !psi_s_grad)) {
    throw ArgumentError("AcgInputs: missing psi_s oracle");
  }
  if (!psi_n_prox || !psi_n_value) throw ArgumentError("AcgInputs: missing psi_n oracle");
  if (z0.size() == 0) throw DimensionError("AcgInputs: empty starting point");
}

AcgState AcgState::initial(const Vector& z0) {
  AcgState s;
  s.y0 = z0;
  s.z = z0;
  s.y = z0;
  s.gamma_beta = Vector::Zero(z0.size());
  s.u = Vector::Zero(z0.size());
  return s;
}

bool AcgState::hpe_satisfied(double sigma) const {
  const double r = hpe_residual();
  return u.squaredNorm() + 2.0 * eps <= sigma * r * r;
}

AcgState acg_step(const AcgState& s, const AcgInputs& in, AcgStepTrace* trace) {
  const double muA1 = in.mu * s.A + 1.0;
  const double A_next =
      s.A + (muA1 + std::sqrt(muA1 * muA1 + 4.0 * in.L * muA1 * s.A)) / (2.0 * in.L);
  const double keep = s.A / A_next;
  const double w = 1.0 - keep;

  AcgStepTrace local;
  AcgStepTrace& t = trace ? *trace : local;
  t = AcgStepTrace{};

  t.z_tilde = keep * s.z + w * s.y;
  if (in.psi_s_value_grad) {
    auto [v, g] = in.psi_s_value_grad(t.z_tilde);
    t.psi_s_tilde = v;
    t.grad_tilde = std::move(g);
  } else {
    t.psi_s_tilde = in.psi_s_value(t.z_tilde);
    t.grad_tilde = in.psi_s_grad(t.z_tilde);
  }
  ++t.psi_s_evals;
  ++t.grad_evals;

  AcgState n;
  n.j = s.j + 1;
  n.A = A_next;
  n.y0 = s.y0;
  n.gamma_alpha = keep * s.gamma_alpha + w * (t.psi_s_tilde - t.grad_tilde.dot(t.z_tilde));
  n.gamma_beta = keep * s.gamma_beta + w * t.grad_tilde;
  n.y = in.psi_n_prox(A_next, s.y0 - A_next * n.gamma_beta);
  ++t.prox_evals;
  n.z = keep * s.z + w * n.y;
  n.u = (s.y0 - n.y) / A_next;

  t.psi_s_next = in.psi_s_value(n.z);
  ++t.psi_s_evals;
  const double psi_n_z = in.psi_n_value(n.z);
  const double psi_n_y = in.psi_n_value(n.y);
  t.psi_n_evals += 2;
  n.psi_z = t.psi_s_next + psi_n_z;

  const double gamma_y = n.model_value(n.y);
  const double cross = n.u.dot(n.z - n.y);
  n.eps_raw = n.psi_z - gamma_y - psi_n_y - cross;
  // Rounding in eps is driven by the largest terms that cancel, including
  // those inside the linear model.
  const double scale = std::abs(t.psi_s_next) + std::abs(psi_n_z) + std::abs(n.gamma_alpha) +
                       n.gamma_beta.norm() * n.y.norm() + std::abs(psi_n_y) +
                       n.u.norm() * (n.z - n.y).norm();
  n.eps_tol = std::max(1e-12, 1e-12 * scale);
  n.eps = n.eps_raw <= n.eps_tol ? 0.0 : n.eps_raw;
  return n;
}

std::int64_t acg_iteration_bound(double L, double sigma) {
  if (!(L > 0.0) || !(sigma > 0.0)) throw ArgumentError("acg_iteration_bound: L, sigma > 0");
  const double rs = std::sqrt(sigma);
  return static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(2.0 * L) * (1.0 + rs) / rs));
}

AcgCounts run_acg(const AcgInputs& in, AcgState& state, const AcgOptions& opt) {
  if (!(opt.sigma > 0.0 && opt.sigma < 1.0)) throw ArgumentError("run_acg: sigma not in (0,1)");
  in.validate();
  if (state.y0.size() != in.z0.size()) throw DimensionError("run_acg: state/input size mismatch");

  AcgCounts counts;
  auto accepted = [&](const AcgState& s) {
    return s.j >= opt.min_iters && s.j > 0 && s.hpe_satisfied(opt.sigma) &&
           (!opt.predicate || opt.predicate(s));
  };
  if (accepted(state)) return counts;

  AcgStepTrace trace;
  while (true) {
    if (counts.iterations >= opt.max_iters) {
      throw AcgNonConvergence(fmt::format("ACG did not converge in {} iterations", opt.max_iters),
                              state);
    }
    if (opt.deadline && opt.deadline->expired()) throw TimeLimitReached();
    state = acg_step(state, in, &trace);
    ++counts.iterations;
    counts.psi_s_evals += trace.psi_s_evals;
    counts.grad_evals += trace.grad_evals;
    counts.prox_evals += trace.prox_evals;
    counts.psi_n_evals += trace.psi_n_evals;
    if (state.eps_raw < -state.eps_tol) {
      throw ConsistencyError(
          fmt::format("ACG: eps = {:.3e} at iteration {} is negative beyond rounding (tol {:.1e}); "
                      "psi_s is not convex or L is too small",
                      state.eps_raw, state.j, state.eps_tol));
    }
    if (accepted(state)) return counts;
  }
}

AcgState run_acg(const AcgInputs& in, const AcgOptions& opt, AcgCounts* counts) {
  AcgState state = AcgState::initial(in.z0);
  const AcgCounts c = run_acg(in, state, opt);
  if (counts) *counts = c;
  return state;
}

}  // namespace minmax
