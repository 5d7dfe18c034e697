#include "minmax/verify.hpp"

#include <fmt/format.h>

#include <cmath>

#include "minmax/smoothing.hpp"

namespace minmax {

bool VerifyReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

const VerifyCheck* VerifyReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string VerifyReport::to_text() const {
  std::string s;
  for (const auto& c : checks) {
    s += fmt::format("{:<12} {}  measured={:.6e}  bound={:.6e}", c.name, c.passed ? "PASS" : "FAIL",
                     c.measured, c.bound);
    if (!c.detail.empty()) s += "  (" + c.detail + ")";
    s += '\n';
  }
  s += fmt::format("overall      {}\n", passed() ? "PASS" : "FAIL");
  return s;
}

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

void check_dims(const MinMaxProblem& p, const std::optional<LinearConstraint>& con,
                const CertificateRecord& r) {
  const auto& c = r.cert;
  auto fail = [](std::string what) { throw DimensionError("certificate does not fit instance: " + what); };
  if (r.n_x != p.n_x || r.n_y != p.n_y) {
    fail(fmt::format("dims ({}, {}) vs ({}, {})", r.n_x, r.n_y, p.n_x, p.n_y));
  }
  if (c.x_bar.size() != p.n_x || c.u_bar.size() != p.n_x || r.x0.size() != p.n_x) fail("x-block length");
  if (c.y_bar.size() != p.n_y || c.v_bar.size() != p.n_y || r.y0.size() != p.n_y) fail("y-block length");
  if (c.r_bar) {
    if (!con) fail("certificate carries a multiplier but the instance has no constraint");
    if (c.r_bar->size() != con->A.rows) fail("multiplier length");
  }
}

}  // namespace

VerifyReport verify_certificate(const MinMaxProblem& problem,
                                const std::optional<LinearConstraint>& constraint,
                                const CertificateRecord& rec, const VerifyTolerances& tol) {
  check_dims(problem, constraint, rec);
  if (!(rec.xi > 0.0)) throw ArgumentError("certificate has nonpositive xi");
  const auto& c = rec.cert;
  VerifyReport rep;
  auto add = [&rep](std::string name, bool ok, double measured, double bound, std::string detail = {}) {
    rep.checks.push_back({std::move(name), ok, measured, bound, std::move(detail)});
  };

  const bool finite = all_finite(c.x_bar) && all_finite(c.y_bar) && all_finite(c.u_bar) &&
                      all_finite(c.v_bar) && (!c.r_bar || all_finite(*c.r_bar));
  add("finite", finite, finite ? 0.0 : 1.0, 0.0);
  if (!finite) return rep;

  const bool x_in = problem.x_set.contains(c.x_bar);
  const bool y_in = problem.y_set.contains(c.y_bar);
  add("domain", x_in && y_in, (x_in ? 0.0 : 1.0) + (y_in ? 0.0 : 1.0), 0.0,
      x_in && y_in ? "" : "x_bar or y_bar outside its set");
  if (!(x_in && y_in)) return rep;

  const SmoothedObjective smoothed(problem, rec.xi, rec.y0);
  const bool constrained = c.r_bar.has_value();
  Vector A_star_r = Vector::Zero(problem.n_x);
  if (constrained) A_star_r = constraint->A.apply_adjoint(*c.r_bar);

  // u: inclusion then target norm.
  {
    const Vector grad = problem.grad_x_phi(c.x_bar, c.y_bar) + A_star_r;
    const double incl = normal_cone_distance(problem.x_set, c.x_bar, grad - c.u_bar);
    const double incl_bound = tol.inclusion * (1.0 + grad.norm());
    const double g0 = smoothed.gradient(rec.x0).norm();
    const double rho_bar = rec.relative ? rec.rho_x * (g0 + 1.0) : rec.rho_x;
    const double nu = c.u_bar.norm();
    const bool ok = incl <= incl_bound && nu <= rho_bar * (1.0 + tol.norm_slack);
    add("u_residual", ok, nu, rho_bar,
        fmt::format("inclusion gap {:.3e} (tol {:.3e})", incl, incl_bound));
  }

  // v: fresh resolvent solve.
  const Vector y_fresh = smoothed.y_xi(c.x_bar);
  {
    const double dy = (y_fresh - c.y_bar).norm();
    add("y_recompute", dy <= tol.y_match * (1.0 + c.y_bar.norm()), dy, tol.y_match * (1.0 + c.y_bar.norm()));
    const double nv = ((rec.y0 - y_fresh) / rec.xi).norm();
    add("v_residual", nv <= rec.rho_y * (1.0 + tol.norm_slack), nv, rec.rho_y);
  }
  if (problem.has_y_gradient()) {
    const Vector gy = problem.grad_y_phi(c.x_bar, c.y_bar);
    const double incl = normal_cone_distance(problem.y_set, c.y_bar, -gy - c.v_bar);
    const double bound = tol.inclusion * (1.0 + gy.norm());
    add("v_inclusion", incl <= bound, incl, bound);

    const double rx = normal_cone_distance(problem.x_set, c.x_bar, problem.grad_x_phi(c.x_bar, c.y_bar) + A_star_r);
    const double ry = normal_cone_distance(problem.y_set, c.y_bar, -gy);
    const bool ok = rx <= c.norm_u + tol.dominance && ry <= c.norm_v + tol.dominance;
    add("nash", ok, std::max(rx - c.norm_u, ry - c.norm_v), tol.dominance,
        fmt::format("rx={:.3e} ry={:.3e}", rx, ry));
  }

  if (problem.max_value) {
    const double p = problem.max_value(c.x_bar);
    const double pxi = smoothed.value(c.x_bar);
    const double slack = tol.sandwich * (1.0 + std::abs(p));
    const double lower = p - problem.D_y * problem.D_y / (2.0 * rec.xi);
    // Positive measured value means one side of the sandwich is violated.
    const double excess = std::max(pxi - p, lower - pxi);
    add("sandwich", excess <= slack, excess, slack, fmt::format("p={:.6e} p_xi={:.6e}", p, pxi));
  }

  if (constrained) {
    const Vector res = constraint->residual(c.x_bar);
    const double feas = res.norm();
    const double eta = rec.eta.value_or(0.0);
    add("feasibility", rec.eta.has_value() && feas <= eta * (1.0 + tol.norm_slack), feas, eta);
    if (rec.penalty_c) {
      const Vector expect = *rec.penalty_c * res;
      const double err = (expect - *c.r_bar).norm();
      const double bound = tol.multiplier * (1.0 + expect.norm());
      add("multiplier", err <= bound, err, bound);
    } else {
      add("multiplier", false, INFINITY, 0.0, "certificate lacks the penalty parameter");
    }
  }
  return rep;
}

}  // namespace minmax
