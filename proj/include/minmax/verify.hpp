#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minmax/certificate_io.hpp"
#include "minmax/problem.hpp"

namespace minmax {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed() const;
  const VerifyCheck* find(const std::string& name) const;
  std::string to_text() const;
};

struct VerifyTolerances {
  double inclusion = 1e-7;  // relative to 1 + |gradient|
  double norm_slack = 1e-9; // relative slack on the residual norm targets
  double dominance = 1e-8;  // Nash residuals vs stored norms
  double sandwich = 1e-9;   // relative to 1 + |p(x)|
  double y_match = 1e-8;    // recomputed y_xi vs stored y_bar
  double multiplier = 1e-10;
};

/// Re-derives every residual of a certificate from the problem oracles:
///   u_residual    u_bar - grad_x Phi(x_bar, y_bar) - A* r_bar in N_X(x_bar)
///                 and |u_bar| <= rho_bar (rho_bar recomputed from x0)
///   y_recompute   y_bar = y_xi(x_bar) from a fresh resolvent solve
///   v_residual    |(y0 - y_xi(x_bar)) / xi| <= rho_y
///   v_inclusion   v_bar + grad_y Phi(x_bar, y_bar) in N_Y(y_bar)
///   nash          Nash residuals <= stored (|u|, |v|) + slack
///   sandwich      p(x) - D_y^2 / (2 xi) <= p_xi(x) <= p(x) at x_bar
///   feasibility   |A x_bar - b| <= eta    (constrained only)
///   multiplier    r_bar = c (A x_bar - b) (constrained only)
/// Throws DimensionError when the certificate does not fit the problem.
VerifyReport verify_certificate(const MinMaxProblem& problem,
                                const std::optional<LinearConstraint>& constraint,
                                const CertificateRecord& record,
                                const VerifyTolerances& tol = {});

}  // namespace minmax
