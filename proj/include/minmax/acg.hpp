#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "minmax/types.hpp"

namespace minmax {

/// Data of the composite subproblem min psi_s + psi_n.
///
/// psi_n is mu-strongly convex with an exact prox
///   psi_n_prox(alpha, a) = argmin_y { psi_n(y) + |y - a|^2 / (2 alpha) }
/// and psi_s is convex with an L-Lipschitz gradient.
struct AcgInputs {
  double mu = 0.0;
  double L = 1.0;
  std::function<double(const Vector&)> psi_s_value;
  std::function<Vector(const Vector&)> psi_s_grad;
  // Optional fused value+gradient; used in place of the two above when set.
  std::function<std::pair<double, Vector>(const Vector&)> psi_s_value_grad;
  std::function<Vector(double alpha, const Vector& a)> psi_n_prox;
  std::function<double(const Vector&)> psi_n_value;
  Vector z0;

  void validate() const;
};

/// Iterate of the method. Gamma_j(y) = gamma_alpha + <gamma_beta, y> is the
/// running affine lower model of psi_s.
struct AcgState {
  std::int64_t j = 0;
  double A = 0.0;
  Vector y0;
  Vector z;
  Vector y;
  double gamma_alpha = 0.0;
  Vector gamma_beta;
  Vector u;
  double eps = 0.0;      // eps_raw, or 0 when within rounding (<= eps_tol)
  double eps_raw = 0.0;  // as computed, may carry rounding below 0
  double eps_tol = 0.0;  // rounding allowance for eps_raw at this iterate
  double psi_z = 0.0;    // psi_s(z) + psi_n(z)

  static AcgState initial(const Vector& z0);

  /// |z0 - z + u|
  double hpe_residual() const { return (y0 - z + u).norm(); }
  /// |u|^2 + 2 eps <= sigma |z0 - z + u|^2
  bool hpe_satisfied(double sigma) const;
  double model_value(const Vector& x) const { return gamma_alpha + gamma_beta.dot(x); }
};

/// Quantities produced by one step that backtracking callers need.
struct AcgStepTrace {
  Vector z_tilde;
  double psi_s_tilde = 0.0;
  Vector grad_tilde;
  double psi_s_next = 0.0;  // psi_s(z_{j+1})
  std::int64_t psi_s_evals = 0;
  std::int64_t grad_evals = 0;
  std::int64_t prox_evals = 0;
  std::int64_t psi_n_evals = 0;

  /// psi_s(z_{j+1}) minus its linearization at z_tilde.
  double linearization_gap(const Vector& z_next) const {
    return psi_s_next - psi_s_tilde - grad_tilde.dot(z_next - z_tilde);
  }
};

/// One iteration of the accelerated composite gradient method.
AcgState acg_step(const AcgState& state, const AcgInputs& inputs, AcgStepTrace* trace = nullptr);

/// ceil(2 sqrt(2L) (1 + sqrt(sigma)) / sqrt(sigma)).
std::int64_t acg_iteration_bound(double L, double sigma);

class AcgNonConvergence : public Error {
 public:
  AcgNonConvergence(const std::string& what, AcgState last)
      : Error(what), last_state(std::move(last)) {}
  AcgState last_state;
};

struct AcgOptions {
  double sigma = 0.5;
  std::int64_t min_iters = 0;
  std::int64_t max_iters = 10'000'000;
  // Extra acceptance condition checked together with the HPE inequality.
  std::function<bool(const AcgState&)> predicate;
  const Deadline* deadline = nullptr;
};

struct AcgCounts {
  std::int64_t iterations = 0;
  std::int64_t psi_s_evals = 0;
  std::int64_t grad_evals = 0;
  std::int64_t prox_evals = 0;
  std::int64_t psi_n_evals = 0;
};

/// Iterates until state.j >= min_iters, the HPE inequality holds and the
/// predicate (if any) accepts. `state` is advanced in place so a later call
/// resumes where this one stopped. Throws AcgNonConvergence after max_iters
/// steps in this call, ConsistencyError when eps is clearly negative, and
/// TimeLimitReached when the deadline expires.
AcgCounts run_acg(const AcgInputs& inputs, AcgState& state, const AcgOptions& options);

/// Convenience overload starting from inputs.z0.
AcgState run_acg(const AcgInputs& inputs, const AcgOptions& options, AcgCounts* counts = nullptr);

}  // namespace minmax
