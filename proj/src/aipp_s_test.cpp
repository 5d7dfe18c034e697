#include "minmax/aipp_s.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

#include "minmax/problems/qvm.hpp"
#include "test_support.hpp"

using namespace minmax;
using namespace minmax::testing;

namespace {

MinMaxProblem tiny_qvm(std::uint64_t seed, Index n, Index k) {
  QvmParams p;
  p.n = n;
  p.l = 2;
  p.k = k;
  p.M = 10.0;
  p.m = 1.0;
  p.density = 0.5;
  p.seed = seed;
  return qvm_problem(std::make_shared<const QvmInstance>(qvm_generate(p)));
}

// dist(0, g + N_box(x)) found by scanning each normal-cone coordinate.
double box_cone_search(const Vector& x, const Vector& g, double lo, double hi) {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    double best = std::abs(g[i]);
    for (int t = 0; t <= 20000; ++t) {
      const double w = 10.0 * t / 20000.0;
      if (x[i] <= lo) best = std::min(best, std::abs(g[i] - w));
      if (x[i] >= hi) best = std::min(best, std::abs(g[i] + w));
    }
    s += best * best;
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("directional tau by substitution") {
  CHECK(directional_tau(0.1, 1.0, std::sqrt(2.0)) == doctest::Approx(2.2097086912079608e-4).epsilon(1e-12));
  // the first branch is active when m is small
  CHECK(directional_tau(0.1, 0.01, 2.0) == doctest::Approx(0.01 * 0.01 / 4.0).epsilon(1e-12));
}

TEST_CASE("near-directional certificate bounds") {
  StationaryCertificate c;
  c.u_bar = Vector::Constant(1, 0.3);
  c.v_bar = Vector::Zero(2);
  c.refresh_norms();
  const DirectionalBounds zero = near_directional_certificate(c, 1.0, std::sqrt(2.0));
  CHECK(zero.dd_lower_bound == doctest::Approx(-0.3).epsilon(1e-15));
  CHECK(zero.distance_bound == 0.0);

  c.u_bar = Vector::Constant(1, 1e-2);
  c.v_bar = Vector::Zero(2);
  c.v_bar[1] = 1e-1;
  c.refresh_norms();
  const DirectionalBounds b = near_directional_certificate(c, 1.0, std::sqrt(2.0));
  CHECK(b.dd_lower_bound == doctest::Approx(-1.0736591793889978).epsilon(1e-12));
  CHECK(b.distance_bound == doctest::Approx(0.5318295896944989).epsilon(1e-12));
}

TEST_CASE("prox stationarity thresholds") {
  CHECK(prox_stationarity_bounds(0.5, 1.0, 1.0, ProxDirection::DeltaToEps) ==
        doctest::Approx(1.0 / 14.0).epsilon(1e-15));
  CHECK(prox_stationarity_bounds(2.0, 0.1, 0.1, ProxDirection::EpsToDelta) ==
        doctest::Approx(0.05).epsilon(1e-15));
  CHECK(prox_stationarity_bounds(0.5, 1.0, 0.1, ProxDirection::EpsToDelta) ==
        doctest::Approx(0.1).epsilon(1e-15));
  // lambda -> 1/m from below: lambda^3 eps / lambda^2 = lambda eps
  const double lambda = 1.0 - 1e-9;
  CHECK(prox_stationarity_bounds(lambda, 1.0, 2.0, ProxDirection::DeltaToEps) ==
        doctest::Approx(2.0 * lambda).epsilon(1e-8));
  CHECK_THROWS_AS(prox_stationarity_bounds(1.0, 1.0, 1.0, ProxDirection::DeltaToEps), ArgumentError);
  CHECK_THROWS_AS(prox_stationarity_bounds(0.0, 1.0, 1.0, ProxDirection::EpsToDelta), ArgumentError);
}

TEST_CASE("Nash residuals: exact saddle, infeasible candidates and missing gradients") {
  Matrix C(2, 3);
  C << 1.0, -1.0, 0.5, 0.0, 2.0, -1.0;
  const MinMaxProblem prob = bilinear_box_problem(C, 0.5, -1.0, 1.0);
  const NashResiduals saddle = nash_residuals(prob, Vector::Zero(3), Vector::Zero(2));
  CHECK(saddle.rx == 0.0);
  CHECK(saddle.ry == 0.0);

  RandomStream rng(71, "aipp_s/nash");
  for (int t = 0; t < 10; ++t) {
    Vector x = uniform_vector(rng, 3, -1.0, 1.0);
    Vector y = uniform_vector(rng, 2, -1.0, 1.0);
    x[t % 3] = (t % 2) ? 1.0 : -1.0;
    y[t % 2] = 1.0;
    const NashResiduals r = nash_residuals(prob, x, y);
    CHECK(r.rx > 0.0);
    CHECK(r.rx == doctest::Approx(box_cone_search(x, prob.grad_x_phi(x, y), -1.0, 1.0)).epsilon(1e-6));
    CHECK(r.ry == doctest::Approx(box_cone_search(y, -prob.grad_y_phi(x, y), -1.0, 1.0)).epsilon(1e-6));
  }
  MinMaxProblem blind = prob;
  blind.grad_y_phi = nullptr;
  CHECK_THROWS_AS(nash_residuals(blind, Vector::Zero(3), Vector::Zero(2)), UnsupportedError);
}

TEST_CASE("singleton Y: v = 0 and the scheme is plain AIPP on Phi(., y0)") {
  Matrix C(1, 3);
  C << 1.0, 0.5, -2.0;
  const MinMaxProblem prob = bilinear_box_problem(C, 1.0, 0.4, 0.4);
  const Vector y0 = Vector::Constant(1, 0.4);
  const Vector x0 = Vector::Constant(3, 0.2);
  CHECK(default_xi(prob, 0.1) == doctest::Approx(10.0));
  const PrimalDualResult r = solve_primal_dual(prob, 1e-6, 0.1, x0, y0);
  CHECK(r.report.termination == Termination::Converged);
  CHECK(r.cert.v_bar.norm() == 0.0);

  CompositeOracles o;
  o.f_value = [&](const Vector& x) { return prob.phi_value(x, y0); };
  o.f_grad = [&](const Vector& x) { return prob.grad_x_phi(x, y0); };
  o.h_resolvent = prob.h_resolvent;
  o.h_value = prob.h_value;
  AippConfig cfg;
  cfg.rho_bar = 1e-6;
  const SmoothingConstants sc = smoothing_constants(prob, r.xi);
  const AippResult a = aipp_solve(o, prob.m, sc.L_xi, cfg, x0);
  CHECK((a.x_bar - r.cert.x_bar).norm() <= 1e-12);
}

TEST_CASE("small QVM: certificate residuals recomputed from scratch") {
  const MinMaxProblem prob = tiny_qvm(3, 2, 2);
  const Vector x0 = Vector::Constant(2, 0.5);
  const Vector y0 = Vector::Zero(2);
  for (InnerMethod inner : {InnerMethod::Aipp, InnerMethod::Raipp}) {
    AippSOptions opt;
    opt.inner = inner;
    const PrimalDualResult r = solve_primal_dual(prob, 1e-2, 1e-1, x0, y0, opt);
    CHECK(r.report.termination == Termination::Converged);
    CHECK(r.xi == doctest::Approx(std::sqrt(2.0) / 0.1).epsilon(1e-15));
    const SmoothedObjective s(prob, r.xi, y0);
    const Vector y = s.y_xi(r.cert.x_bar);
    const Vector v = (y0 - y) / r.xi;
    CHECK((v - r.cert.v_bar).norm() <= 1e-10);
    CHECK(v.norm() <= 1e-1);
    CHECK(r.cert.u_bar.norm() <= 1e-2);
    const NashResiduals nr = nash_residuals(prob, r.cert.x_bar, r.cert.y_bar);
    CHECK(nr.rx <= r.cert.norm_u + 1e-8);
    CHECK(nr.ry <= r.cert.norm_v + 1e-8);
  }
}

TEST_CASE("halving rho_x never increases the final residual") {
  const MinMaxProblem prob = tiny_qvm(5, 8, 3);
  const Vector x0 = Vector::Constant(8, 1.0 / 8.0);
  const Vector y0 = Vector::Zero(3);
  double prev = INFINITY;
  for (double rho : {4e-2, 2e-2, 1e-2, 5e-3}) {
    const PrimalDualResult r = solve_primal_dual(prob, rho, 1e-1, x0, y0);
    CHECK(r.cert.norm_u <= rho);
    CHECK(r.cert.norm_u <= prev);
    prev = r.cert.norm_u;
    const PrimalDualResult again = solve_primal_dual(prob, rho, 1e-1, x0, y0);
    CHECK(again.cert.x_bar == r.cert.x_bar);
  }
}

TEST_CASE("relative criterion scales the target by |grad p_xi(x0)| + 1") {
  const MinMaxProblem prob = tiny_qvm(7, 8, 3);
  const Vector x0 = Vector::Constant(8, 1.0 / 8.0);
  AippSOptions opt;
  opt.relative = true;
  const PrimalDualResult r = solve_primal_dual(prob, 1e-2, 1e-1, x0, Vector::Zero(3), opt);
  const SmoothedObjective s(prob, r.xi, Vector::Zero(3));
  CHECK(r.grad_norm_x0 == doctest::Approx(s.gradient(x0).norm()).epsilon(1e-14));
  CHECK(r.rho_bar == doctest::Approx(1e-2 * (r.grad_norm_x0 + 1.0)).epsilon(1e-14));
  CHECK(r.norm_u_rel <= 1e-2);
}

TEST_CASE("directional mode: tau, bounds and the trivial large-delta case") {
  const MinMaxProblem prob = tiny_qvm(9, 6, 2);
  const Vector x0 = Vector::Constant(6, 1.0 / 6.0);
  const double delta = 0.5;
  const DirectionalResult d = solve_directional(prob, delta, x0, Vector::Zero(2));
  CHECK(d.tau == doctest::Approx(directional_tau(delta, prob.m, prob.D_y)).epsilon(1e-15));
  CHECK(d.rho_x == delta / 2.0);
  CHECK(d.primal_dual.report.termination == Termination::Converged);
  const double bound = -delta / 2.0 - 2.0 * std::sqrt(2.0 * prob.m * prob.D_y * d.tau);
  CHECK(bound >= -delta - 1e-12);
  CHECK(std::sqrt(2.0 * prob.D_y * d.tau / prob.m) <= delta + 1e-12);
  CHECK(d.bounds.dd_lower_bound >= bound - 1e-12);
  CHECK(d.bounds.distance_bound <= d.target_bounds.distance_bound + 1e-12);
  CHECK(d.target_bounds.dd_lower_bound == doctest::Approx(bound).epsilon(1e-12));

  const DirectionalResult big = solve_directional(prob, 1e3, x0, Vector::Zero(2));
  CHECK(big.primal_dual.report.termination == Termination::Converged);
  CHECK(big.primal_dual.report.outer_iterations == 1);
}

TEST_CASE("omega_xi formula") {
  Matrix C(1, 2);
  C << 3.0, 4.0;
  const MinMaxProblem prob = bilinear_box_problem(C, 4.0, 0.0, 1.0);
  CHECK(prob.L_y == doctest::Approx(5.0));
  CHECK(omega_xi(prob, 9.0) == doctest::Approx(1.0 + (3.0 * 5.0 + 2.0) / 2.0));
}
