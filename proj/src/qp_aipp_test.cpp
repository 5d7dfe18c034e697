#include "minmax/qp_aipp.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

#include "minmax/problems/qvm.hpp"
#include "test_support.hpp"

using namespace minmax;
using namespace minmax::testing;

namespace {

CompositeOracles zero_f_on_box(double lo, double hi) {
  const ConvexSet box = ConvexSet::box(lo, hi);
  CompositeOracles o;
  o.f_value = [](const Vector&) { return 0.0; };
  o.f_grad = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
  o.h_resolvent = [box](double, const Vector& x) { return box.project(x); };
  o.h_value = [box](const Vector& x) { return indicator_value(box, x); };
  return o;
}

// Nearest point of {x1 + x2 = 1} intersected with [0, 1]^2.
Vector project_segment(const Vector& x) {
  const double t = std::clamp(0.5 * (x[0] - x[1] + 1.0), 0.0, 1.0);
  Vector p(2);
  p << t, 1.0 - t;
  return p;
}

}  // namespace

TEST_CASE("two-dimensional toy: segment solution set and the exact doubling trace") {
  Matrix A(1, 2);
  A << 1.0, 1.0;
  const LinearConstraint con = LinearConstraint::from_dense(A, Vector::Constant(1, 1.0));
  CHECK(con.norm_A == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  const CompositeOracles o = zero_f_on_box(0.0, 1.0);
  QpAippConfig cfg;
  const double rho_bar = 1e-2, eta_bar = 1e-4, M = 1.0;
  const QpAippResult r = qp_aipp_solve(o, 1.0, M, con, cfg, Vector::Zero(2), rho_bar, eta_bar);
  CHECK(r.report.termination == Termination::Converged);
  REQUIRE(r.rounds.size() >= 2);
  const double c0 = M / (con.norm_A * con.norm_A);
  for (std::size_t i = 0; i < r.rounds.size(); ++i) {
    CHECK(r.rounds[i].c == c0 * std::ldexp(1.0, static_cast<int>(i)));
    if (i + 1 < r.rounds.size()) CHECK(r.rounds[i].feasibility > eta_bar);
  }
  CHECK(r.rounds.back().feasibility <= eta_bar);
  CHECK(r.c_final == r.rounds.back().c);
  CHECK(*r.report.penalty_c_final == r.c_final);

  const Vector resid = con.residual(r.x_bar);
  CHECK(resid.norm() <= eta_bar);
  CHECK(r.u_bar.norm() <= rho_bar);
  CHECK((r.r_bar - r.c_final * resid).norm() == 0.0);
  CHECK((r.x_bar - project_segment(r.x_bar)).norm() <= eta_bar);
  const Vector g = o.f_grad(r.x_bar) + con.A.apply_adjoint(r.r_bar) - r.u_bar;
  CHECK(normal_cone_distance(ConvexSet::box(0.0, 1.0), r.x_bar, g) <= 1e-8);
}

TEST_CASE("feasible stationary start finishes in the first penalty round") {
  Matrix A(1, 2);
  A << 1.0, 1.0;
  const LinearConstraint con = LinearConstraint::from_dense(A, Vector::Constant(1, 1.0));
  QpAippConfig cfg;
  cfg.hat_c = 3.0;
  const QpAippResult r =
      qp_aipp_solve(zero_f_on_box(0.0, 1.0), 1.0, 1.0, con, cfg, Vector::Constant(2, 0.5), 1e-6, 1e-6);
  CHECK(r.rounds.size() == 1);
  CHECK(r.c_final == doctest::Approx(3.0 + 0.5));
  CHECK(r.u_bar.norm() == 0.0);
}

TEST_CASE("penalized gradient matches finite differences of f_c") {
  RandomStream rng(81, "qp/fd");
  const Matrix G = Matrix::Random(4, 4);
  const Matrix H = 0.5 * (G + G.transpose());
  Matrix A(2, 4);
  for (Index j = 0; j < 4; ++j) {
    for (Index i = 0; i < 2; ++i) A(i, j) = rng.normal();
  }
  const Vector b = normal_vector(rng, 2);
  const LinearConstraint con = LinearConstraint::from_dense(A, b);
  CompositeOracles o;
  o.f_value = [H](const Vector& x) { return 0.5 * x.dot(H * x); };
  o.f_grad = [H](const Vector& x) { return Vector(H * x); };
  o.h_resolvent = [](double, const Vector& x) { return x; };
  o.h_value = [](const Vector&) { return 0.0; };
  const CompositeOracles pen = penalized_oracles(o, con, 7.5);
  for (int t = 0; t < 100; ++t) {
    const Vector x = normal_vector(rng, 4);
    CHECK(pen.f_value(x) ==
          doctest::Approx(o.f_value(x) + 3.75 * (A * x - b).squaredNorm()).epsilon(1e-13));
    const Vector fd = central_difference(pen.f_value, x, 1e-5);
    CHECK(relative_error(pen.f_grad(x), fd) <= 1e-7);
    const auto [v, g] = pen.value_grad(x);
    CHECK(v == doctest::Approx(pen.f_value(x)).epsilon(1e-14));
    CHECK((g - pen.f_grad(x)).norm() <= 1e-12 * (1.0 + g.norm()));
  }
}

TEST_CASE("unreachable constraint raises a divergence error") {
  Matrix A(1, 2);
  A << 1.0, 1.0;
  const LinearConstraint con = LinearConstraint::from_dense(A, Vector::Constant(1, 5.0));
  QpAippConfig cfg;
  cfg.max_doublings = 6;
  CHECK_THROWS_AS(qp_aipp_solve(zero_f_on_box(0.0, 1.0), 1.0, 1.0, con, cfg, Vector::Zero(2), 1e-3, 1e-3),
                  DivergenceError);
  cfg.hat_c = -1.0;
  CHECK_THROWS_AS(qp_aipp_solve(zero_f_on_box(0.0, 1.0), 1.0, 1.0, con, cfg, Vector::Zero(2), 1e-3, 1e-3),
                  ArgumentError);
}

TEST_CASE("constrained QVM: all three residuals and the multiplier identity") {
  QvmParams p;
  p.n = 12;
  p.l = 4;
  p.k = 3;
  p.density = 0.3;
  p.seed = 2;
  const auto inst = std::make_shared<const QvmInstance>(qvm_generate(p));
  const MinMaxProblem prob = qvm_problem(inst);
  RandomStream rng(83, "qp/qvm");
  Matrix A(2, 12);
  for (Index j = 0; j < 12; ++j) {
    for (Index i = 0; i < 2; ++i) A(i, j) = rng.normal();
  }
  const Vector xf = simplex_point(rng, 12);
  const LinearConstraint con = LinearConstraint::from_dense(A, A * xf);
  const Vector x0 = Vector::Constant(12, 1.0 / 12.0);
  const Vector y0 = Vector::Zero(3);
  const QpPrimalDualResult r = qp_aipp_s_solve(prob, con, 1e-2, 1e-1, 1e-3, x0, y0);
  CHECK(r.report.termination == Termination::Converged);
  CHECK(r.cert.norm_u <= 1e-2);
  CHECK(r.cert.norm_v <= 1e-1);
  CHECK(*r.cert.feas_violation <= 1e-3);
  REQUIRE(r.cert.r_bar);
  CHECK((*r.cert.r_bar - *r.report.penalty_c_final * con.residual(r.cert.x_bar)).norm() <= 1e-10);
  const SmoothedObjective s(prob, r.xi, y0);
  const Vector g = s.gradient(r.cert.x_bar) + con.A.apply_adjoint(*r.cert.r_bar) - r.cert.u_bar;
  CHECK(normal_cone_distance(prob.x_set, r.cert.x_bar, g) <= 1e-8);
  CHECK(r.rounds.front().c == doctest::Approx(s.L_xi() / (con.norm_A * con.norm_A)).epsilon(1e-14));
}

TEST_CASE("redundant constraint on the simplex needs a single round") {
  QvmParams p;
  p.n = 8;
  p.l = 3;
  p.k = 2;
  p.density = 0.4;
  p.seed = 4;
  const MinMaxProblem prob = qvm_problem(std::make_shared<const QvmInstance>(qvm_generate(p)));
  const LinearConstraint con =
      LinearConstraint::from_dense(Matrix::Ones(1, 8), Vector::Constant(1, 1.0));
  const QpPrimalDualResult r = qp_aipp_s_solve(prob, con, 1e-2, 1e-1, 1e-6,
                                               Vector::Constant(8, 0.125), Vector::Zero(2));
  CHECK(r.rounds.size() == 1);
  CHECK(r.report.termination == Termination::Converged);
}
