#include "minmax/problems/trr.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>

#include "test_support.hpp"

using namespace minmax;
using namespace minmax::testing;

namespace {

const char* kThreeLines =
    "+1 1:0.5 3:1.25\n"
    "-1 2:2 3:-0.75\n"
    "+1 1:1e-3 2:0.1 4:3\n";

std::string parse_error(const std::string& text) {
  try {
    trr_parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("value at x = 0") {
  const auto inst = std::make_shared<const TrrInstance>(trr_parse(kThreeLines, 10.0));
  const MinMaxProblem prob = trr_problem(inst);
  const Vector x = Vector::Zero(4);
  const double each = 10.0 * std::log(1.0 + std::log(2.0) / 10.0);
  for (Index j = 0; j < 3; ++j) {
    CHECK(inst->losses(x)[j] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(inst->truncated_losses(x)[j] == doctest::Approx(each).epsilon(1e-15));
  }
  const Vector y = Vector::Constant(3, 1.0 / 3.0);
  CHECK(prob.phi_value(x, y) == doctest::Approx(each).epsilon(1e-14));
}

TEST_CASE("tau is bounded by 1/alpha") {
  const TrrInstance inst = trr_synthesize(200, 15, 0.4, 21, 10.0);
  RandomStream rng(22, "trr/tau");
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Vector x = 20.0 * normal_vector(rng, 15);
    worst = std::max(worst, inst.tau(x).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1.0 / inst.alpha);
  CHECK(worst > 0.0);
}

TEST_CASE("gradient formula and finite differences") {
  const auto inst = std::make_shared<const TrrInstance>(trr_synthesize(40, 8, 0.5, 5));
  const MinMaxProblem prob = trr_problem(inst);
  RandomStream rng(6, "trr/fd");
  for (int t = 0; t < 20; ++t) {
    const Vector x = normal_vector(rng, 8);
    const Vector y = simplex_point(rng, 40);
    const Vector fd = central_difference([&](const Vector& z) { return prob.phi_value(z, y); }, x, 1e-5);
    const Vector g = prob.grad_x_phi(x, y);
    CHECK(relative_error(g, fd) <= 1e-7);
    Vector expect = Vector::Zero(8);
    const Vector tau = inst->tau(x);
    for (Index j = 0; j < 40; ++j) {
      expect -= inst->alpha * y[j] * inst->b[j] * tau[j] * Vector(inst->A.row(j).transpose());
    }
    CHECK(relative_error(g, expect) <= 1e-12);
    CHECK((prob.grad_y_phi(x, y) - inst->truncated_losses(x)).norm() == 0.0);
    const Vector y0 = normal_vector(rng, 40);
    CHECK((prob.y_resolvent(0.3, x, y0) - project_simplex(y0 + 0.3 * inst->truncated_losses(x))).norm() <=
          1e-15);
  }
}

TEST_CASE("declared constants") {
  const auto inst = std::make_shared<const TrrInstance>(trr_parse(kThreeLines, 10.0));
  const MinMaxProblem prob = trr_problem(inst);
  const double n1 = 0.25 + 1.5625, n2 = 4.0 + 0.5625, n3 = 1e-6 + 0.01 + 9.0;
  CHECK(prob.m == doctest::Approx(n3 / 10.0).epsilon(1e-14));
  CHECK(prob.L_x == prob.m);
  CHECK(prob.L_y == doctest::Approx(std::sqrt(n1 + n2 + n3)).epsilon(1e-14));
  CHECK(prob.D_y == doctest::Approx(std::sqrt(2.0)));
  CHECK(prob.x_set.kind == SetKind::Whole);
}

TEST_CASE("three-line file round-trips") {
  const TrrInstance a = trr_parse(kThreeLines);
  CHECK(a.samples() == 3);
  CHECK(a.features() == 4);
  const std::string text = trr_format_libsvm(a);
  const TrrInstance b = trr_parse(text);
  CHECK(Matrix(a.A) == Matrix(b.A));
  CHECK(a.b == b.b);
  CHECK(trr_format_libsvm(b) == text);

  const auto path = std::filesystem::temp_directory_path() / "minmax_trr_roundtrip.libsvm";
  trr_write_libsvm(path.string(), a);
  const TrrInstance c = trr_load(path.string());
  CHECK(Matrix(c.A) == Matrix(a.A));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(trr_load("/nonexistent/file.libsvm"), ParseError);
}

TEST_CASE("label normalization") {
  const TrrInstance zero_one = trr_parse("0 1:1\n1 1:2\n0 2:1\n");
  CHECK(zero_one.b == (Vector(3) << -1.0, 1.0, -1.0).finished());
  const TrrInstance one_two = trr_parse("2 1:1\n1 1:2\n");
  CHECK(one_two.b == (Vector(2) << 1.0, -1.0).finished());
  const TrrInstance pm = trr_parse("-1 1:1\n+1 1:2\n");
  CHECK(pm.b == (Vector(2) << -1.0, 1.0).finished());
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(parse_error("1 1:1\n2 1:1\n3 1:1\n").find("not binary") != std::string::npos);
  CHECK(parse_error("1 1:1\n-1 2:x\n").find("line 2") != std::string::npos);
  CHECK(parse_error("1 1:1\n-1 1:1\n1 3:1 2:1\n").find("line 3") != std::string::npos);
  CHECK(parse_error("1 0:1\n").find("line 1") != std::string::npos);
  CHECK(parse_error("1 4\n").find("line 1") != std::string::npos);
  CHECK(parse_error("").find("no samples") != std::string::npos);
}

TEST_CASE("synthetic data is deterministic") {
  const TrrInstance a = trr_synthesize(50, 10, 0.3, 9);
  const TrrInstance b = trr_synthesize(50, 10, 0.3, 9);
  CHECK(trr_format_libsvm(a) == trr_format_libsvm(b));
  CHECK(a.b.cwiseAbs() == Vector::Ones(50));
}
