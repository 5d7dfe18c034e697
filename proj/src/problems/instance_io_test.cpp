#include "minmax/problems/instance_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>

#include "test_support.hpp"

using namespace minmax;
using namespace minmax::testing;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("minmax_io_" + name);
}

// Compares oracle outputs of two instances at random points.
void check_same_problem(const InstanceData& a, const InstanceData& b) {
  const MinMaxProblem pa = a.problem();
  const MinMaxProblem pb = b.problem();
  REQUIRE(pa.n_x == pb.n_x);
  REQUIRE(pa.n_y == pb.n_y);
  CHECK(pa.m == pb.m);
  CHECK(pa.L_x == pb.L_x);
  CHECK(pa.L_y == pb.L_y);
  CHECK(pa.D_y == pb.D_y);
  CHECK(a.initial_x() == b.initial_x());
  CHECK(a.initial_y() == b.initial_y());
  RandomStream rng(1, "io/points");
  for (int t = 0; t < 5; ++t) {
    const Vector x = pa.x_set.project(normal_vector(rng, pa.n_x));
    const Vector y = pa.y_set.project(normal_vector(rng, pa.n_y));
    CHECK(pa.phi_value(x, y) == pb.phi_value(x, y));
    CHECK(pa.grad_x_phi(x, y) == pb.grad_x_phi(x, y));
    CHECK(pa.y_resolvent(0.5, x, y) == pb.y_resolvent(0.5, x, y));
  }
}

InstanceData round_trip(const InstanceData& d, const std::string& name) {
  const auto path = temp_file(name);
  save_instance(path.string(), d);
  InstanceData back = load_instance(path.string());
  std::filesystem::remove(path);
  return back;
}

}  // namespace

TEST_CASE("QVM round trip with a constraint") {
  QvmParams p;
  p.n = 15;
  p.l = 4;
  p.k = 3;
  p.seed = 3;
  InstanceData d = make_instance(std::make_shared<const QvmInstance>(qvm_generate(p)));
  attach_random_constraint(d, 2, 4);
  const InstanceData back = round_trip(d, "qvm.inst");
  CHECK(back.family == "qvm");
  CHECK(back.seed == 3);
  CHECK(back.qvm->alpha == d.qvm->alpha);
  CHECK(back.qvm->lambda_min == d.qvm->lambda_min);
  CHECK(back.qvm->M_target == d.qvm->M_target);
  REQUIRE(back.constraint_A);
  CHECK(*back.constraint_A == *d.constraint_A);
  CHECK(*back.constraint_b == *d.constraint_b);
  check_same_problem(d, back);
}

TEST_CASE("TRR and PC round trips") {
  const InstanceData trr = make_instance(std::make_shared<const TrrInstance>(trr_synthesize(30, 7, 0.4, 5)));
  const InstanceData trr_back = round_trip(trr, "trr.inst");
  CHECK(trr_back.family == "trr");
  CHECK(Matrix(trr_back.trr->A) == Matrix(trr.trr->A));
  CHECK(trr_back.trr->b == trr.trr->b);
  check_same_problem(trr, trr_back);

  const InstanceData pc = make_instance(std::make_shared<const PcInstance>(pc_generate(3, 2, 6)));
  const InstanceData pc_back = round_trip(pc, "pc.inst");
  CHECK(pc_back.family == "pc");
  CHECK(pc_back.pc->A == pc.pc->A);
  CHECK(pc_back.pc->B == pc.pc->B);
  CHECK(!pc_back.constraint());
  check_same_problem(pc, pc_back);
}

TEST_CASE("initial points") {
  QvmParams p;
  p.n = 10;
  p.l = 3;
  p.k = 2;
  p.density = 0.3;
  const InstanceData q = make_instance(std::make_shared<const QvmInstance>(qvm_generate(p)));
  CHECK(q.initial_x() == Vector::Constant(10, 0.1));
  CHECK(q.initial_y() == Vector::Zero(2));
  const InstanceData pc = make_instance(std::make_shared<const PcInstance>(pc_generate(2, 2, 1)));
  CHECK(pc.initial_x() == Vector::Zero(4));
  CHECK(pc.initial_y() == Vector::Zero(2));
}

TEST_CASE("random constraint has a feasible right-hand side in dom h") {
  const InstanceData pc0 = make_instance(std::make_shared<const PcInstance>(pc_generate(2, 3, 2)));
  InstanceData pc = pc0;
  attach_random_constraint(pc, 3, 8);
  CHECK(pc.constraint_A->rows() == 3);
  CHECK(pc.constraint_A->cols() == 6);
  const LinearConstraint con = *pc.constraint();
  CHECK(con.norm_A > 0.0);
  CHECK_THROWS_AS(attach_random_constraint(pc, 0, 1), ArgumentError);
}

TEST_CASE("manifest and malformed containers") {
  const InstanceData pc = make_instance(std::make_shared<const PcInstance>(pc_generate(5, 5, 1)));
  const std::string manifest = instance_manifest(pc);
  CHECK(manifest.find("family = pc\n") != std::string::npos);
  CHECK(manifest.find("N = 5\n") != std::string::npos);
  CHECK(manifest.find("K = 5\n") != std::string::npos);
  CHECK(manifest.find("seed = 1\n") != std::string::npos);

  const auto path = temp_file("manifest.inst");
  save_instance_with_manifest(path.string(), pc);
  CHECK(std::filesystem::exists(path.string() + ".manifest"));
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  CHECK(bytes.substr(0, 7) == "MMXINST");

  const auto bad = temp_file("bad.inst");
  {
    std::ofstream out(bad, std::ios::binary);
    out << "NOTANINSTANCE";
  }
  CHECK_THROWS_AS(load_instance(bad.string()), ParseError);
  {
    std::ofstream out(bad, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(load_instance(bad.string()), ParseError);
  CHECK_THROWS_AS(load_instance("/nonexistent/x.inst"), ParseError);
  std::filesystem::remove(bad);
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".manifest");
}
