#pragma once

#include <memory>
#include <optional>
#include <string>

#include "minmax/problem.hpp"
#include "minmax/problems/pc.hpp"
#include "minmax/problems/qvm.hpp"
#include "minmax/problems/trr.hpp"

namespace minmax {

/// One generated or loaded instance of any family, optionally with a linear
/// equality constraint on x.
struct InstanceData {
  std::string family;  // "qvm", "trr" or "pc"
  std::shared_ptr<const QvmInstance> qvm;
  std::shared_ptr<const TrrInstance> trr;
  std::shared_ptr<const PcInstance> pc;
  std::optional<Matrix> constraint_A;
  std::optional<Vector> constraint_b;
  std::uint64_t seed = 0;

  MinMaxProblem problem() const;
  std::optional<LinearConstraint> constraint() const;
  /// Starting points: QVM x = 1/n, TRR and PC x = 0; the smoothing
  /// anchor y0 is 0 for every family.
  Vector initial_x() const;
  Vector initial_y() const;
};

InstanceData make_instance(std::shared_ptr<const QvmInstance> q);
InstanceData make_instance(std::shared_ptr<const TrrInstance> t);
InstanceData make_instance(std::shared_ptr<const PcInstance> p);

/// Random constraint with `rows` rows whose right-hand side is feasible:
/// A has N(0,1) entries and b = A x_f for a random point x_f of dom h.
void attach_random_constraint(InstanceData& data, Index rows, std::uint64_t seed);

/// Binary container: 8-byte magic, then typed named fields (integers,
/// reals, strings, dense arrays, sparse matrices) in little-endian order.
void save_instance(const std::string& path, const InstanceData& data);
InstanceData load_instance(const std::string& path);

/// Plain-text "key = value" summary (family, dims, seed, constants).
std::string instance_manifest(const InstanceData& data);
/// Writes the container plus `<path>.manifest`.
void save_instance_with_manifest(const std::string& path, const InstanceData& data);

}  // namespace minmax
