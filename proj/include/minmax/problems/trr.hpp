#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "minmax/problem.hpp"

namespace minmax {

using RowSparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Truncated robust regression:
///   Phi(x, y) = sum_j y_j phi_alpha(l_j(x)),  y in Delta^samples,
///   phi_alpha(t) = alpha log(1 + t / alpha),
///   l_j(x) = log(1 + exp(-b_j <a_j, x>)).
struct TrrInstance {
  RowSparseMatrix A;  // samples x features, row j is a_j
  Vector b;           // labels in {-1, +1}
  double alpha = 10.0;

  Index samples() const { return A.rows(); }
  Index features() const { return A.cols(); }

  /// l_j(x) for every sample.
  Vector losses(const Vector& x) const;
  /// phi_alpha(l_j(x)) for every sample.
  Vector truncated_losses(const Vector& x) const;
  /// tau_j(x) = e^{-t}/(1 + e^{-t}) / (alpha + l_j(x)), t = b_j <a_j, x>.
  Vector tau(const Vector& x) const;
  void validate() const;
};

/// Parses LIBSVM sparse text ("label idx:val ...", 1-based, increasing
/// indices). Labels are mapped to -1/+1: {0,1} sends 0 to -1, any other
/// two-valued set sends the smaller value to -1. More than two distinct
/// labels is a ParseError, as is any malformed line (reported with its
/// line number).
TrrInstance trr_load(const std::string& path, double alpha = 10.0);
TrrInstance trr_parse(const std::string& text, double alpha = 10.0);

/// LIBSVM text of the instance; values in shortest round-trip form.
std::string trr_format_libsvm(const TrrInstance& instance);
void trr_write_libsvm(const std::string& path, const TrrInstance& instance);

/// Synthetic binary classification data with sparse U[0,1] features and
/// labels from a random separating direction with a few flips.
TrrInstance trr_synthesize(Index samples, Index features, double density, std::uint64_t seed,
                           double alpha = 10.0);

/// m = L_x = max_j |a_j|^2 / alpha, L_y = sqrt(sum_j |a_j|^2), D_y = sqrt(2).
MinMaxProblem trr_problem(std::shared_ptr<const TrrInstance> instance);

}  // namespace minmax
