#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "minmax/problem.hpp"

namespace minmax {

/// Power control against a jammer. X is K x N (stored column-major as a
/// vector, X(k, n) = x[k + K n]) and y in [0, N/2]^N:
///   S-_{k,n} = sigma^2 + B_{k,n} y_n + sum_{j != k} A_{j,k,n} X_{j,n},
///   S_{k,n}  = A_{k,k,n} X_{k,n} + S-_{k,n},
///   Phi(X, y) = sum_{k,n} log S-_{k,n} - log S_{k,n}.
struct PcInstance {
  Index N = 0;
  Index K = 0;
  std::vector<double> A;  // A(j, k, n) at (j * K + k) * N + n
  Matrix B;               // K x N
  double sigma = 0.0;
  double R = 0.0;
  std::uint64_t seed = 0;

  double a(Index j, Index k, Index n) const { return A[static_cast<std::size_t>((j * K + k) * N + n)]; }
  double phi(const Vector& x, const Vector& y) const;
  Vector grad_x(const Vector& x, const Vector& y) const;
  Vector grad_y(const Vector& x, const Vector& y) const;
  /// argmax_{y in [0,N/2]^N} lambda Phi(X, y) - 1/2 |y - y0|^2 by
  /// per-coordinate bisection to width 1e-12.
  Vector y_resolvent(double lambda, const Vector& x, const Vector& y0) const;
  /// F_n(t) = sum_k B_{k,n} A_{k,k,n} X_{k,n} / (S S-) - (t - y0_n) / lambda at y_n = t.
  double resolvent_residual(Index n, double t, double lambda, const Vector& x, double y0n) const;
  void validate() const;
};

/// A = |H|^2, B = |P|^2 with H, P entries CN(0,1) (independent real and
/// imaginary parts N(0, 1/2)); sigma = 1/sqrt(2), R = K^{1/K}.
PcInstance pc_generate(Index N, Index K, std::uint64_t seed);

/// m = L_x = c max_{k,n} sum_j A_{k,j,n}^2, L_y = c max_{k,n} sum_j B_{j,n} A_{k,j,n}
/// with c = 2 / min(sigma^4, sigma^6); D_y = (N/2) sqrt(N).
MinMaxProblem pc_problem(std::shared_ptr<const PcInstance> instance);

}  // namespace minmax
