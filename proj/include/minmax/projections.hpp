#pragma once

#include "minmax/types.hpp"

namespace minmax {

/// Euclidean projection onto the unit simplex {w >= 0, sum(w) = 1}.
/// Sort-based thresholding, O(p log p).
Vector project_simplex(const Vector& v);

/// Componentwise clamp into [lo, hi].
Vector project_box(const Vector& v, double lo, double hi);

enum class SetKind { Whole, Simplex, Box };

/// Closed convex sets the solvers and the verifier know how to handle.
/// Whole is the full space (h = 0), the others are indicator functions.
struct ConvexSet {
  SetKind kind = SetKind::Whole;
  double lo = 0.0;
  double hi = 0.0;

  static ConvexSet whole() { return {SetKind::Whole, 0.0, 0.0}; }
  static ConvexSet simplex() { return {SetKind::Simplex, 0.0, 0.0}; }
  static ConvexSet box(double lo, double hi);

  Vector project(const Vector& v) const;
  bool contains(const Vector& x, double tol = 1e-9) const;
  /// sup ||y - y'|| over the set for vectors of length dim.
  double diameter(Index dim) const;
};

const char* to_string(SetKind kind);
SetKind set_kind_from_string(const std::string& s);

/// dist(0, g + N_C(x)) where N_C is the normal cone of C at x. Zero iff
/// -g lies in the normal cone. Throws ArgumentError if x is not in C (1e-9).
double normal_cone_distance(const ConvexSet& set, const Vector& x,
                            const Vector& g);

}  // namespace minmax
