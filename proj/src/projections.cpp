#include "minmax/projections.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace minmax {

namespace {

constexpr double kActiveTol = 1e-12;

}  // namespace

Vector project_simplex(const Vector& v) {
  const Index p = v.size();
  if (p == 0) throw DimensionError("project_simplex: empty vector");
  if (!v.allFinite()) throw ArgumentError("project_simplex: non-finite input");

  // Work relative to the largest entry: the projection is invariant under
  // constant shifts, and the shifted support entries lie in [-1, 0], so the
  // threshold (and hence the sum of the result) is accurate even when v has
  // large entries.
  const double shift = v.maxCoeff();
  const Vector w = v.array() - shift;
  std::vector<double> u(w.data(), w.data() + p);
  std::sort(u.begin(), u.end(), std::greater<>());

  // Largest r with u_r - (sum_{i<=r} u_i - 1)/r > 0 gives the threshold.
  double cumsum = 0.0;
  double theta = 0.0;
  for (Index r = 0; r < p; ++r) {
    cumsum += u[r];
    const double candidate = (cumsum - 1.0) / static_cast<double>(r + 1);
    if (u[r] - candidate > 0.0) theta = candidate;
  }
  return (w.array() - theta).max(0.0).matrix();
}

Vector project_box(const Vector& v, double lo, double hi) {
  if (lo > hi) throw ArgumentError("project_box: lo > hi");
  return v.cwiseMax(lo).cwiseMin(hi);
}

ConvexSet ConvexSet::box(double lo, double hi) {
  if (lo > hi) throw ArgumentError("ConvexSet::box: lo > hi");
  return {SetKind::Box, lo, hi};
}

Vector ConvexSet::project(const Vector& v) const {
  switch (kind) {
    case SetKind::Whole:
      return v;
    case SetKind::Simplex:
      return project_simplex(v);
    case SetKind::Box:
      return project_box(v, lo, hi);
  }
  return v;
}

bool ConvexSet::contains(const Vector& x, double tol) const {
  if (!x.allFinite()) return false;
  switch (kind) {
    case SetKind::Whole:
      return true;
    case SetKind::Simplex: {
      if (x.size() == 0) return false;
      const double scale = std::max<double>(1.0, static_cast<double>(x.size()));
      return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol * scale;
    }
    case SetKind::Box:
      return x.size() == 0 || (x.minCoeff() >= lo - tol && x.maxCoeff() <= hi + tol);
  }
  return false;
}

double ConvexSet::diameter(Index dim) const {
  switch (kind) {
    case SetKind::Whole:
      return std::numeric_limits<double>::infinity();
    case SetKind::Simplex:
      return dim > 1 ? std::sqrt(2.0) : 0.0;
    case SetKind::Box:
      return (hi - lo) * std::sqrt(static_cast<double>(dim));
  }
  return 0.0;
}

const char* to_string(SetKind kind) {
  switch (kind) {
    case SetKind::Whole:
      return "whole";
    case SetKind::Simplex:
      return "simplex";
    case SetKind::Box:
      return "box";
  }
  return "?";
}

SetKind set_kind_from_string(const std::string& s) {
  if (s == "whole") return SetKind::Whole;
  if (s == "simplex") return SetKind::Simplex;
  if (s == "box") return SetKind::Box;
  throw ParseError("unknown set kind '" + s + "'");
}

namespace {

double simplex_normal_cone_distance(const Vector& x, const Vector& g) {
  // N(x) = { t*1 - s : s >= 0, s_i = 0 where x_i > 0 }. For fixed t the best
  // s leaves min(g_i + t, 0) on active coordinates, so we minimize
  //   sum_{free} (g_i + t)^2 + sum_{active} min(g_i + t, 0)^2
  // over t. The derivative is monotone; locate its root between breakpoints.
  std::vector<double> free_g;
  std::vector<double> breaks;  // -g_i over active coordinates
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] <= kActiveTol) {
      breaks.push_back(-g[i]);
    } else {
      free_g.push_back(g[i]);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  const double free_sum = std::accumulate(free_g.begin(), free_g.end(), 0.0);
  const auto n_free = static_cast<double>(free_g.size());
  const std::size_t q = breaks.size();

  // suffix sums of g over active coordinates whose breakpoint index >= r
  std::vector<double> suffix(q + 1, 0.0);
  for (std::size_t r = q; r-- > 0;) suffix[r] = suffix[r + 1] - breaks[r];

  double t_star = 0.0;
  bool found = false;
  for (std::size_t r = 0; r <= q && !found; ++r) {
    // t in [breaks[r-1], breaks[r]]: active terms with index >= r contribute
    const double count = n_free + static_cast<double>(q - r);
    if (count == 0.0) continue;
    const double t = -(free_sum + suffix[r]) / count;
    const double lower = r == 0 ? -std::numeric_limits<double>::infinity() : breaks[r - 1];
    const double upper = r == q ? std::numeric_limits<double>::infinity() : breaks[r];
    if (t >= lower && t <= upper) {
      t_star = t;
      found = true;
    }
  }
  if (!found) {
    // All coordinates active with no free part cannot happen on the simplex;
    // fall back to the largest breakpoint, where every term vanishes.
    t_star = q > 0 ? breaks.front() : 0.0;
  }

  double acc = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double r = g[i] + t_star;
    if (x[i] <= kActiveTol) {
      acc += r < 0.0 ? r * r : 0.0;
    } else {
      acc += r * r;
    }
  }
  return std::sqrt(acc);
}

double box_normal_cone_distance(const ConvexSet& set, const Vector& x, const Vector& g) {
  const double tol_lo = kActiveTol * std::max(1.0, std::abs(set.lo));
  const double tol_hi = kActiveTol * std::max(1.0, std::abs(set.hi));
  double acc = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const bool at_lo = x[i] - set.lo <= tol_lo;
    const bool at_hi = set.hi - x[i] <= tol_hi;
    double r = g[i];
    if (at_lo && at_hi) {
      r = 0.0;  // degenerate interval, normal cone is the whole line
    } else if (at_lo) {
      r = std::max(-g[i], 0.0);  // N = (-inf, 0]
    } else if (at_hi) {
      r = std::max(g[i], 0.0);  // N = [0, inf)
    }
    acc += r * r;
  }
  return std::sqrt(acc);
}

}  // namespace

double normal_cone_distance(const ConvexSet& set, const Vector& x, const Vector& g) {
  if (x.size() != g.size()) throw DimensionError("normal_cone_distance: size mismatch");
  if (!set.contains(x, 1e-9)) throw ArgumentError("normal_cone_distance: point outside set");
  switch (set.kind) {
    case SetKind::Whole:
      return g.norm();
    case SetKind::Simplex:
      return simplex_normal_cone_distance(x, g);
    case SetKind::Box:
      return box_normal_cone_distance(set, x, g);
  }
  return g.norm();
}

}  // namespace minmax
