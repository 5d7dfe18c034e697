#include "minmax/problems/trr.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "minmax/rng.hpp"

namespace minmax {

namespace {

// log(1 + e^{-t}) without overflow.
double softplus_neg(double t) { return std::log1p(std::exp(-std::abs(t))) + std::max(-t, 0.0); }

// e^{-t} / (1 + e^{-t}) = 1 / (1 + e^{t}).
double sigmoid_neg(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

}  // namespace

Vector TrrInstance::losses(const Vector& x) const {
  const Vector t = b.cwiseProduct(A * x);
  return t.unaryExpr([](double v) { return softplus_neg(v); });
}

Vector TrrInstance::truncated_losses(const Vector& x) const {
  const double a = alpha;
  return losses(x).unaryExpr([a](double l) { return a * std::log1p(l / a); });
}

Vector TrrInstance::tau(const Vector& x) const {
  const Vector t = b.cwiseProduct(A * x);
  Vector out(t.size());
  for (Index j = 0; j < t.size(); ++j) out[j] = sigmoid_neg(t[j]) / (alpha + softplus_neg(t[j]));
  return out;
}

void TrrInstance::validate() const {
  if (A.rows() == 0 || A.cols() == 0) throw DimensionError("TrrInstance: empty data");
  if (b.size() != A.rows()) throw DimensionError("TrrInstance: label count mismatch");
  for (Index j = 0; j < b.size(); ++j) {
    if (b[j] != 1.0 && b[j] != -1.0) throw ArgumentError("TrrInstance: labels must be +-1");
  }
  if (!(alpha > 0.0)) throw ArgumentError("TrrInstance: alpha must be positive");
}

namespace {

double parse_double(std::string_view tok, std::size_t line, const char* what) {
  double v = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(fmt::format("line {}: bad {} '{}'", line, what, tok));
  }
  return v;
}

}  // namespace

TrrInstance trr_parse(const std::string& text, double alpha) {
  std::istringstream in(text);
  std::string raw;
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> labels;
  Index max_index = 0;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string tok;
    if (!(ls >> tok)) continue;
    const Index row = static_cast<Index>(labels.size());
    labels.push_back(parse_double(tok, line_no, "label"));
    Index prev = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0) {
        throw ParseError(fmt::format("line {}: expected idx:val, got '{}'", line_no, tok));
      }
      long long idx = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
      if (ec != std::errc() || ptr != tok.data() + colon || idx < 1) {
        throw ParseError(fmt::format("line {}: bad feature index in '{}'", line_no, tok));
      }
      if (idx <= prev) {
        throw ParseError(fmt::format("line {}: feature indices must increase", line_no));
      }
      prev = static_cast<Index>(idx);
      const double val = parse_double(std::string_view(tok).substr(colon + 1), line_no, "value");
      trips.emplace_back(row, static_cast<Index>(idx - 1), val);
      max_index = std::max<Index>(max_index, idx);
    }
  }
  if (labels.empty()) throw ParseError("LIBSVM data contains no samples");
  if (max_index == 0) throw ParseError("LIBSVM data contains no features");

  const std::set<double> distinct(labels.begin(), labels.end());
  if (distinct.size() > 2) {
    throw ParseError(fmt::format("labels are not binary ({} distinct values)", distinct.size()));
  }
  const double lo = *distinct.begin();

  TrrInstance t;
  t.alpha = alpha;
  t.b.resize(static_cast<Index>(labels.size()));
  for (std::size_t j = 0; j < labels.size(); ++j) {
    double v = 0.0;
    if (distinct.size() == 2) {
      v = labels[j] == lo ? -1.0 : 1.0;
    } else {
      v = lo > 0.0 ? 1.0 : -1.0;
    }
    t.b[static_cast<Index>(j)] = v;
  }
  t.A.resize(static_cast<Index>(labels.size()), max_index);
  t.A.setFromTriplets(trips.begin(), trips.end());
  t.A.makeCompressed();
  t.validate();
  return t;
}

TrrInstance trr_load(const std::string& path, double alpha) {
  std::ifstream f(path);
  if (!f) throw ParseError(fmt::format("cannot open LIBSVM file '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return trr_parse(ss.str(), alpha);
}

std::string trr_format_libsvm(const TrrInstance& t) {
  std::string out;
  for (Index j = 0; j < t.A.rows(); ++j) {
    out += t.b[j] > 0 ? "+1" : "-1";
    for (RowSparseMatrix::InnerIterator it(t.A, j); it; ++it) {
      out += fmt::format(" {}:{}", it.col() + 1, it.value());
    }
    out += '\n';
  }
  return out;
}

void trr_write_libsvm(const std::string& path, const TrrInstance& t) {
  std::ofstream f(path);
  if (!f) throw Error(fmt::format("cannot write '{}'", path));
  f << trr_format_libsvm(t);
  if (!f) throw Error(fmt::format("write to '{}' failed", path));
}

TrrInstance trr_synthesize(Index samples, Index features, double density, std::uint64_t seed,
                           double alpha) {
  if (samples <= 0 || features <= 0) throw ArgumentError("trr_synthesize: positive sizes required");
  if (!(density > 0.0) || density > 1.0) throw ArgumentError("trr_synthesize: density not in (0,1]");
  RandomStream feat(seed, "trr/features");
  RandomStream dir(seed, "trr/direction");
  RandomStream flip(seed, "trr/flips");

  Vector w(features);
  for (Index i = 0; i < features; ++i) w[i] = dir.normal();

  std::vector<Eigen::Triplet<double>> trips;
  TrrInstance t;
  t.alpha = alpha;
  t.b.resize(samples);
  for (Index j = 0; j < samples; ++j) {
    double score = 0.0;
    bool any = false;
    for (Index i = 0; i < features; ++i) {
      if (feat.uniform() < density) {
        const double v = feat.uniform();
        trips.emplace_back(j, i, v);
        score += v * w[i];
        any = true;
      }
    }
    if (!any) {
      const Index i = static_cast<Index>(feat.below(static_cast<std::uint64_t>(features)));
      const double v = feat.uniform();
      trips.emplace_back(j, i, v);
      score += v * w[i];
    }
    double label = score >= 0.0 ? 1.0 : -1.0;
    if (flip.uniform() < 0.1) label = -label;
    t.b[j] = label;
  }
  t.A.resize(samples, features);
  t.A.setFromTriplets(trips.begin(), trips.end());
  t.A.makeCompressed();
  return t;
}

MinMaxProblem trr_problem(std::shared_ptr<const TrrInstance> t) {
  t->validate();
  MinMaxProblem prob;
  prob.family = "trr";
  prob.n_x = t->features();
  prob.n_y = t->samples();
  prob.phi_value = [t](const Vector& x, const Vector& y) { return y.dot(t->truncated_losses(x)); };
  prob.grad_x_phi = [t](const Vector& x, const Vector& y) -> Vector {
    const Vector w = -t->alpha * y.cwiseProduct(t->b).cwiseProduct(t->tau(x));
    return t->A.transpose() * w;
  };
  prob.grad_y_phi = [t](const Vector& x, const Vector&) -> Vector {
    return t->truncated_losses(x);
  };
  prob.y_resolvent = [t](double lambda, const Vector& x, const Vector& y0) -> Vector {
    return project_simplex(y0 + lambda * t->truncated_losses(x));
  };
  prob.max_value = [t](const Vector& x) { return t->truncated_losses(x).maxCoeff(); };
  attach_indicator(prob, ConvexSet::whole());
  prob.y_set = ConvexSet::simplex();

  double max_row = 0.0;
  double total = 0.0;
  for (Index j = 0; j < t->A.rows(); ++j) {
    const double r = t->A.row(j).squaredNorm();
    max_row = std::max(max_row, r);
    total += r;
  }
  prob.m = max_row / t->alpha;
  prob.L_x = prob.m;
  prob.L_y = std::sqrt(total);
  prob.D_y = prob.y_set.diameter(prob.n_y);
  return prob;
}

}  // namespace minmax
