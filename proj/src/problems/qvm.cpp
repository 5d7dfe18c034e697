#include "minmax/problems/qvm.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "minmax/rng.hpp"

namespace minmax {

void QvmInstance::update_P() {
  P.resize(n, k);
  for (Index i = 0; i < k; ++i) P.col(i) = alpha[i] * (C[i].transpose() * d[i]);
}

Vector QvmInstance::g(const Vector& x) const {
  Vector out(k);
  for (Index i = 0; i < k; ++i) {
    const Vector r = C[i] * x - d[i];
    const Vector s = D[i].cwiseProduct(B[i] * x);
    out[i] = 0.5 * alpha[i] * r.squaredNorm() - 0.5 * beta[i] * s.squaredNorm();
  }
  return out;
}

Vector QvmInstance::grad_g(Index i, const Vector& x) const {
  const Vector r = C[i] * x - d[i];
  const Vector s = D[i].cwiseAbs2().cwiseProduct(B[i] * x);
  return alpha[i] * (C[i].transpose() * r) - beta[i] * (B[i].transpose() * s);
}

Matrix QvmInstance::hessian(Index i) const {
  const Matrix Cd = Matrix(C[i]);
  const Matrix DB = D[i].asDiagonal() * Matrix(B[i]);
  return alpha[i] * Cd.transpose() * Cd - beta[i] * DB.transpose() * DB;
}

void QvmInstance::validate() const {
  const auto ku = static_cast<std::size_t>(k);
  if (n <= 0 || l <= 0 || k <= 0) throw DimensionError("QvmInstance: nonpositive dimensions");
  if (alpha.size() != ku || beta.size() != ku || C.size() != ku || B.size() != ku ||
      D.size() != ku || d.size() != ku || lambda_max.size() != ku || lambda_min.size() != ku) {
    throw DimensionError("QvmInstance: per-function data has wrong length");
  }
  for (std::size_t i = 0; i < ku; ++i) {
    if (C[i].rows() != l || C[i].cols() != n || B[i].rows() != n || B[i].cols() != n ||
        D[i].size() != n || d[i].size() != l) {
      throw DimensionError(fmt::format("QvmInstance: block {} has wrong shape", i));
    }
  }
}

namespace {

// Exactly round(density * rows * cols) nonzeros (at least one) at uniformly
// chosen positions, values U[0,1]. Positions by Floyd's sampling.
SparseMatrix sparse_uniform(Index rows, Index cols, double density, std::uint64_t seed,
                            const std::string& name) {
  const std::uint64_t total = static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
  const std::uint64_t nnz = std::clamp<std::uint64_t>(
      static_cast<std::uint64_t>(std::llround(density * static_cast<double>(total))), 1, total);
  RandomStream pos_rng(seed, name + "/positions");
  RandomStream val_rng(seed, name + "/values");
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(nnz * 2);
  for (std::uint64_t j = total - nnz; j < total; ++j) {
    const std::uint64_t t = pos_rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> positions(chosen.begin(), chosen.end());
  std::sort(positions.begin(), positions.end());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(positions.size());
  for (std::uint64_t p : positions) {
    trips.emplace_back(static_cast<Index>(p / cols), static_cast<Index>(p % cols),
                       val_rng.uniform());
  }
  SparseMatrix S(rows, cols);
  S.setFromTriplets(trips.begin(), trips.end());
  return S;
}

Vector uniform_vector(Index size, double lo, double hi, std::uint64_t seed,
                      const std::string& name) {
  RandomStream rng(seed, name);
  Vector v(size);
  for (Index i = 0; i < size; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

EigenRange extremes(const Matrix& G, const Matrix& H, double a, double b) {
  return symmetric_extreme_eigenvalues(
      [&](const Vector& v) -> Vector { return a * (G * v) - b * (H * v); }, G.rows());
}

template <class F>
double solve_increasing(F f, double lo, double hi) {
  boost::math::tools::eps_tolerance<double> tol(36);
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return 0.5 * (a + b);
}

// Grows hi geometrically until f(hi) has the sign `positive`.
template <class F>
double bracket(F f, double hi, bool positive) {
  for (int i = 0; i < 400; ++i) {
    const double v = f(hi);
    if (positive ? v > 0.0 : v < 0.0) return hi;
    hi *= 2.0;
  }
  throw CalibrationError("qvm_generate: could not bracket calibration root");
}

void calibrate(const Matrix& G, const Matrix& H, double M, double m, double& alpha,
               double& beta, EigenRange& range) {
  const double gmax = symmetric_extreme_eigenvalues([&](const Vector& v) -> Vector { return G * v; },
                                                    G.rows())
                          .max;
  const double hmax = symmetric_extreme_eigenvalues([&](const Vector& v) -> Vector { return H * v; },
                                                    H.rows())
                          .max;
  if (!(gmax > 0.0) || !(hmax > 0.0)) {
    throw CalibrationError("qvm_generate: a sampled quadratic form is identically zero");
  }
  alpha = M / gmax;
  beta = 0.0;
  for (int round = 0; round < 100; ++round) {
    // beta: lambda_min(alpha G - beta H) = -m; f decreasing in beta.
    auto fmin = [&](double b) { return -(extremes(G, H, alpha, b).min + m); };
    const double b_hi = bracket(fmin, m / hmax, true);
    beta = fmin(0.0) >= 0.0 ? 0.0 : solve_increasing(fmin, 0.0, b_hi);
    // alpha: lambda_max(alpha G - beta H) = M; increasing in alpha.
    auto fmax = [&](double a) { return extremes(G, H, a, beta).max - M; };
    const double a_hi = bracket(fmax, std::max(alpha, M / gmax), true);
    alpha = fmax(0.0) >= 0.0 ? 0.0 : solve_increasing(fmax, 0.0, a_hi);

    range = extremes(G, H, alpha, beta);
    if (std::abs(range.max - M) <= 1e-9 * M && std::abs(range.min + m) <= 1e-9 * m) return;
  }
  if (std::abs(range.max - M) > 0.01 * M || std::abs(range.min + m) > 0.01 * m) {
    throw CalibrationError(fmt::format(
        "qvm_generate: calibration stalled at lambda_max = {:.6g}, lambda_min = {:.6g}",
        range.max, range.min));
  }
}

}  // namespace

QvmInstance qvm_generate(const QvmParams& p) {
  if (p.n <= 0 || p.l <= 0 || p.k <= 0) throw ArgumentError("qvm_generate: dimensions must be positive");
  if (!(p.m > 0.0) || !(p.M >= p.m)) throw ArgumentError("qvm_generate: requires 0 < m <= M");
  if (!(p.density > 0.0) || p.density > 1.0) throw ArgumentError("qvm_generate: density not in (0,1]");

  QvmInstance q;
  q.n = p.n;
  q.l = p.l;
  q.k = p.k;
  q.M_target = p.M;
  q.m_target = p.m;
  q.density = p.density;
  q.seed = p.seed;
  for (Index i = 0; i < p.k; ++i) {
    const std::string tag = fmt::format("qvm/{}", i);
    q.C.push_back(sparse_uniform(p.l, p.n, p.density, p.seed, tag + "/C"));
    q.B.push_back(sparse_uniform(p.n, p.n, p.density, p.seed, tag + "/B"));
    q.d.push_back(uniform_vector(p.l, 0.0, 1.0, p.seed, tag + "/d"));
    q.D.push_back(uniform_vector(p.n, 1.0, 1000.0, p.seed, tag + "/D"));

    const Matrix Cd = Matrix(q.C.back());
    const Matrix DB = q.D.back().asDiagonal() * Matrix(q.B.back());
    const Matrix G = Cd.transpose() * Cd;
    const Matrix H = DB.transpose() * DB;
    double a = 0.0;
    double b = 0.0;
    EigenRange r;
    calibrate(G, H, p.M, p.m, a, b, r);
    q.alpha.push_back(a);
    q.beta.push_back(b);
    q.lambda_max.push_back(r.max);
    q.lambda_min.push_back(r.min);
  }
  q.update_P();
  return q;
}

MinMaxProblem qvm_problem(std::shared_ptr<const QvmInstance> q) {
  q->validate();
  MinMaxProblem prob;
  prob.family = "qvm";
  prob.n_x = q->n;
  prob.n_y = q->k;
  prob.phi_value = [q](const Vector& x, const Vector& y) { return y.dot(q->g(x)); };
  prob.grad_x_phi = [q](const Vector& x, const Vector& y) -> Vector {
    Vector gr = Vector::Zero(q->n);
    for (Index i = 0; i < q->k; ++i) {
      if (y[i] != 0.0) gr += y[i] * q->grad_g(i, x);
    }
    return gr;
  };
  prob.grad_y_phi = [q](const Vector& x, const Vector&) -> Vector { return q->g(x); };
  prob.y_resolvent = [q](double lambda, const Vector& x, const Vector& y0) -> Vector {
    return project_simplex(y0 + lambda * q->g(x));
  };
  prob.max_value = [q](const Vector& x) { return q->g(x).maxCoeff(); };
  attach_indicator(prob, ConvexSet::simplex());
  prob.y_set = ConvexSet::simplex();

  double m = 0.0;
  double Lx = 0.0;
  for (Index i = 0; i < q->k; ++i) {
    m = std::max(m, -q->lambda_min[i]);
    Lx = std::max(Lx, q->lambda_max[i]);
  }
  prob.m = m;
  prob.L_x = std::max(Lx, m);
  prob.L_y = prob.L_x * std::sqrt(static_cast<double>(q->k)) +
             (q->P.norm() > 0.0 ? operator_norm(q->P, 1e-10) : 0.0);
  prob.D_y = prob.y_set.diameter(q->k);
  return prob;
}

Vector qvm_initial_point(const QvmInstance& q) {
  return Vector::Constant(q.n, 1.0 / static_cast<double>(q.n));
}

}  // namespace minmax
