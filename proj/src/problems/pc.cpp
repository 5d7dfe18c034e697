#include "minmax/problems/pc.hpp"

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include <cmath>

#include "minmax/rng.hpp"

namespace minmax {

namespace {

// Per-(k, n) interference terms excluding the jammer.
struct Terms {
  Matrix base;    // sigma^2 + sum_{j != k} A(j,k,n) X(j,n)
  Matrix signal;  // A(k,k,n) X(k,n)
};

Terms terms(const PcInstance& p, const Vector& x) {
  Terms t;
  t.base.resize(p.K, p.N);
  t.signal.resize(p.K, p.N);
  const double s2 = p.sigma * p.sigma;
  for (Index n = 0; n < p.N; ++n) {
    for (Index k = 0; k < p.K; ++k) {
      double acc = s2;
      for (Index j = 0; j < p.K; ++j) {
        if (j != k) acc += p.a(j, k, n) * x[j + p.K * n];
      }
      t.base(k, n) = acc;
      t.signal(k, n) = p.a(k, k, n) * x[k + p.K * n];
    }
  }
  return t;
}

}  // namespace

double PcInstance::phi(const Vector& x, const Vector& y) const {
  const Terms t = terms(*this, x);
  double v = 0.0;
  for (Index n = 0; n < N; ++n) {
    for (Index k = 0; k < K; ++k) {
      const double sm = t.base(k, n) + B(k, n) * y[n];
      v -= std::log1p(t.signal(k, n) / sm);
    }
  }
  return v;
}

Vector PcInstance::grad_x(const Vector& x, const Vector& y) const {
  const Terms t = terms(*this, x);
  Matrix sm(K, N);
  Matrix s(K, N);
  for (Index n = 0; n < N; ++n) {
    for (Index k = 0; k < K; ++k) {
      sm(k, n) = t.base(k, n) + B(k, n) * y[n];
      s(k, n) = sm(k, n) + t.signal(k, n);
    }
  }
  Vector g(K * N);
  for (Index n = 0; n < N; ++n) {
    for (Index k = 0; k < K; ++k) {
      double acc = -a(k, k, n) / s(k, n);
      for (Index j = 0; j < K; ++j) {
        if (j != k) acc += a(k, j, n) * t.signal(j, n) / (s(j, n) * sm(j, n));
      }
      g[k + K * n] = acc;
    }
  }
  return g;
}

Vector PcInstance::grad_y(const Vector& x, const Vector& y) const {
  const Terms t = terms(*this, x);
  Vector g = Vector::Zero(N);
  for (Index n = 0; n < N; ++n) {
    for (Index k = 0; k < K; ++k) {
      const double sm = t.base(k, n) + B(k, n) * y[n];
      g[n] += B(k, n) * t.signal(k, n) / ((sm + t.signal(k, n)) * sm);
    }
  }
  return g;
}

double PcInstance::resolvent_residual(Index n, double tv, double lambda, const Vector& x,
                                      double y0n) const {
  double acc = 0.0;
  const double s2 = sigma * sigma;
  for (Index k = 0; k < K; ++k) {
    double base = s2;
    for (Index j = 0; j < K; ++j) {
      if (j != k) base += a(j, k, n) * x[j + K * n];
    }
    const double sig = a(k, k, n) * x[k + K * n];
    const double sm = base + B(k, n) * tv;
    acc += B(k, n) * sig / ((sm + sig) * sm);
  }
  return acc - (tv - y0n) / lambda;
}

Vector PcInstance::y_resolvent(double lambda, const Vector& x, const Vector& y0) const {
  if (!(lambda > 0.0)) throw ArgumentError("pc y-resolvent: lambda must be positive");
  const Terms t = terms(*this, x);
  const double hi_bound = 0.5 * static_cast<double>(N);
  Vector y(N);
  for (Index n = 0; n < N; ++n) {
    auto F = [&](double v) {
      double acc = 0.0;
      for (Index k = 0; k < K; ++k) {
        const double sm = t.base(k, n) + B(k, n) * v;
        acc += B(k, n) * t.signal(k, n) / ((sm + t.signal(k, n)) * sm);
      }
      return acc - (v - y0[n]) / lambda;
    };
    if (F(0.0) <= 0.0) {
      y[n] = 0.0;
      continue;
    }
    if (F(hi_bound) >= 0.0) {
      y[n] = hi_bound;
      continue;
    }
    auto width = [](double lo, double hi) { return hi - lo <= 1e-12; };
    std::uintmax_t iters = 200;
    const auto [lo, hi] = boost::math::tools::bisect(F, 0.0, hi_bound, width, iters);
    y[n] = 0.5 * (lo + hi);
  }
  return y;
}

void PcInstance::validate() const {
  if (N <= 0 || K <= 0) throw DimensionError("PcInstance: nonpositive dimensions");
  if (A.size() != static_cast<std::size_t>(K * K * N) || B.rows() != K || B.cols() != N) {
    throw DimensionError("PcInstance: channel data has wrong shape");
  }
  if (!(sigma > 0.0) || !(R > 0.0)) throw ArgumentError("PcInstance: sigma and R must be positive");
}

PcInstance pc_generate(Index N, Index K, std::uint64_t seed) {
  if (N <= 0 || K <= 0) throw ArgumentError("pc_generate: N and K must be positive");
  PcInstance p;
  p.N = N;
  p.K = K;
  p.seed = seed;
  p.sigma = 1.0 / std::sqrt(2.0);
  p.R = std::pow(static_cast<double>(K), 1.0 / static_cast<double>(K));

  const double sd = std::sqrt(0.5);
  RandomStream h_rng(seed, "pc/H");
  p.A.resize(static_cast<std::size_t>(K * K * N));
  for (double& v : p.A) {
    const double re = sd * h_rng.normal();
    const double im = sd * h_rng.normal();
    v = re * re + im * im;
  }
  RandomStream p_rng(seed, "pc/P");
  p.B.resize(K, N);
  for (Index n = 0; n < N; ++n) {
    for (Index k = 0; k < K; ++k) {
      const double re = sd * p_rng.normal();
      const double im = sd * p_rng.normal();
      p.B(k, n) = re * re + im * im;
    }
  }
  return p;
}

MinMaxProblem pc_problem(std::shared_ptr<const PcInstance> p) {
  p->validate();
  MinMaxProblem prob;
  prob.family = "pc";
  prob.n_x = p->K * p->N;
  prob.n_y = p->N;
  prob.phi_value = [p](const Vector& x, const Vector& y) { return p->phi(x, y); };
  prob.grad_x_phi = [p](const Vector& x, const Vector& y) { return p->grad_x(x, y); };
  prob.grad_y_phi = [p](const Vector& x, const Vector& y) { return p->grad_y(x, y); };
  prob.y_resolvent = [p](double lambda, const Vector& x, const Vector& y0) {
    return p->y_resolvent(lambda, x, y0);
  };
  // Phi is nondecreasing in every y_n, so the max sits at the upper corner.
  prob.max_value = [p](const Vector& x) {
    return p->phi(x, Vector::Constant(p->N, 0.5 * static_cast<double>(p->N)));
  };
  attach_indicator(prob, ConvexSet::box(0.0, p->R));
  prob.y_set = ConvexSet::box(0.0, 0.5 * static_cast<double>(p->N));

  const double s2 = p->sigma * p->sigma;
  const double factor = 2.0 / std::min(s2 * s2, s2 * s2 * s2);
  double lx = 0.0;
  double ly = 0.0;
  for (Index n = 0; n < p->N; ++n) {
    for (Index k = 0; k < p->K; ++k) {
      double sa = 0.0;
      double sb = 0.0;
      for (Index j = 0; j < p->K; ++j) {
        sa += p->a(k, j, n) * p->a(k, j, n);
        sb += p->B(j, n) * p->a(k, j, n);
      }
      lx = std::max(lx, sa);
      ly = std::max(ly, sb);
    }
  }
  prob.m = factor * lx;
  prob.L_x = prob.m;
  prob.L_y = factor * ly;
  prob.D_y = prob.y_set.diameter(p->N);
  return prob;
}

}  // namespace minmax
