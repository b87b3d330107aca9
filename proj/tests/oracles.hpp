#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "eik/field.hpp"
#include "eik/pgm.hpp"
#include "eik/sparse.hpp"

namespace oracle {

// K0(x) = int_0^inf exp(-x cosh t) dt by the trapezoid rule, which converges
// geometrically for this analytic, doubly-exponentially decaying integrand.
inline double bessel_k0(double x) {
  const double t_max = std::acosh(800.0 / x + 1.0);
  const int n = 200000;
  const double h = t_max / n;
  double s = 0.5 * std::exp(-x);
  for (int i = 1; i <= n; ++i) s += std::exp(-x * std::cosh(i * h));
  return s * h;
}

// Kernel sampled on the offset grid (2n-1 per axis, centre at n-1).
inline eik::ScalarField brute_convolve(const eik::ScalarField& a, const eik::ScalarField& k) {
  const eik::GridSpec& g = a.grid();
  const std::size_t n0 = g.dim(0), n1 = g.dim(1);
  const std::size_t k1 = k.grid().dim(1);
  eik::ScalarField out(g);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < n0; ++p)
        for (std::size_t q = 0; q < n1; ++q) {
          const std::size_t oi = i + (n0 - 1) - p, oj = j + (n1 - 1) - q;
          s += a.at({p, q}) * k[oi * k1 + oj];
        }
      out.at({i, j}) = s;
    }
  return out;
}

inline Eigen::MatrixXd dense(const eik::StencilSystem& sys) {
  const eik::GridSpec& g = sys.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < g.dim(0); ++i)
    for (std::size_t j = 0; j < g.dim(1); ++j) {
      const auto r = static_cast<Eigen::Index>(g.flat({i, j}));
      A(r, r) = sys.diag[static_cast<std::size_t>(r)];
      if (i + 1 < g.dim(0)) {
        const auto c = static_cast<Eigen::Index>(g.flat({i + 1, j}));
        A(r, c) = A(c, r) = sys.link[0];
      }
      if (j + 1 < g.dim(1)) {
        const auto c = static_cast<Eigen::Index>(g.flat({i, j + 1}));
        A(r, c) = A(c, r) = sys.link[1];
      }
    }
  return A;
}

inline Eigen::VectorXd dense_solve(const eik::StencilSystem& sys) {
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(
      sys.rhs.data(), static_cast<Eigen::Index>(sys.rhs.size()));
  return dense(sys).fullPivLu().solve(b);
}

inline eik::ScalarField euclid(const eik::GridSpec& g, const eik::SourceSet& s) {
  eik::ScalarField d(g, std::numeric_limits<double>::max());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto x = g.world(g.unflat(k));
    for (const auto& p : s.points()) {
      const auto y = g.world(p);
      d[k] = std::min(d[k], std::hypot(x[0] - y[0], x[1] - y[1]));
    }
  }
  return d;
}

// Hop counts over 4-connected black pixels; -1 where unreachable.
inline std::vector<long> pixel_bfs(const eik::GrayImage& img, eik::Index src, int threshold = 128) {
  const std::size_t w = img.width, h = img.height;
  auto black = [&](std::size_t r, std::size_t c) {
    return img.at(r, c) * 255.0 / img.maxval < threshold;
  };
  std::vector<long> dist(w * h, -1);
  std::queue<eik::Index> q;
  dist[src.i * w + src.j] = 0;
  q.push(src);
  while (!q.empty()) {
    const auto [r, c] = q.front();
    q.pop();
    const long d = dist[r * w + c];
    const long dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      const long nr = static_cast<long>(r) + dr[k], nc = static_cast<long>(c) + dc[k];
      if (nr < 0 || nc < 0 || nr >= static_cast<long>(h) || nc >= static_cast<long>(w)) continue;
      const auto ur = static_cast<std::size_t>(nr), uc = static_cast<std::size_t>(nc);
      if (!black(ur, uc) || dist[ur * w + uc] >= 0) continue;
      dist[ur * w + uc] = d + 1;
      q.push({ur, uc});
    }
  }
  return dist;
}

inline double contraction(const eik::ScalarField& f, double ft) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v * v - ft * ft) / (ft * ft));
  return m;
}

// Minimizer of sup|f^2 - ft^2| / ft^2 over `n` evenly spaced candidates.
struct Sweep {
  double best = 0.0;
  double step = 0.0;
};
inline Sweep brute_ftilde(const eik::ScalarField& f, int n = 1000) {
  const double lo = f.min(), hi = f.max();
  Sweep s;
  s.step = (hi - lo) / (n - 1);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double ft = lo + i * s.step;
    const double c = contraction(f, ft);
    if (c < best) {
      best = c;
      s.best = ft;
    }
  }
  return s;
}

// Nodes at least `margin` cells from every source and from the boundary.
inline std::vector<std::size_t> interior(const eik::GridSpec& g, const eik::SourceSet& s,
                                         std::size_t margin) {
  std::vector<std::size_t> out;
  const double cut = static_cast<double>(margin) * g.spacing(0);
  const eik::ScalarField d = euclid(g, s);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto ix = g.unflat(k);
    if (ix.i < margin || ix.j < margin || ix.i + margin >= g.dim(0) || ix.j + margin >= g.dim(1))
      continue;
    if (d[k] <= cut) continue;
    out.push_back(k);
  }
  return out;
}

// -hbar log(phi) is defined up to an additive constant; remove the median
// offset between the fields, then take the l2 error relative to `ref`.
struct Aligned {
  double offset = 0.0;
  double l2_relative = 0.0;
  double max_relative = 0.0;
};
inline Aligned gauge_aligned(const eik::ScalarField& a, const eik::ScalarField& ref,
                             const std::vector<std::size_t>& nodes) {
  std::vector<double> d;
  for (std::size_t k : nodes) d.push_back(a[k] - ref[k]);
  std::nth_element(d.begin(), d.begin() + static_cast<long>(d.size() / 2), d.end());
  Aligned r;
  r.offset = d[d.size() / 2];
  double num = 0.0, den = 0.0;
  for (std::size_t k : nodes) {
    const double e = a[k] - r.offset - ref[k];
    num += e * e;
    den += ref[k] * ref[k];
    r.max_relative = std::max(r.max_relative, std::abs(e) / std::abs(ref[k]));
  }
  r.l2_relative = std::sqrt(num / den);
  return r;
}

inline eik::ScalarField random_field(const eik::GridSpec& g, std::mt19937& rng, double lo,
                                     double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  eik::ScalarField f(g);
  for (double& v : f.values()) v = u(rng);
  return f;
}

}  // namespace oracle
