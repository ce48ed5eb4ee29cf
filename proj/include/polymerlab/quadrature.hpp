#pragma once

// Panelized Gauss-Legendre quadrature for jump-measure integrals. Panels grow
// geometrically away from zero (Levy densities concentrate there) and a break
// is forced at |u| = 1, where the compensation indicator has a kink.

#include <algorithm>
#include <cmath>
#include <vector>

namespace polymerlab::quad {

struct GlRule {
  std::vector<double> x;  // nodes on [-1,1]
  std::vector<double> w;
};

// Newton iteration on the Legendre polynomial; exact enough at double precision.
inline GlRule gauss_legendre(int n) {
  GlRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    r.w[n - 1 - i] = r.w[i];
  }
  return r;
}

inline const GlRule& gl16() {
  static const GlRule rule = gauss_legendre(16);
  return rule;
}

template <class F>
auto gl16_panel(double a, double b, F&& f) -> decltype(f(0.0)) {
  const GlRule& r = gl16();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  decltype(f(0.0)) acc = 0;
  for (int i = 0; i < 16; ++i) acc += decltype(f(0.0))(r.w[i]) * f(mid + half * r.x[i]);
  return acc * decltype(f(0.0))(half);
}

// Panel edges over [a,b]: widths grow geometrically (ratio 1.2) away from the
// end nearest zero, which keeps the per-panel variation of exponential-tail
// integrands bounded. Mixed-sign ranges split at 0.
inline std::vector<double> panel_edges(double a, double b, int panels) {
  if (a < 0.0 && b > 0.0) {
    auto neg = panel_edges(a, 0.0, std::max(2, panels / 2));
    auto pos = panel_edges(0.0, b, std::max(2, panels / 2));
    neg.insert(neg.end(), pos.begin() + 1, pos.end());
    return neg;
  }
  const bool anchor_left = std::abs(a) <= std::abs(b);
  const int k = std::max(4, panels);
  const double r = 1.2;
  const double w0 = (b - a) * (r - 1.0) / (std::pow(r, k) - 1.0);
  std::vector<double> edges(k + 1);
  edges[0] = a;
  double acc = 0.0;
  for (int j = 0; j < k - 1; ++j) {
    acc += w0 * std::pow(r, anchor_left ? j : k - 1 - j);
    edges[j + 1] = a + acc;
  }
  edges[k] = b;
  // force a break at +-1 (integrands with the truncation indicator)
  for (double brk : {-1.0, 1.0}) {
    if (brk > a + 1e-12 && brk < b - 1e-12) {
      auto it = std::lower_bound(edges.begin(), edges.end(), brk);
      if (it == edges.end() || std::abs(*it - brk) > 1e-12) edges.insert(it, brk);
    }
  }
  return edges;
}

// integrate f over [a,b]; `nodes` is a budget, 16 per panel
template <class F>
auto integrate(double a, double b, int nodes, F&& f) -> decltype(f(0.0)) {
  const int panels = std::max(2, nodes / 16);
  const std::vector<double> edges = panel_edges(a, b, panels);
  decltype(f(0.0)) acc = 0;
  for (std::size_t j = 0; j + 1 < edges.size(); ++j) acc += gl16_panel(edges[j], edges[j + 1], f);
  return acc;
}

}  // namespace polymerlab::quad
