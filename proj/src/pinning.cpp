#include "polymerlab/pinning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace polymerlab {

namespace {

constexpr double kRescaleHi = 0x1p340;
constexpr double kRescaleLo = 0x1p-340;

void check_args(int n, double t) {
  if (n < 1) throw std::domain_error("pinning: n must be >= 1");
  if (t < 0.0) throw std::domain_error("pinning: t must be >= 0");
}

}  // namespace

std::vector<double> log_pinning_curve(int n, double t) {
  check_args(n, t);
  const double reward = std::exp(t);
  // v[k] = weight of D = 2(k - i) at layer i, k = 0..2i
  std::vector<double> prev(2 * static_cast<std::size_t>(n) + 1, 0.0),
      cur(2 * static_cast<std::size_t>(n) + 1, 0.0);
  prev[0] = 1.0;  // i = 0, D = 0
  double logscale = 0.0;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const int width = 2 * i + 1;
    for (int k = 0; k < width; ++k) {
      // D = 2(k - i); reached from D-2 (prev k-2... careful: prev index maps k-1)
      const double down = k >= 2 ? prev[static_cast<std::size_t>(k) - 2] : 0.0;
      const double stay = (k >= 1 && k - 1 <= 2 * (i - 1)) ? prev[static_cast<std::size_t>(k) - 1] : 0.0;
      const double up = k <= 2 * (i - 1) ? prev[static_cast<std::size_t>(k)] : 0.0;
      double w = 0.25 * down + 0.5 * stay + 0.25 * up;
      if (k == i) w *= reward;  // D = 0
      cur[static_cast<std::size_t>(k)] = w;
    }
    double mx = 0.0, sum = 0.0;
    for (int k = 0; k < width; ++k) {
      mx = std::max(mx, cur[static_cast<std::size_t>(k)]);
      sum += cur[static_cast<std::size_t>(k)];
    }
    out[static_cast<std::size_t>(i) - 1] = logscale + std::log(sum);
    if (mx >= kRescaleHi || mx <= kRescaleLo) {
      const double inv = 1.0 / mx;
      for (int k = 0; k < width; ++k) cur[static_cast<std::size_t>(k)] *= inv;
      logscale += std::log(mx);
    }
    std::swap(prev, cur);
  }
  return out;
}

double log_pinning(int n, double t) { return log_pinning_curve(n, t).back(); }

double pinning_rate_exact(double t) { return 2.0 * t - std::log(2.0 * std::exp(t) - 1.0); }

PinningEstimate pinning_free_energy(double t, int n_max) {
  if (t <= 0.0) throw std::domain_error("pinning_free_energy: t must be > 0");
  if (n_max < 4) throw std::domain_error("pinning_free_energy: n_max must be >= 4");
  const std::vector<double> curve = log_pinning_curve(n_max, t);
  PinningEstimate e;
  e.t = t;
  e.n_max = n_max;
  e.rate_nmax = curve.back() / n_max;
  const int half = n_max / 2;
  e.rate_refined = (curve.back() - curve[static_cast<std::size_t>(half) - 1]) / (n_max - half);
  e.f_hat = 0.5 * e.rate_refined;
  e.low_n_warning = n_max * t * t < 50.0;
  return e;
}

double f_n(double beta, int n) { return log_pinning(n, 2.0 * beta * beta) / (2.0 * n); }

double brute_force_pinning(int n, double t) {
  check_args(n, t);
  if (n > 8) throw std::domain_error("brute_force_pinning: n must be <= 8");
  const long paths = 1L << n;
  double acc = 0.0;
  for (long p1 = 0; p1 < paths; ++p1) {
    for (long p2 = 0; p2 < paths; ++p2) {
      int x1 = 0, x2 = 0, hits = 0;
      for (int i = 1; i <= n; ++i) {
        x1 += (p1 >> (i - 1)) & 1 ? 1 : -1;
        x2 += (p2 >> (i - 1)) & 1 ? 1 : -1;
        if (x1 == x2) ++hits;
      }
      acc += std::exp(t * hits);
    }
  }
  return std::log(acc) - 2.0 * n * std::log(2.0);
}

}  // namespace polymerlab
