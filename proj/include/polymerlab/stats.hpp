#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace polymerlab {

// every environment-averaged quantity comes back as one of these
struct McEstimate {
  double mean = 0.0;
  double sem = 0.0;  // sample std / sqrt(m)
  int m = 0;
  uint64_t seed = 0;
};

inline McEstimate mc_estimate(std::span<const double> values, uint64_t seed) {
  const int m = static_cast<int>(values.size());
  if (m < 2) throw std::invalid_argument("mc_estimate: need at least 2 replicates");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  McEstimate e;
  e.mean = mean;
  e.sem = std::sqrt(ss / (m - 1)) / std::sqrt(static_cast<double>(m));
  e.m = m;
  e.seed = seed;
  return e;
}

inline double sample_variance(std::span<const double> values) {
  const int m = static_cast<int>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / (m - 1);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // from per-point y variances, delta method
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y,
                        std::span<const double> y_var) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("fit_line: need at least 2 points");
  double xbar = 0.0, ybar = 0.0;
  for (int i = 0; i < n; ++i) {
    xbar += x[static_cast<std::size_t>(i)];
    ybar += y[static_cast<std::size_t>(i)];
  }
  xbar /= n;
  ybar /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[static_cast<std::size_t>(i)] - xbar;
    sxx += dx * dx;
    sxy += dx * (y[static_cast<std::size_t>(i)] - ybar);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = ybar - f.slope * xbar;
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = (x[static_cast<std::size_t>(i)] - xbar) / sxx;
    var += c * c * y_var[static_cast<std::size_t>(i)];
  }
  f.slope_se = std::sqrt(var);
  return f;
}

}  // namespace polymerlab
