#include "polymerlab/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polymerlab {

namespace {

// Rescale only when the layer maximum leaves [2^-340, 2^340]. Far from
// overflow at any admissible beta, and dyadic cases (beta = 0, small n) stay
// bit-exact because no division is ever applied to them.
constexpr double kRescaleHi = 0x1p340;
constexpr double kRescaleLo = 0x1p-340;

double maybe_rescale(std::vector<double>& layer, int count) {
  double mx = 0.0;
  for (int j = 0; j < count; ++j) mx = std::max(mx, layer[static_cast<std::size_t>(j)]);
  if (mx < kRescaleHi && mx > kRescaleLo) return 0.0;
  const double inv = 1.0 / mx;
  for (int j = 0; j < count; ++j) layer[static_cast<std::size_t>(j)] *= inv;
  return std::log(mx);
}

}  // namespace

double log_partition(const FieldView& f, double beta) {
  if (beta < 0.0) throw std::domain_error("log_partition: beta must be >= 0");
  const int n = f.n();
  std::vector<double> prev(static_cast<std::size_t>(n) + 1), cur(static_cast<std::size_t>(n) + 1),
      vals(static_cast<std::size_t>(n) + 1);
  prev[0] = 1.0;
  double logscale = 0.0;
  for (int i = 1; i <= n; ++i) {
    f.layer(i, std::span<double>(vals.data(), static_cast<std::size_t>(i) + 1));
    for (int j = 0; j <= i; ++j) {
      const double from_left = j > 0 ? prev[static_cast<std::size_t>(j) - 1] : 0.0;
      const double from_right = j < i ? prev[static_cast<std::size_t>(j)] : 0.0;
      cur[static_cast<std::size_t>(j)] =
          0.5 * (from_left + from_right) * std::exp(beta * vals[static_cast<std::size_t>(j)]);
    }
    logscale += maybe_rescale(cur, i + 1);
    std::swap(prev, cur);
  }
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) sum += prev[static_cast<std::size_t>(j)];
  return logscale + std::log(sum);
}

double log_w(const EnvField& f, double beta, const EnvModel& m) {
  return log_partition(FieldView(f), beta) - f.n * lambda(m, beta);
}

double log_w(const EnvModel& m, int n, uint64_t seed, double beta) {
  return log_partition(FieldView(m, n, seed), beta) - n * lambda(m, beta);
}

MarginalTable marginals(const EnvField& f, double beta) {
  if (beta < 0.0) throw std::domain_error("marginals: beta must be >= 0");
  const int n = f.n;

  // forward pass, layers kept
  std::vector<std::vector<double>> fw(static_cast<std::size_t>(n) + 1);
  std::vector<double> fw_ls(static_cast<std::size_t>(n) + 1, 0.0);
  fw[0] = {1.0};
  for (int i = 1; i <= n; ++i) {
    auto& cur = fw[static_cast<std::size_t>(i)];
    cur.assign(static_cast<std::size_t>(i) + 1, 0.0);
    const auto& prev = fw[static_cast<std::size_t>(i) - 1];
    for (int j = 0; j <= i; ++j) {
      const double from_left = j > 0 ? prev[static_cast<std::size_t>(j) - 1] : 0.0;
      const double from_right = j < i ? prev[static_cast<std::size_t>(j)] : 0.0;
      cur[static_cast<std::size_t>(j)] = 0.5 * (from_left + from_right) * std::exp(beta * f.at(i, 2 * j - i));
    }
    fw_ls[static_cast<std::size_t>(i)] = fw_ls[static_cast<std::size_t>(i) - 1] + maybe_rescale(cur, i + 1);
  }
  double zsum = 0.0;
  for (double v : fw[static_cast<std::size_t>(n)]) zsum += v;
  const double log_z = fw_ls[static_cast<std::size_t>(n)] + std::log(zsum);

  // backward pass: bw_i(x) = E[exp(beta sum_{k>i} eta(k,S_k)) | S_i = x]
  MarginalTable t;
  t.n = n;
  t.p.resize(static_cast<std::size_t>(n));
  std::vector<double> bw(static_cast<std::size_t>(n) + 1, 1.0), bw_next(static_cast<std::size_t>(n) + 1);
  double bw_ls = 0.0;
  for (int i = n; i >= 1; --i) {
    auto& row = t.p[static_cast<std::size_t>(i) - 1];
    row.assign(static_cast<std::size_t>(i) + 1, 0.0);
    const auto& fwd = fw[static_cast<std::size_t>(i)];
    for (int j = 0; j <= i; ++j) {
      const double zf = fwd[static_cast<std::size_t>(j)];
      const double zb = bw[static_cast<std::size_t>(j)];
      if (zf <= 0.0 || zb <= 0.0) continue;
      row[static_cast<std::size_t>(j)] =
          std::exp(std::log(zf) + std::log(zb) + fw_ls[static_cast<std::size_t>(i)] + bw_ls - log_z);
    }
    if (i == 1) break;
    // step the backward weights from layer i to i-1 (they absorb layer i's field)
    std::vector<double> absorbed(static_cast<std::size_t>(i) + 1);
    for (int j = 0; j <= i; ++j)
      absorbed[static_cast<std::size_t>(j)] =
          bw[static_cast<std::size_t>(j)] * std::exp(beta * f.at(i, 2 * j - i));
    for (int j = 0; j <= i - 1; ++j) {
      // from x at layer i-1 the walk moves to x-1 (index j) or x+1 (index j+1)
      bw_next[static_cast<std::size_t>(j)] =
          0.5 * (absorbed[static_cast<std::size_t>(j)] + absorbed[static_cast<std::size_t>(j) + 1]);
    }
    bw_ls += maybe_rescale(bw_next, i);
    std::swap(bw, bw_next);
  }
  return t;
}

double overlap_expectation(const EnvField& f, double beta) {
  const MarginalTable t = marginals(f, beta);
  double acc = 0.0;
  for (const auto& row : t.p)
    for (double v : row) acc += v * v;
  return acc;
}

double brute_force_log_partition(const EnvField& f, double beta) {
  const int n = f.n;
  if (n > 14) throw std::domain_error("brute_force_log_partition: n must be <= 14");
  const long paths = 1L << n;
  std::vector<double> energies(static_cast<std::size_t>(paths));
  for (long p = 0; p < paths; ++p) {
    int x = 0;
    double h = 0.0;
    for (int i = 1; i <= n; ++i) {
      x += (p >> (i - 1)) & 1 ? 1 : -1;
      h += f.at(i, x);
    }
    energies[static_cast<std::size_t>(p)] = beta * h;
  }
  const double mx = *std::max_element(energies.begin(), energies.end());
  double acc = 0.0;
  for (double e : energies) acc += std::exp(e - mx);
  return mx + std::log(acc) - n * std::log(2.0);
}

}  // namespace polymerlab
