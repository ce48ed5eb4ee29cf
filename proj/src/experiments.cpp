#include "polymerlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polymerlab/mc.hpp"
#include "polymerlab/pinning.hpp"
#include "polymerlab/polymer.hpp"
#include "polymerlab/rng.hpp"

namespace polymerlab {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace

McEstimate estimate_pn(const EnvModel& m, double beta, int n, int replicates, uint64_t seed,
                       int workers) {
  require(n >= 1, "estimate_pn: n must be >= 1");
  require(replicates >= 2, "estimate_pn: need at least 2 replicates");
  lambda(m, beta);  // domain check up front
  const std::vector<double> vals =
      mc::map_replicates<double>(replicates, workers, [&](uint32_t r) {
        return log_w(m, n, rng::replicate_seed(seed, r), beta) / n;
      });
  return mc_estimate(vals, seed);
}

CrnGrid pn_values_grid(const EnvModel& m, const std::vector<double>& betas, int n, int replicates,
                       uint64_t seed, int workers) {
  require(!betas.empty(), "pn_values_grid: empty beta grid");
  for (double b : betas) lambda(m, b);
  const std::size_t k = betas.size();
  const std::vector<std::vector<double>> rows =
      mc::map_replicates<std::vector<double>>(replicates, workers, [&](uint32_t r) {
        const uint64_t rs = rng::replicate_seed(seed, r);
        std::vector<double> out(k);
        for (std::size_t j = 0; j < k; ++j) out[j] = log_w(m, n, rs, betas[j]) / n;
        return out;
      });
  CrnGrid g;
  g.betas = betas;
  g.values.assign(k, std::vector<double>(static_cast<std::size_t>(replicates)));
  for (int r = 0; r < replicates; ++r)
    for (std::size_t j = 0; j < k; ++j)
      g.values[j][static_cast<std::size_t>(r)] = rows[static_cast<std::size_t>(r)][j];
  return g;
}

WatReport wat_check(const EnvModel& m, double beta, int n, int replicates, uint64_t seed,
                    int workers) {
  require(beta >= 0.0 && 2.0 * beta <= m.mgf_bound * (1.0 + 1e-12),
          "wat_check: need beta <= B/2");
  WatReport w;
  w.model = m.name();
  w.beta = beta;
  w.n = n;
  w.pn = estimate_pn(m, beta, n, replicates, seed, workers);
  // the comparison constant is valid for any bound >= 2 beta; the tightest
  // admissible choice keeps the right-hand side informative (the interface
  // default B makes e^c overflow for the atom families)
  w.big_b = 2.0 * beta;
  w.c = lemma_c(m, w.big_b);
  w.c_interface = lemma_c(m, std::min(m.mgf_bound, 700.0));
  w.fn = f_n(beta, n);
  w.rhs = (1.0 - std::exp(w.c)) * w.fn;
  w.margin = 3.0 * w.pn.sem;
  w.pass = w.pn.mean >= w.rhs - w.margin;
  return w;
}

ScalingResult scaling_fit(const EnvModel& m, const std::vector<double>& betas, int replicates,
                          uint64_t seed, int workers) {
  require(betas.size() >= 2, "scaling_fit: need at least two beta values");
  ScalingResult res;
  res.caveat =
      "finite-n p_n underestimates the n->infinity limit (superadditive sequence); "
      "the fitted slope inherits that bias";
  std::vector<double> xs, ys, yv;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    ScalingPoint p;
    p.beta = betas[k];
    require(p.beta > 0.0, "scaling_fit: beta must be > 0");
    p.n = static_cast<int>(std::min(4096.0, std::ceil(50.0 / std::pow(p.beta, 4.0))));
    const uint64_t sub_seed = rng::replicate_seed(seed, 1000u + static_cast<uint32_t>(k));
    p.pn = estimate_pn(m, p.beta, p.n, replicates, sub_seed, workers);
    if (p.pn.mean < 0.0) {
      p.included = true;
      xs.push_back(std::log(p.beta));
      ys.push_back(std::log(-p.pn.mean));
      const double rel = p.pn.sem / p.pn.mean;
      yv.push_back(rel * rel);
    } else {
      p.included = false;
      p.note = "non-negative estimate, excluded from the fit";
    }
    res.points.push_back(p);
  }
  if (xs.size() < 2) throw std::domain_error("scaling_fit: fewer than two usable points, fit refused");
  res.fit = fit_line(xs, ys, yv);
  return res;
}

MonotonicityReport monotonicity_check(const EnvModel& m, const std::vector<double>& betas, int n,
                                      int replicates, uint64_t seed, int workers) {
  require(betas.size() >= 2, "monotonicity_check: need at least two beta values");
  for (std::size_t k = 1; k < betas.size(); ++k)
    require(betas[k] > betas[k - 1], "monotonicity_check: betas must increase");
  const CrnGrid g = pn_values_grid(m, betas, n, replicates, seed, workers);
  MonotonicityReport rep;
  rep.betas = betas;
  rep.n = n;
  for (const auto& col : g.values) rep.pn.push_back(mc_estimate(col, seed));
  rep.pass = true;
  std::vector<double> diff(static_cast<std::size_t>(replicates));
  for (std::size_t k = 1; k < betas.size(); ++k) {
    for (int r = 0; r < replicates; ++r)
      diff[static_cast<std::size_t>(r)] =
          g.values[k][static_cast<std::size_t>(r)] - g.values[k - 1][static_cast<std::size_t>(r)];
    const McEstimate d = mc_estimate(diff, seed);
    rep.diffs.push_back(d);
    if (d.mean > 3.0 * d.sem) rep.pass = false;
  }
  int monotone = 0;
  for (int r = 0; r < replicates; ++r) {
    bool mono = true;
    for (std::size_t k = 1; k < betas.size(); ++k)
      if (g.values[k][static_cast<std::size_t>(r)] > g.values[k - 1][static_cast<std::size_t>(r)])
        mono = false;
    if (mono) ++monotone;
  }
  rep.crn_monotone_fraction = static_cast<double>(monotone) / replicates;
  return rep;
}

TailReport concentration_tails(const EnvModel& m, double beta, int n, int replicates,
                               uint64_t seed, int workers) {
  require(replicates >= 2, "concentration_tails: need replicates");
  lambda(m, beta);
  const std::vector<double> vals =
      mc::map_replicates<double>(replicates, workers, [&](uint32_t r) {
        return log_partition(FieldView(m, n, rng::replicate_seed(seed, r)), beta) / n;
      });
  TailReport rep;
  rep.beta = beta;
  rep.n = n;
  rep.m = replicates;
  rep.seed = seed;
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= replicates;
  rep.mean_rate = mean;
  rep.nvar = n * sample_variance(vals);

  double dev_max = 0.0;
  for (double v : vals) dev_max = std::max(dev_max, std::abs(v - mean));
  const int grid = 12;
  rep.k_hat = 0.0;
  for (int j = 0; j <= grid; ++j) {
    const double x = dev_max * j / grid;
    int up = 0, lo = 0;
    for (double v : vals) {
      if (v - mean > x) ++up;
      if (mean - v > x) ++lo;
    }
    const double fu = static_cast<double>(up) / replicates;
    const double fl = static_cast<double>(lo) / replicates;
    rep.xs.push_back(x);
    rep.upper.push_back(fu);
    rep.lower.push_back(fl);
    if (j == 0) continue;  // x = 0 carries no constraint on K
    for (double f : {fu, fl}) {
      if (f <= 0.0) continue;
      rep.k_hat = std::max(rep.k_hat, n * x * x / (4.0 * -std::log(f)));
    }
  }
  return rep;
}

GaussianEqReport gaussian_equality_check(const EnvModel& m, double beta, int n, int replicates,
                                         uint64_t seed, int workers, double h) {
  require(beta - h > 0.0, "gaussian_equality_check: beta - h must be > 0");
  GaussianEqReport rep;
  rep.model = m.name();
  rep.beta = beta;
  rep.h = h;
  rep.n = n;
  rep.equality = m.family == EnvFamily::Gaussian;
  rep.c_used = lemma_c(m, 2.0 * (beta + h));

  struct Pair {
    double fd, rhs;
  };
  const double c = rep.c_used;
  const std::vector<Pair> vals = mc::map_replicates<Pair>(replicates, workers, [&](uint32_t r) {
    const uint64_t rs = rng::replicate_seed(seed, r);
    const EnvField f = sample_field(m, n, rs);
    const double up = log_w(f, beta + h, m);
    const double dn = log_w(f, beta - h, m);
    Pair p;
    p.fd = (up - dn) / (2.0 * h * n);
    p.rhs = -(c * beta / n) * overlap_expectation(f, beta);
    return p;
  });
  std::vector<double> fd(vals.size()), rhs(vals.size()), paired(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    fd[i] = vals[i].fd;
    rhs[i] = vals[i].rhs;
    paired[i] = vals[i].fd - vals[i].rhs;
  }
  rep.fd = mc_estimate(fd, seed);
  rep.rhs = mc_estimate(rhs, seed);
  rep.paired = mc_estimate(paired, seed);
  if (rep.equality) {
    rep.pass = std::abs(rep.paired.mean) <= 3.0 * rep.paired.sem;
  } else {
    rep.pass = rep.paired.mean >= -3.0 * rep.paired.sem;
  }
  return rep;
}

}  // namespace polymerlab
