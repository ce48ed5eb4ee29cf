#include "polymerlab/replica.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "polymerlab/mc.hpp"
#include "polymerlab/pinning.hpp"
#include "polymerlab/rng.hpp"

namespace polymerlab {

namespace {

constexpr double kRescaleHi = 0x1p340;
constexpr double kRescaleLo = 0x1p-340;

void check_point(const InterpolationPoint& pt, const EnvModel& m) {
  if (pt.t < 0.0 || pt.t > 1.0) throw std::domain_error("interpolation point: t must be in [0,1]");
  if (pt.u < 0.0) throw std::domain_error("interpolation point: u must be >= 0");
  if (pt.beta <= 0.0) throw std::domain_error("interpolation point: beta must be > 0");
  if (std::sqrt(pt.t) * pt.beta > 0.5 * m.mgf_bound * (1.0 + 1e-12))
    throw std::domain_error("interpolation point: sqrt(t) beta exceeds B/2 of " + m.name());
}

// One row of a layer update: cell (j1,j2) of layer i from the four parents.
// Shared by the serial and OpenMP drivers so results are bit-identical for
// any thread count.
void pair_row(int i, int j1, int stride, const double* wp, const double* ap, const double* bp,
              double* wc, double* ac, double* bc, const double* vals, double sb, double ub2,
              bool with_obs, double* row_max) {
  const bool up1 = j1 > 0, in1 = j1 < i;
  double mx = 0.0;
  for (int j2 = 0; j2 <= i; ++j2) {
    const bool up2 = j2 > 0, in2 = j2 < i;
    const std::size_t c00 = static_cast<std::size_t>(j1 - 1) * stride + (j2 - 1);
    const std::size_t c01 = static_cast<std::size_t>(j1 - 1) * stride + j2;
    const std::size_t c10 = static_cast<std::size_t>(j1) * stride + (j2 - 1);
    const std::size_t c11 = static_cast<std::size_t>(j1) * stride + j2;
    const double w00 = up1 && up2 ? wp[c00] : 0.0;
    const double w01 = up1 && in2 ? wp[c01] : 0.0;
    const double w10 = in1 && up2 ? wp[c10] : 0.0;
    const double w11 = in1 && in2 ? wp[c11] : 0.0;
    const double sw = 0.25 * (w00 + w01 + w10 + w11);
    const double h = vals[j1] + vals[j2];
    const double weight = std::exp(sb * h + (j1 == j2 ? ub2 : 0.0));
    const std::size_t out = static_cast<std::size_t>(j1) * stride + j2;
    const double w = sw * weight;
    wc[out] = w;
    if (w > mx) mx = w;
    if (with_obs) {
      const double a00 = up1 && up2 ? ap[c00] : 0.0;
      const double a01 = up1 && in2 ? ap[c01] : 0.0;
      const double a10 = in1 && up2 ? ap[c10] : 0.0;
      const double a11 = in1 && in2 ? ap[c11] : 0.0;
      const double b00 = up1 && up2 ? bp[c00] : 0.0;
      const double b01 = up1 && in2 ? bp[c01] : 0.0;
      const double b10 = in1 && up2 ? bp[c10] : 0.0;
      const double b11 = in1 && in2 ? bp[c11] : 0.0;
      ac[out] = (0.25 * (a00 + a01 + a10 + a11) + h * sw) * weight;
      bc[out] = (0.25 * (b00 + b01 + b10 + b11) + (j1 == j2 ? 1.0 : 0.0) * sw) * weight;
    }
  }
  row_max[j1] = mx;
}

struct PairDpResult {
  double log_sum = 0.0;  // ln sum W_n, with the accumulated log scale
  double h = 0.0;
  double l = 0.0;
};

PairDpResult pair_dp(const FieldView& f, double sb, double ub2, bool with_obs) {
  const int n = f.n();
  const int stride = n + 1;
  const std::size_t cells = static_cast<std::size_t>(stride) * stride;
  std::vector<double> wbuf(2 * cells, 0.0), abuf, bbuf;
  if (with_obs) {
    abuf.assign(2 * cells, 0.0);
    bbuf.assign(2 * cells, 0.0);
  }
  double* wp = wbuf.data();
  double* wc = wbuf.data() + cells;
  double* ap = with_obs ? abuf.data() : nullptr;
  double* ac = with_obs ? abuf.data() + cells : nullptr;
  double* bp = with_obs ? bbuf.data() : nullptr;
  double* bc = with_obs ? bbuf.data() + cells : nullptr;
  wp[0] = 1.0;

  std::vector<double> vals(static_cast<std::size_t>(n) + 1), row_max(static_cast<std::size_t>(n) + 1);
  double logscale = 0.0;
#ifdef _OPENMP
  const bool par = !omp_in_parallel();
#else
  const bool par = false;
#endif
  for (int i = 1; i <= n; ++i) {
    f.layer(i, std::span<double>(vals.data(), static_cast<std::size_t>(i) + 1));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
    for (int j1 = 0; j1 <= i; ++j1)
      pair_row(i, j1, stride, wp, ap, bp, wc, ac, bc, vals.data(), sb, ub2, with_obs,
               row_max.data());
    (void)par;
    double mx = 0.0;
    for (int j1 = 0; j1 <= i; ++j1) mx = std::max(mx, row_max[static_cast<std::size_t>(j1)]);
    if (mx >= kRescaleHi || mx <= kRescaleLo) {
      const double inv = 1.0 / mx;
      for (int j1 = 0; j1 <= i; ++j1)
        for (int j2 = 0; j2 <= i; ++j2) {
          const std::size_t idx = static_cast<std::size_t>(j1) * stride + j2;
          wc[idx] *= inv;
          if (with_obs) {
            ac[idx] *= inv;
            bc[idx] *= inv;
          }
        }
      logscale += std::log(mx);
    }
    std::swap(wp, wc);
    if (with_obs) {
      std::swap(ap, ac);
      std::swap(bp, bc);
    }
  }

  double sw = 0.0, sa = 0.0, sl = 0.0;
  for (int j1 = 0; j1 <= n; ++j1)
    for (int j2 = 0; j2 <= n; ++j2) {
      const std::size_t idx = static_cast<std::size_t>(j1) * stride + j2;
      sw += wp[idx];
      if (with_obs) {
        sa += ap[idx];
        sl += bp[idx];
      }
    }
  PairDpResult r;
  r.log_sum = logscale + std::log(sw);
  if (with_obs) {
    r.h = sa / sw;
    r.l = sl / sw;
  }
  return r;
}

}  // namespace

double phi(const FieldView& f, InterpolationPoint pt, const EnvModel& m) {
  check_point(pt, m);
  const double sb_beta = std::sqrt(pt.t) * pt.beta;
  const PairDpResult r = pair_dp(f, sb_beta, pt.u * pt.beta * pt.beta, false);
  const int n = f.n();
  return (r.log_sum - 2.0 * n * lambda(m, sb_beta)) / (2.0 * n);
}

double phi_reference(const EnvField& f, InterpolationPoint pt, const EnvModel& m) {
  check_point(pt, m);
  const int n = f.n;
  const double sb = std::sqrt(pt.t) * pt.beta;
  const double ub2 = pt.u * pt.beta * pt.beta;
  // plain per-layer matrices, rescaled by the maximum every layer
  std::vector<std::vector<double>> prev(1, std::vector<double>(1, 1.0));
  double logscale = 0.0;
  for (int i = 1; i <= n; ++i) {
    std::vector<std::vector<double>> cur(static_cast<std::size_t>(i) + 1,
                                         std::vector<double>(static_cast<std::size_t>(i) + 1, 0.0));
    for (int j1 = 0; j1 <= i; ++j1)
      for (int j2 = 0; j2 <= i; ++j2) {
        double acc = 0.0;
        for (int d1 = 0; d1 <= 1; ++d1)
          for (int d2 = 0; d2 <= 1; ++d2) {
            const int p1 = j1 - 1 + d1, p2 = j2 - 1 + d2;
            if (p1 < 0 || p1 > i - 1 || p2 < 0 || p2 > i - 1) continue;
            acc += prev[static_cast<std::size_t>(p1)][static_cast<std::size_t>(p2)];
          }
        const double h = f.at(i, 2 * j1 - i) + f.at(i, 2 * j2 - i);
        cur[static_cast<std::size_t>(j1)][static_cast<std::size_t>(j2)] =
            0.25 * acc * std::exp(sb * h + (j1 == j2 ? ub2 : 0.0));
      }
    double mx = 0.0;
    for (const auto& row : cur)
      for (double v : row) mx = std::max(mx, v);
    for (auto& row : cur)
      for (double& v : row) v /= mx;
    logscale += std::log(mx);
    prev = std::move(cur);
  }
  double sum = 0.0;
  for (const auto& row : prev)
    for (double v : row) sum += v;
  return (logscale + std::log(sum) - 2.0 * n * lambda(m, sb)) / (2.0 * n);
}

GibbsObservables gibbs_observables(const FieldView& f, InterpolationPoint pt, const EnvModel& m) {
  check_point(pt, m);
  const double sb_beta = std::sqrt(pt.t) * pt.beta;
  lambda(m, sb_beta);  // domain check
  const PairDpResult r = pair_dp(f, sb_beta, pt.u * pt.beta * pt.beta, true);
  return {r.h, r.l};
}

double dphi_du(const FieldView& f, InterpolationPoint pt, const EnvModel& m) {
  const GibbsObservables g = gibbs_observables(f, pt, m);
  return pt.beta * pt.beta * g.l / (2.0 * f.n());
}

double dphi_dt(const FieldView& f, InterpolationPoint pt, const EnvModel& m) {
  if (pt.t < kTMin)
    throw std::domain_error("dphi_dt: t below t_min = 0.05 (the 1/sqrt(t) factor is singular)");
  const GibbsObservables g = gibbs_observables(f, pt, m);
  const double sq = std::sqrt(pt.t);
  const int n = f.n();
  return pt.beta / (4.0 * n * sq) * (g.h - 2.0 * n * lambda_prime(m, sq * pt.beta));
}

double brute_force_phi(const EnvField& f, InterpolationPoint pt, const EnvModel& m) {
  check_point(pt, m);
  const int n = f.n;
  if (n > 7) throw std::domain_error("brute_force_phi: n must be <= 7");
  const double sb = std::sqrt(pt.t) * pt.beta;
  const double ub2 = pt.u * pt.beta * pt.beta;
  const long paths = 1L << n;
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(paths) * static_cast<std::size_t>(paths));
  for (long p1 = 0; p1 < paths; ++p1)
    for (long p2 = 0; p2 < paths; ++p2) {
      int x1 = 0, x2 = 0, hits = 0;
      double h = 0.0;
      for (int i = 1; i <= n; ++i) {
        x1 += (p1 >> (i - 1)) & 1 ? 1 : -1;
        x2 += (p2 >> (i - 1)) & 1 ? 1 : -1;
        h += f.at(i, x1) + f.at(i, x2);
        if (x1 == x2) ++hits;
      }
      vals.push_back(sb * h + ub2 * hits);
    }
  const double mx = *std::max_element(vals.begin(), vals.end());
  double acc = 0.0;
  for (double v : vals) acc += std::exp(v - mx);
  const double lse = mx + std::log(acc) - 2.0 * n * std::log(2.0);
  return (lse - 2.0 * n * lambda(m, sb)) / (2.0 * n);
}

McEstimate fkg_gap(const Ensemble& ens, InterpolationPoint pt, const EnvModel& m) {
  if (pt.t < kTMin) throw std::domain_error("fkg_gap: t below t_min = 0.05");
  const std::vector<double> gaps =
      mc::map_replicates<double>(ens.m, ens.workers, [&](uint32_t r) {
        const FieldView f(m, ens.n, rng::replicate_seed(ens.seed, r));
        const GibbsObservables g = gibbs_observables(f, pt, m);
        const double du = pt.beta * pt.beta * g.l / (2.0 * ens.n);
        const double sq = std::sqrt(pt.t);
        const double dt =
            pt.beta / (4.0 * ens.n * sq) * (g.h - 2.0 * ens.n * lambda_prime(m, sq * pt.beta));
        return du - dt;
      });
  return mc_estimate(gaps, ens.seed);
}

PathCheckReport path_check(const Ensemble& ens, double t, double beta, const EnvModel& m) {
  if (t < 0.0 || t > 1.0) throw std::domain_error("path_check: t must be in [0,1]");
  PathCheckReport rep;
  rep.t = t;
  rep.beta = beta;
  rep.n = ens.n;
  rep.pinning_ref = f_n(beta, ens.n);  // phi_n(0,2) is environment-free
  if (t == 0.0) {
    // same point on both sides, identically zero
    rep.phi_mean = McEstimate{rep.pinning_ref, 0.0, ens.m, ens.seed};
    rep.diff = 0.0;
    rep.margin = 0.0;
    rep.pass = true;
    return rep;
  }
  const InterpolationPoint pt{t, 2.0 - t, beta};
  const std::vector<double> vals =
      mc::map_replicates<double>(ens.m, ens.workers, [&](uint32_t r) {
        const FieldView f(m, ens.n, rng::replicate_seed(ens.seed, r));
        return phi(f, pt, m);
      });
  rep.phi_mean = mc_estimate(vals, ens.seed);
  rep.diff = rep.phi_mean.mean - rep.pinning_ref;
  rep.margin = 3.0 * rep.phi_mean.sem;
  rep.pass = rep.diff <= rep.margin;
  return rep;
}

}  // namespace polymerlab
