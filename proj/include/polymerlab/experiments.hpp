#pragma once

// Seeded Monte Carlo harness over environment replicates: free-energy
// estimates, scaling fits, inequality and concentration checks. Every check
// reports (estimate, stderr, margin), never a bare boolean.

#include <cstdint>
#include <string>
#include <vector>

#include "polymerlab/env.hpp"
#include "polymerlab/stats.hpp"

namespace polymerlab {

// p_n(beta) = (1/n) E ln W_n estimated over m independent environments;
// replicate r is seeded by (seed, r)
McEstimate estimate_pn(const EnvModel& m, double beta, int n, int replicates, uint64_t seed,
                       int workers = 0);

// per-replicate values of (1/n) ln W_n on a beta grid with common random
// fields (same replicate seed for every beta); values[k][r] belongs to betas[k]
struct CrnGrid {
  std::vector<double> betas;
  std::vector<std::vector<double>> values;
};
CrnGrid pn_values_grid(const EnvModel& m, const std::vector<double>& betas, int n, int replicates,
                       uint64_t seed, int workers = 0);

struct WatReport {
  std::string model;
  double beta = 0.0;
  int n = 0;
  McEstimate pn;
  double big_b = 0.0;     // tightest admissible bound, 2 beta
  double c = 0.0;         // lemma_c at big_b
  double c_interface = 0.0;  // lemma_c at the model's interface bound B (informational)
  double fn = 0.0;        // F_n(beta) = (1/2n) ln E^x2 e^{2 beta^2 L_n}
  double rhs = 0.0;       // (1 - e^c) F_n(beta)
  double margin = 0.0;    // 3 sem
  bool pass = false;      // pn.mean >= rhs - margin
};
WatReport wat_check(const EnvModel& m, double beta, int n, int replicates, uint64_t seed,
                    int workers = 0);

struct ScalingPoint {
  double beta = 0.0;
  int n = 0;
  McEstimate pn;
  bool included = false;
  std::string note;
};
struct ScalingResult {
  std::vector<ScalingPoint> points;
  LineFit fit;  // slope of log(-p_n) vs log(beta)
  std::string caveat;
};
// n(beta) = min(ceil(50 / beta^4), 4096); throws if fewer than two usable points
ScalingResult scaling_fit(const EnvModel& m, const std::vector<double>& betas, int replicates,
                          uint64_t seed, int workers = 0);

struct MonotonicityReport {
  std::vector<double> betas;
  int n = 0;
  std::vector<McEstimate> pn;     // per beta, common random fields
  std::vector<McEstimate> diffs;  // paired successive differences p(k+1) - p(k)
  double crn_monotone_fraction = 0.0;  // replicates whose whole sequence is monotone (diagnostic)
  bool pass = false;  // every diff mean <= +3 paired sem
};
MonotonicityReport monotonicity_check(const EnvModel& m, const std::vector<double>& betas, int n,
                                      int replicates, uint64_t seed, int workers = 0);

struct TailReport {
  double beta = 0.0;
  int n = 0, m = 0;
  uint64_t seed = 0;
  double mean_rate = 0.0;  // mean of (1/n) ln Z_n
  double nvar = 0.0;       // n Var[(1/n) ln Z_n], should stay O(1) in n
  std::vector<double> xs;
  std::vector<double> upper;  // P(+(1/n)(ln Z - mean) > x)
  std::vector<double> lower;  // P(-(1/n)(ln Z - mean) > x)
  double k_hat = 0.0;         // smallest K with both tails <= exp(-n x^2 / 4K) on the grid
};
TailReport concentration_tails(const EnvModel& m, double beta, int n, int replicates, uint64_t seed,
                               int workers = 0);

struct GaussianEqReport {
  std::string model;
  double beta = 0.0, h = 0.0;
  int n = 0;
  McEstimate fd;      // central finite difference of p_n in beta, common fields
  McEstimate rhs;     // -(c beta / n) <overlap>
  McEstimate paired;  // per-replicate fd - rhs
  double c_used = 0.0;
  bool equality = false;  // gaussian: two-sided equality; otherwise one-sided lower bound
  bool pass = false;
};
// h is the finite-difference step (default 0.02)
GaussianEqReport gaussian_equality_check(const EnvModel& m, double beta, int n, int replicates,
                                         uint64_t seed, int workers = 0, double h = 0.02);

}  // namespace polymerlab
