#pragma once

// Two-replica transfer matrix: the interpolation functional phi_n(t,u), its
// exact Gibbs-expectation derivatives, and Monte Carlo checks of the
// derivative gap and the interpolation-path inequality.

#include <cstdint>

#include "polymerlab/env.hpp"
#include "polymerlab/polymer.hpp"
#include "polymerlab/stats.hpp"

namespace polymerlab {

struct InterpolationPoint {
  double t = 1.0;   // in [0,1]
  double u = 0.0;   // >= 0
  double beta = 0.0;
};

// minimum t for the t-derivative; the 1/sqrt(t) factor is singular at 0
inline constexpr double kTMin = 0.05;

// (1/2n) ln E^x2 exp(sqrt(t) beta H_n(S1,S2) - 2n lambda(sqrt(t) beta)
//                    + u beta^2 L_n(S1,S2))  for one environment realization
double phi(const FieldView& f, InterpolationPoint pt, const EnvModel& m);
inline double phi(const EnvField& f, InterpolationPoint pt, const EnvModel& m) {
  return phi(FieldView(f), pt, m);
}

// straightforward serial implementation kept as a cross-check for the
// OpenMP kernel
double phi_reference(const EnvField& f, InterpolationPoint pt, const EnvModel& m);

struct GibbsObservables {
  double h = 0.0;  // <H_n(S1,S2)> under the tilted two-replica measure
  double l = 0.0;  // <L_n(S1,S2)>, in (0, n]
};
GibbsObservables gibbs_observables(const FieldView& f, InterpolationPoint pt, const EnvModel& m);
inline GibbsObservables gibbs_observables(const EnvField& f, InterpolationPoint pt,
                                          const EnvModel& m) {
  return gibbs_observables(FieldView(f), pt, m);
}

// exact derivatives via the DP accumulators:
//   dphi/du = (beta^2 / 2n) <L_n>
//   dphi/dt = (beta / 4n sqrt(t)) (<H_n> - 2n lambda'(sqrt(t) beta)),  t >= kTMin
double dphi_du(const FieldView& f, InterpolationPoint pt, const EnvModel& m);
double dphi_dt(const FieldView& f, InterpolationPoint pt, const EnvModel& m);
inline double dphi_du(const EnvField& f, InterpolationPoint pt, const EnvModel& m) {
  return dphi_du(FieldView(f), pt, m);
}
inline double dphi_dt(const EnvField& f, InterpolationPoint pt, const EnvModel& m) {
  return dphi_dt(FieldView(f), pt, m);
}

// exact enumeration over all 4^n path pairs (n <= 7)
double brute_force_phi(const EnvField& f, InterpolationPoint pt, const EnvModel& m);

struct Ensemble {
  int n = 16;
  int m = 2000;
  uint64_t seed = 1;
  int workers = 0;  // 0 = all cores
};

// Monte Carlo estimate of E[dphi/du - dphi/dt]; nonnegative mean is the
// derivative-gap lemma (needs environment variance < 1)
McEstimate fkg_gap(const Ensemble& ens, InterpolationPoint pt, const EnvModel& m);

struct PathCheckReport {
  double t = 0.0, beta = 0.0;
  int n = 0;
  McEstimate phi_mean;       // E[phi_n(t, 2-t)]
  double pinning_ref = 0.0;  // phi_n(0,2), environment-free
  double diff = 0.0;         // mean - ref; the lemma puts this <= 0
  double margin = 0.0;       // 3 sem
  bool pass = false;
};
PathCheckReport path_check(const Ensemble& ens, double t, double beta, const EnvModel& m);

}  // namespace polymerlab
