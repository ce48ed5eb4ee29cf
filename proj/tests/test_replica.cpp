#include <doctest.h>

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "polymerlab/env.hpp"
#include "polymerlab/pinning.hpp"
#include "polymerlab/polymer.hpp"
#include "polymerlab/replica.hpp"

using namespace polymerlab;

TEST_CASE("phi endpoint identities") {
  const auto m = EnvModel::gaussian(0.25);
  const EnvField f = sample_field(m, 8, 42);
  // t = 0, u = 0: integrand is identically one
  CHECK(phi(f, {0.0, 0.0, 0.5}, m) == 0.0);
  // t = 1, u = 0: product structure ties phi to the single-path module
  for (double beta : {0.3, 0.7})
    CHECK(std::abs(phi(f, {1.0, 0.0, beta}, m) - log_w(f, beta, m) / f.n) <= 1e-10);
  // t = 0: environment-independent, equals the pinning value at u beta^2
  for (double u : {0.5, 1.0, 2.0})
    CHECK(std::abs(phi(f, {0.0, u, 0.5}, m) - log_pinning(f.n, u * 0.25) / (2.0 * f.n)) <= 1e-10);
}

TEST_CASE("phi point validation") {
  const auto m = EnvModel::centered_gamma(2.0, 0.2);  // B = 4.5
  const EnvField f = sample_field(m, 4, 1);
  CHECK_THROWS_AS(phi(f, {1.2, 0.0, 0.5}, m), std::domain_error);
  CHECK_THROWS_AS(phi(f, {0.5, -1.0, 0.5}, m), std::domain_error);
  CHECK_THROWS_AS(phi(f, {0.5, 0.0, 0.0}, m), std::domain_error);
  CHECK_THROWS_AS(phi(f, {1.0, 0.0, 3.0}, m), std::domain_error);  // sqrt(t) beta > B/2
  CHECK_NOTHROW(phi(f, {1.0, 0.0, 2.2}, m));
  CHECK_THROWS_AS(brute_force_phi(sample_field(m, 8, 1), {0.5, 1.0, 0.5}, m), std::domain_error);
}

TEST_CASE("brute-force oracle equivalence") {
  const auto m = EnvModel::gaussian(0.25);
  const auto p = EnvModel::centered_poisson(1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 5;  // up to 6
    const EnvModel& mm = k % 3 ? m : p;
    const EnvField f = sample_field(mm, n, 700 + k);
    const InterpolationPoint pt{(k % 5) / 4.0, 0.5 * (k % 3), 0.3 + 0.1 * (k % 4)};
    worst = std::max(worst, std::abs(phi(f, pt, mm) - brute_force_phi(f, pt, mm)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("openmp kernel agrees with the serial reference and is schedule-independent") {
  const auto m = EnvModel::gaussian(0.25);
  const EnvField f = sample_field(m, 24, 77);
  const InterpolationPoint pt{0.6, 1.2, 0.5};
  CHECK(std::abs(phi(f, pt, m) - phi_reference(f, pt, m)) <= 1e-10);
  const double outside = phi(f, pt, m);
#ifdef _OPENMP
  double inside = 0.0;
#pragma omp parallel num_threads(2)
  {
#pragma omp single
    inside = phi(f, pt, m);  // runs the row kernel serially inside the active team
  }
  CHECK(outside == inside);  // bit-identical by construction
#else
  CHECK(outside == phi(f, pt, m));
#endif
}

TEST_CASE("gibbs observables") {
  const auto m = EnvModel::gaussian(0.25);
  // t=0, u=0: <L_n> is the expected intersection count of two free walks
  const EnvField f1 = sample_field(m, 1, 3);
  CHECK(gibbs_observables(f1, {0.0, 0.0, 0.5}, m).l == doctest::Approx(0.5).epsilon(1e-13));
  const EnvField f2 = sample_field(m, 2, 3);
  CHECK(gibbs_observables(f2, {0.0, 0.0, 0.5}, m).l == doctest::Approx(0.875).epsilon(1e-13));
  // t=0, u=0: <H_n> is the plain average over path pairs, 2 sum b(i,x) eta(i,x)
  const EnvField f = sample_field(m, 6, 9);
  double avg = 0.0;
  std::vector<double> row{1.0};
  for (int i = 1; i <= f.n; ++i) {
    std::vector<double> next(static_cast<std::size_t>(i) + 1, 0.0);
    for (int j = 0; j <= i; ++j) {
      if (j > 0) next[static_cast<std::size_t>(j)] += 0.5 * row[static_cast<std::size_t>(j) - 1];
      if (j < i) next[static_cast<std::size_t>(j)] += 0.5 * row[static_cast<std::size_t>(j)];
    }
    row = next;
    for (int j = 0; j <= i; ++j) avg += 2.0 * row[static_cast<std::size_t>(j)] * f.at(i, 2 * j - i);
  }
  CHECK(gibbs_observables(f, {0.0, 0.0, 0.5}, m).h == doctest::Approx(avg).epsilon(1e-12));
  // u large: the measure concentrates on coinciding replicas
  CHECK(gibbs_observables(f, {0.0, 200.0, 0.5}, m).l == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(gibbs_observables(f, {1.0, 200.0, 0.5}, m).l > 6.0 - 1e-6);
}

TEST_CASE("exact derivatives match finite differences of phi") {
  const auto m = EnvModel::gaussian(0.25);
  const EnvField f = sample_field(m, 10, 11);
  const double h = 1e-4;
  for (const InterpolationPoint pt : {InterpolationPoint{0.5, 1.0, 0.7},
                                      InterpolationPoint{0.9, 0.3, 0.4},
                                      InterpolationPoint{0.2, 2.0, 0.6}}) {
    const double du = dphi_du(FieldView(f), pt, m);
    const double fd_u =
        (phi(f, {pt.t, pt.u + h, pt.beta}, m) - phi(f, {pt.t, pt.u - h, pt.beta}, m)) / (2.0 * h);
    CHECK(std::abs(du - fd_u) <= 1e-5 * std::max(1e-6, std::abs(du)));
    CHECK(du >= 0.0);
    const double dt = dphi_dt(FieldView(f), pt, m);
    const double fd_t =
        (phi(f, {pt.t + h, pt.u, pt.beta}, m) - phi(f, {pt.t - h, pt.u, pt.beta}, m)) / (2.0 * h);
    CHECK(std::abs(dt - fd_t) <= 1e-5 * std::max(1e-4, std::abs(dt)));
  }
  CHECK_THROWS_AS(dphi_dt(FieldView(f), {0.01, 1.0, 0.5}, m), std::domain_error);
}

TEST_CASE("u-derivative at u=0 equals the overlap expectation route") {
  const auto m = EnvModel::gaussian(0.25);
  for (int k = 0; k < 5; ++k) {
    const EnvField f = sample_field(m, 12, 500 + k);
    for (double t : {0.3, 0.7, 1.0}) {
      const double beta = 0.4 + 0.1 * k;
      const double lhs = dphi_du(FieldView(f), {t, 0.0, beta}, m);
      const double rhs =
          beta * beta / (2.0 * f.n) * overlap_expectation(f, std::sqrt(t) * beta);
      CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
  }
}

TEST_CASE("phi is nondecreasing and convex in u per realization") {
  const auto m = EnvModel::gaussian(0.25);
  const EnvField f = sample_field(m, 14, 23);
  std::vector<double> vals;
  for (double u = 0.0; u <= 3.0 + 1e-9; u += 0.25) vals.push_back(phi(f, {0.7, u, 0.5}, m));
  for (std::size_t k = 1; k < vals.size(); ++k) CHECK(vals[k] >= vals[k - 1] - 1e-12);
  for (std::size_t k = 2; k < vals.size(); ++k)
    CHECK(vals[k] - 2.0 * vals[k - 1] + vals[k - 2] >= -1e-10);
  // monotonicity at the endpoints of the interpolation path
  CHECK(phi(f, {1.0, 1.0, 0.5}, m) >= phi(f, {1.0, 0.0, 0.5}, m));
}

TEST_CASE("fkg gap and path check ensembles") {
  const auto m = EnvModel::gaussian(0.25);
  const Ensemble ens{12, 200, 31, 0};
  for (double t : {0.1, 0.5, 1.0})
    for (double u : {0.0, 1.0}) {
      const McEstimate g = fkg_gap(ens, {t, u, 0.3}, m);
      CHECK(g.mean >= -3.0 * g.sem);
      CHECK(g.m == 200);
    }
  // beta -> 0: the gap stays nonnegative within noise and is O(beta^2)
  const McEstimate tiny = fkg_gap(ens, {0.5, 1.0, 0.01}, m);
  CHECK(tiny.mean >= -3.0 * tiny.sem);
  CHECK(std::abs(tiny.mean) < 1e-4);
  CHECK_THROWS_AS(fkg_gap(ens, {0.0, 1.0, 0.3}, m), std::domain_error);

  const PathCheckReport p0 = path_check(ens, 0.0, 0.3, m);
  CHECK(p0.diff == 0.0);
  CHECK(p0.pass);
  for (double t : {0.5, 1.0}) {
    const PathCheckReport p = path_check(ens, t, 0.3, m);
    CHECK(p.pass);
    CHECK(p.diff <= p.margin);
  }
  CHECK_THROWS_AS(path_check(ens, 1.5, 0.3, m), std::domain_error);
}

TEST_CASE("fkg gap determinism across worker counts") {
  const auto m = EnvModel::gaussian(0.25);
  const McEstimate a = fkg_gap({10, 64, 5, 1}, {0.5, 1.0, 0.3}, m);
  const McEstimate b = fkg_gap({10, 64, 5, 4}, {0.5, 1.0, 0.3}, m);
  CHECK(a.mean == b.mean);
  CHECK(a.sem == b.sem);
}
