#include <doctest.h>

#include <cmath>

#include "polymerlab/experiments.hpp"
#include "polymerlab/polymer.hpp"
#include "polymerlab/rng.hpp"

using namespace polymerlab;

TEST_CASE("estimate_pn basics") {
  const auto m = EnvModel::gaussian(1.0);
  // beta = 0: every replicate is exactly zero
  const McEstimate e0 = estimate_pn(m, 0.0, 32, 16, 7);
  CHECK(e0.mean == 0.0);
  CHECK(e0.sem == 0.0);
  // Jensen: E ln W <= ln E W = 0
  const McEstimate e = estimate_pn(m, 0.6, 48, 300, 7);
  CHECK(e.mean <= 3.0 * e.sem);
  // strong disorder at beta = 1, n = 64: clearly negative
  const McEstimate s = estimate_pn(m, 1.0, 64, 500, 7);
  CHECK(s.mean < 0.0);
  CHECK(std::abs(s.mean) > 3.0 * s.sem);
  CHECK_THROWS_AS(estimate_pn(m, 0.5, 32, 1, 7), std::domain_error);
  CHECK_THROWS_AS(estimate_pn(m, 9.0, 32, 16, 7), std::domain_error);
}

TEST_CASE("estimate_pn is bit-identical for any worker count") {
  const auto m = EnvModel::gaussian(1.0);
  const McEstimate a = estimate_pn(m, 0.7, 48, 200, 99, 1);
  const McEstimate b = estimate_pn(m, 0.7, 48, 200, 99, 4);
  CHECK(a.mean == b.mean);
  CHECK(a.sem == b.sem);
}

TEST_CASE("normalized partition function has mean one") {
  const auto m = EnvModel::gaussian(1.0);
  const int reps = 4000;
  std::vector<double> w(reps);
  for (int r = 0; r < reps; ++r)
    w[static_cast<std::size_t>(r)] = std::exp(log_w(m, 12, rng::replicate_seed(33, r), 0.3));
  const McEstimate e = mc_estimate(w, 33);
  CHECK(std::abs(e.mean - 1.0) <= 4.0 * e.sem);
}

TEST_CASE("p_n grows along doubling chains within noise") {
  const auto m = EnvModel::gaussian(1.0);
  const McEstimate p16 = estimate_pn(m, 0.8, 16, 600, 44);
  const McEstimate p32 = estimate_pn(m, 0.8, 32, 600, 45);
  const McEstimate p64 = estimate_pn(m, 0.8, 64, 600, 46);
  CHECK(p32.mean >= p16.mean - 3.0 * std::hypot(p16.sem, p32.sem));
  CHECK(p64.mean >= p32.mean - 3.0 * std::hypot(p32.sem, p64.sem));
  // doubling n at fixed beta moves the estimate by at most noise plus the
  // (nonnegative-in-mean) superadditivity drift
  CHECK(p16.mean - p64.mean <= 3.0 * std::hypot(p16.sem, p64.sem));
}

TEST_CASE("wat lower bound") {
  const WatReport g = wat_check(EnvModel::gaussian(0.25), 0.3, 50, 400, 11);
  CHECK(g.pass);
  CHECK(g.c == doctest::Approx(0.25));
  CHECK(g.rhs < 0.0);
  const WatReport p = wat_check(EnvModel::centered_poisson(1.0), 0.3, 50, 400, 11);
  CHECK(p.pass);
  CHECK(p.c == doctest::Approx(std::exp(0.6)).epsilon(1e-12));  // atom at 1, weight e^{2 beta}
  // beta = 0 is exact: both sides vanish
  const WatReport z = wat_check(EnvModel::gaussian(0.25), 0.0, 20, 8, 11);
  CHECK(z.pn.mean == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.pass);
  CHECK_THROWS_AS(wat_check(EnvModel::centered_gamma(2.0, 0.2), 3.0, 20, 8, 11),
                  std::domain_error);
}

TEST_CASE("scaling fit guards") {
  CHECK_THROWS_AS(scaling_fit(EnvModel::gaussian(1.0), {0.8}, 50, 3), std::domain_error);
  // a zero-variance environment gives p_n = 0 at every point: all excluded
  CHECK_THROWS_AS(scaling_fit(EnvModel::gaussian(0.0), {0.8, 1.0}, 8, 3), std::domain_error);
}

TEST_CASE("monotonicity in beta with common random fields") {
  const MonotonicityReport r =
      monotonicity_check(EnvModel::gaussian(1.0), {0.25, 0.5, 0.75, 1.0}, 48, 300, 21);
  CHECK(r.pass);
  for (const auto& d : r.diffs) CHECK(d.mean <= 3.0 * d.sem);
  CHECK(r.crn_monotone_fraction >= 0.0);
  CHECK(r.crn_monotone_fraction <= 1.0);
  CHECK_THROWS_AS(monotonicity_check(EnvModel::gaussian(1.0), {0.5, 0.25}, 16, 20, 21),
                  std::domain_error);
}

TEST_CASE("concentration tails") {
  const TailReport rep = concentration_tails(EnvModel::gaussian(1.0), 0.5, 32, 1000, 15);
  REQUIRE(rep.xs.size() == rep.upper.size());
  // at x = 0 both exceedance frequencies sit near one half
  CHECK(rep.xs[0] == 0.0);
  CHECK(rep.upper[0] > 0.4);
  CHECK(rep.upper[0] < 0.6);
  CHECK(rep.lower[0] > 0.4);
  CHECK(rep.lower[0] < 0.6);
  for (std::size_t j = 1; j < rep.xs.size(); ++j) {
    CHECK(rep.upper[j] <= rep.upper[j - 1]);
    CHECK(rep.lower[j] <= rep.lower[j - 1]);
  }
  // the fitted constant dominates both empirical tails by construction
  CHECK(rep.k_hat > 0.0);
  for (std::size_t j = 0; j < rep.xs.size(); ++j) {
    const double bound = std::exp(-32.0 * rep.xs[j] * rep.xs[j] / (4.0 * rep.k_hat));
    CHECK(rep.upper[j] <= bound * (1.0 + 1e-12));
    CHECK(rep.lower[j] <= bound * (1.0 + 1e-12));
  }
  // variance scaling: n Var is O(1) in n
  const TailReport rep64 = concentration_tails(EnvModel::gaussian(1.0), 0.5, 64, 1000, 15);
  const double ratio = rep.nvar / rep64.nvar;
  CHECK(ratio >= 1.0 / 2.5);
  CHECK(ratio <= 2.5);
}

TEST_CASE("beta-derivative identity for the standard gaussian, bound otherwise") {
  const GaussianEqReport g = gaussian_equality_check(EnvModel::gaussian(1.0), 0.4, 24, 800, 19);
  CHECK(g.equality);
  CHECK(g.c_used == doctest::Approx(1.0));
  CHECK(g.pass);
  const GaussianEqReport p =
      gaussian_equality_check(EnvModel::centered_poisson(1.0), 0.4, 24, 800, 19);
  CHECK_FALSE(p.equality);
  CHECK(p.pass);
  CHECK(p.paired.mean >= -3.0 * p.paired.sem);
  CHECK_THROWS_AS(gaussian_equality_check(EnvModel::gaussian(1.0), 0.01, 24, 100, 19),
                  std::domain_error);
}
