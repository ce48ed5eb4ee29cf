#include <doctest.h>

#include <cmath>
#include <vector>

#include "polymerlab/env.hpp"
#include "polymerlab/rng.hpp"

using namespace polymerlab;

namespace {

std::vector<EnvModel> shipped_models() {
  return {EnvModel::gaussian(0.25), EnvModel::gaussian(1.0), EnvModel::centered_poisson(1.0),
          EnvModel::centered_gamma(2.0, 0.2),
          EnvModel::compound_poisson_two_atom(1.0, 1.0, -1.0, 0.5)};
}

}  // namespace

TEST_CASE("lambda closed forms") {
  CHECK(lambda(EnvModel::gaussian(0.25), 1.0) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(lambda(EnvModel::centered_poisson(1.0), 1.0) ==
        doctest::Approx(std::exp(1.0) - 2.0).epsilon(1e-14));
  for (const auto& m : shipped_models()) CHECK(lambda(m, 0.0) == 0.0);
  // centered gamma: lambda'(beta) = k theta^2 beta / (1 - theta beta)
  CHECK(lambda_prime(EnvModel::centered_gamma(2.0, 0.2), 1.0) ==
        doctest::Approx(0.1).epsilon(1e-12));
  CHECK(lambda_prime(EnvModel::centered_poisson(1.0), 0.0) == 0.0);
  // gaussian has constant second cumulant
  for (double b : {0.0, 0.5, 2.0, 8.0})
    CHECK(lambda_second(EnvModel::gaussian(0.25), b) == 0.25);
}

TEST_CASE("lambda domain errors name the bound") {
  const auto m = EnvModel::centered_gamma(1.0, 0.5);  // B = 1.8
  CHECK_THROWS_AS(lambda(m, 2.0), std::domain_error);
  CHECK_THROWS_WITH_AS(lambda(m, 2.0), doctest::Contains("B=1.8"), std::domain_error);
  CHECK_NOTHROW(lambda(m, 1.8));
}

TEST_CASE("closed-form lambda agrees with the Levy-Khinchine triple") {
  for (const auto& m : shipped_models()) {
    for (int k = 0; k <= 16; ++k) {
      const double beta = m.mgf_bound * k / 16.0;
      const double closed = lambda(m, beta);
      const double triple = m.triple.lambda(beta);
      CHECK(std::abs(closed - triple) <= 1e-8 * std::max(1.0, std::abs(closed)));
    }
    // second cumulant at zero from both routes
    CHECK(lambda_second(m, 0.0) == doctest::Approx(m.triple.lambda_second0()).epsilon(1e-10));
    // the jump measure integrates min(1, u^2)
    CHECK(std::isfinite(m.triple.jumps.min_one_u2()));
  }
}

TEST_CASE("finite differences match lambda_prime and lambda_second") {
  const double h = 1e-4;
  for (const auto& m : shipped_models()) {
    for (double frac : {0.1, 0.25, 0.45}) {
      const double b = m.mgf_bound * frac;
      const double fd1 = (lambda(m, b + h) - lambda(m, b - h)) / (2.0 * h);
      const double fd2 = (lambda(m, b + h) - 2.0 * lambda(m, b) + lambda(m, b - h)) / (h * h);
      CHECK(std::abs(fd1 - lambda_prime(m, b)) <= 1e-5 * std::max(1.0, std::abs(fd1)));
      CHECK(std::abs(fd2 - lambda_second(m, b)) <= 1e-3 * std::max(1.0, std::abs(fd2)));
    }
  }
}

TEST_CASE("integration by parts residual") {
  // atom-type models on the fine grid of the module invariant
  for (const auto& m : {EnvModel::gaussian(1.0), EnvModel::centered_poisson(1.0),
                        EnvModel::compound_poisson_two_atom(1.0, 1.0, -1.0, 0.5)}) {
    for (double s = 0.0; s <= m.mgf_bound / 2.0 + 1e-9; s += 0.1)
      CHECK(ibp_residual(m, s) <= 1e-6);
  }
  // density-type model at the acceptance abscissas
  const auto g = EnvModel::centered_gamma(2.0, 0.2);
  for (double frac : {0.0, 0.125, 0.25, 0.5})
    CHECK(ibp_residual(g, g.mgf_bound * frac) <= 1e-6);
  // centered environment, f constant: both sides vanish
  CHECK(ibp_residual(EnvModel::centered_poisson(1.0), 0.0) == 0.0);
  CHECK_THROWS_AS(ibp_residual(g, g.mgf_bound), std::domain_error);  // s > B/2
}

TEST_CASE("lemma_c values and monotonicity") {
  CHECK(lemma_c(EnvModel::gaussian(1.0), 3.0) == 1.0);
  CHECK(lemma_c(EnvModel::gaussian(0.25), 0.7) == 0.25);
  CHECK(lemma_c(EnvModel::centered_poisson(1.0), 0.5) ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-14));
  for (const auto& m : shipped_models()) {
    double prev = -1.0;
    for (double b = 0.0; b <= m.mgf_bound + 1e-12; b += m.mgf_bound / 8.0) {
      const double c = lemma_c(m, b);
      CHECK(c >= prev);
      prev = c;
    }
    CHECK(lemma_c(m, 0.0) == doctest::Approx(lambda_second(m, 0.0)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(lemma_c(EnvModel::gaussian(1.0), -1.0), std::domain_error);
  // gamma positive-side integral diverges past the density decay
  CHECK_THROWS_AS(lemma_c(EnvModel::centered_gamma(2.0, 0.2), 5.0), std::domain_error);
}

TEST_CASE("sample_field shape and determinism") {
  const auto m = EnvModel::gaussian(1.0);
  const EnvField f = sample_field(m, 3, 123);
  CHECK(f.site_count() == 9);  // 2 + 3 + 4
  const EnvField g = sample_field(m, 3, 123);
  for (int i = 1; i <= 3; ++i)
    for (int x = -i; x <= i; x += 2) CHECK(f.at(i, x) == g.at(i, x));
  const EnvField h = sample_field(m, 3, 124);
  CHECK(f.at(1, 1) != h.at(1, 1));
  // a longer field extends the shorter one site-for-site
  const EnvField big = sample_field(m, 5, 123);
  for (int i = 1; i <= 3; ++i)
    for (int x = -i; x <= i; x += 2) CHECK(big.at(i, x) == f.at(i, x));
  CHECK_THROWS_AS(f.at(1, 0), std::out_of_range);  // parity
  CHECK_THROWS_AS(f.at(4, 0), std::out_of_range);
  CHECK_THROWS_AS(sample_field(m, 0, 1), std::domain_error);
}

TEST_CASE("site values follow the model law") {
  // mean ~ 0, variance ~ lambda''(0), empirical log-MGF within 4 se.
  // The check needs exp(beta eta) inside its CLT regime: at beta = B/4 the
  // relative second moment exp(lambda(2b) - 2 lambda(b)) reaches e^40 for the
  // atom families (B = 8) and the sample mean of 1e5 draws is meaningless, so
  // beta halves until that moment ratio is <= 50.
  for (const auto& m : shipped_models()) {
    const int n_samples = 100000;
    double b = m.mgf_bound / 4.0;
    while (lambda(m, 2.0 * b) - 2.0 * lambda(m, b) > std::log(50.0)) b *= 0.5;
    double s1 = 0.0, s2 = 0.0, me = 0.0, me2 = 0.0;
    for (int k = 0; k < n_samples; ++k) {
      const double v = sample_site(m, static_cast<uint64_t>(k), 1, 1);
      s1 += v;
      s2 += v * v;
      const double e = std::exp(b * v);
      me += e;
      me2 += e * e;
    }
    const double mean = s1 / n_samples;
    const double var = s2 / n_samples - mean * mean;
    const double sigma2 = lambda_second(m, 0.0);
    CHECK(std::abs(mean) <= 5.0 * std::sqrt(sigma2 / n_samples));
    // 5-sigma band on the sample variance, gaussian-width approximation
    CHECK(std::abs(var - sigma2) <= 5.0 * 3.0 * sigma2 / std::sqrt(double(n_samples)));
    const double mgf_mean = me / n_samples;
    const double mgf_se = std::sqrt((me2 / n_samples - mgf_mean * mgf_mean) / n_samples);
    const double lam_hat = std::log(mgf_mean);
    CHECK(std::abs(lam_hat - lambda(m, b)) <= 4.0 * mgf_se / mgf_mean);
  }
}

TEST_CASE("field of a unit gaussian has unit sample variance") {
  const EnvField f = sample_field(EnvModel::gaussian(1.0), 1000, 2024);
  double s1 = 0.0, s2 = 0.0;
  for (const auto& layer : f.layers)
    for (double v : layer) {
      s1 += v;
      s2 += v * v;
    }
  const double n = static_cast<double>(f.site_count());
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  // sd(sample variance) = sqrt(2/N) for a gaussian; 5-sigma band
  CHECK(std::abs(var - 1.0) <= 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("rescaled model represents eta / divisor") {
  const auto m = EnvModel::centered_poisson(2.0);
  const auto r = rescaled(m, 3.0);
  CHECK(r.mgf_bound == doctest::Approx(3.0 * m.mgf_bound));
  for (double b : {0.5, 1.0, 6.0})
    CHECK(lambda(r, b) == doctest::Approx(lambda(m, b / 3.0)).epsilon(1e-14));
  CHECK(lambda_second(r, 0.0) == doctest::Approx(lambda_second(m, 0.0) / 9.0).epsilon(1e-14));
  // triple route stays consistent after rescaling
  for (double b : {0.5, 2.0})
    CHECK(lambda(r, b) == doctest::Approx(r.triple.lambda(b)).epsilon(1e-10));
  // sampling divides pathwise
  CHECK(sample_site(r, 99, 2, 0) == doctest::Approx(sample_site(m, 99, 2, 0) / 3.0));
}

TEST_CASE("parse_model") {
  const EnvModel g = parse_model({{"family", "gaussian"}, {"variance", "0.5"}});
  CHECK(g.family == EnvFamily::Gaussian);
  CHECK(g.variance == 0.5);
  const EnvModel p = parse_model({{"family", "centered_poisson"}, {"rate", "2"}});
  CHECK(p.rate == 2.0);
  CHECK(p.mgf_bound == 8.0);
  const EnvModel ga =
      parse_model({{"family", "gamma"}, {"shape", "2"}, {"scale", "0.2"}, {"mgf_bound", "3"}});
  CHECK(ga.mgf_bound == 3.0);
  CHECK_THROWS_AS(parse_model({{"family", "cauchy"}}), std::invalid_argument);
  CHECK_THROWS_AS(parse_model({{"rate", "1"}}), std::invalid_argument);
  CHECK_THROWS_AS(parse_model({{"family", "gaussian"}, {"variance", "x"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_model({{"family", "gaussian"}, {"rate", "1"}}), std::invalid_argument);
  CHECK_THROWS_AS(parse_model({{"family", "centered_poisson"}, {"rate", "-1"}}),
                  std::domain_error);
}
