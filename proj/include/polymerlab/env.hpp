#pragma once

// Infinitely divisible environment laws: Levy-Khinchine triples, cumulant
// functions, site sampling, the integration-by-parts residual and the
// comparison constant of the replica bound.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polymerlab/field.hpp"
#include "polymerlab/rng.hpp"

namespace polymerlab {

struct JumpAtom {
  double location = 0.0;  // u != 0
  double mass = 0.0;      // > 0
};

struct JumpDensity {
  std::function<double(double)> pdf;  // density of pi on (lo,hi), zero excluded
  double lo = 0.0;
  double hi = 0.0;
  int nodes = 256;
};

struct JumpMeasure {
  std::vector<JumpAtom> atoms;
  std::optional<JumpDensity> density;

  // integral of g against pi (atoms + density part)
  double integral(const std::function<double(double)>& g) const;
  // integral of min(1,u^2) against pi; must be finite
  double min_one_u2() const;
};

struct LevyTriple {
  double drift = 0.0;  // c0 under the |u|<=1 compensation convention
  double sigma2 = 0.0;
  JumpMeasure jumps;

  double lambda(double beta) const;  // Levy-Khinchine evaluation
  double lambda_second0() const;     // sigma2 + int u^2 pi(du)
};

enum class EnvFamily { Gaussian, CenteredPoisson, CenteredGamma, CompoundPoissonTwoAtom };

struct EnvModel {
  EnvFamily family = EnvFamily::Gaussian;
  double variance = 1.0;                     // Gaussian
  double rate = 1.0;                         // CenteredPoisson, CompoundPoissonTwoAtom
  double shape = 1.0, scale = 1.0;           // CenteredGamma
  double a_plus = 1.0, a_minus = -1.0, p_plus = 0.5;  // CompoundPoissonTwoAtom
  double scale_div = 1.0;                    // model stores the law of eta/scale_div
  double mgf_bound = 8.0;                    // B of the finiteness hypothesis
  LevyTriple triple;

  std::string name() const;
  std::string family_name() const;

  static EnvModel gaussian(double variance);
  static EnvModel centered_poisson(double rate);
  static EnvModel centered_gamma(double shape, double scale);
  static EnvModel compound_poisson_two_atom(double rate, double a_plus, double a_minus,
                                            double p_plus);
};

// log-MGF of eta and its first two derivatives, closed form per family;
// throws std::domain_error when |beta| exceeds the model bound B
double lambda(const EnvModel& m, double beta);
double lambda_prime(const EnvModel& m, double beta);
double lambda_second(const EnvModel& m, double beta);

// one site value; pure function of (seed, i, x)
double sample_site(const EnvModel& m, uint64_t seed, int i, int x);

// fill layer i (out.size() == i+1, x = 2j - i)
void sample_layer(const EnvModel& m, uint64_t seed, int i, std::span<double> out);

// materialized realization on all sites reachable in n steps
EnvField sample_field(const EnvModel& m, int n, uint64_t seed);

// |E[eta f(eta)] - (c0 Ef + sigma2 Ef' + int (Ef(eta+u) - 1_{|u|<=1} Ef(eta)) u pi(du))|
// for f(eta) = exp(s eta); evaluated in quad precision so the two routes stay
// comparable even where exp(lambda) is astronomically large
double ibp_residual(const EnvModel& m, double s);

// sigma^2 + int_{u<0} u^2 pi(du) + int_{u>0} u^2 e^{B u} pi(du)
double lemma_c(const EnvModel& m, double big_b);

// law of eta / divisor
EnvModel rescaled(const EnvModel& m, double divisor);

// model from a key-value section, e.g. {family: gaussian, variance: 1.0}
EnvModel parse_model(const std::map<std::string, std::string>& kv);

}  // namespace polymerlab
