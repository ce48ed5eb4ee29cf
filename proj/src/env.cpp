#include "polymerlab/env.hpp"

#include <quadmath.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "polymerlab/quadrature.hpp"

namespace polymerlab {

using qfloat = __float128;

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

std::string fmt(double v) {
  char buf[64];
  snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void check_beta_domain(const EnvModel& m, double beta) {
  if (std::abs(beta) > m.mgf_bound * (1.0 + 1e-12)) {
    throw std::domain_error("beta=" + fmt(beta) + " outside the MGF domain bound B=" +
                            fmt(m.mgf_bound) + " of model " + m.name());
  }
}

double compound_m1(const EnvModel& m) {
  return m.p_plus * m.a_plus + (1.0 - m.p_plus) * m.a_minus;
}

// drift that centers the law: lambda'(0) = c0 + int_{|u|>1} u pi(du) = 0
double centering_drift(const JumpMeasure& jumps) {
  double tail = 0.0;
  for (const auto& a : jumps.atoms)
    if (std::abs(a.location) > 1.0) tail += a.location * a.mass;
  if (jumps.density) {
    const auto& d = *jumps.density;
    tail += quad::integrate(d.lo, d.hi, d.nodes, [&](double u) {
      return std::abs(u) > 1.0 ? u * d.pdf(u) : 0.0;
    });
  }
  return -tail;
}

LevyTriple build_triple(const EnvModel& m) {
  LevyTriple t;
  const double div = m.scale_div;
  switch (m.family) {
    case EnvFamily::Gaussian:
      t.sigma2 = m.variance / (div * div);
      break;
    case EnvFamily::CenteredPoisson:
      t.jumps.atoms.push_back({1.0 / div, m.rate});
      break;
    case EnvFamily::CenteredGamma: {
      // base Levy density shape * u^-1 * exp(-u/scale); here for eta/div
      const double shape = m.shape, scale = m.scale;
      JumpDensity d;
      d.pdf = [shape, scale, div](double u) { return shape * std::exp(-u * div / scale) / u; };
      d.lo = 0.0;
      d.hi = 460.0 * scale / div;  // covers exp(B u) reweighting up to B = 0.9/scale
      d.nodes = 256;
      t.jumps.density = d;
      break;
    }
    case EnvFamily::CompoundPoissonTwoAtom:
      if (m.p_plus > 0.0) t.jumps.atoms.push_back({m.a_plus / div, m.rate * m.p_plus});
      if (m.p_plus < 1.0) t.jumps.atoms.push_back({m.a_minus / div, m.rate * (1.0 - m.p_plus)});
      break;
  }
  t.drift = centering_drift(t.jumps);
  return t;
}

}  // namespace

double JumpMeasure::integral(const std::function<double(double)>& g) const {
  double acc = 0.0;
  for (const auto& a : atoms) acc += a.mass * g(a.location);
  if (density) {
    const auto& d = *density;
    acc += quad::integrate(d.lo, d.hi, d.nodes, [&](double u) { return g(u) * d.pdf(u); });
  }
  return acc;
}

double JumpMeasure::min_one_u2() const {
  return integral([](double u) { return std::min(1.0, u * u); });
}

double LevyTriple::lambda(double beta) const {
  double acc = drift * beta + 0.5 * sigma2 * beta * beta;
  acc += jumps.integral([beta](double u) {
    const double comp = std::abs(u) <= 1.0 ? beta * u : 0.0;
    return std::expm1(beta * u) - comp;
  });
  return acc;
}

double LevyTriple::lambda_second0() const {
  return sigma2 + jumps.integral([](double u) { return u * u; });
}

EnvModel EnvModel::gaussian(double variance) {
  require(variance >= 0.0, "gaussian: variance must be >= 0");
  EnvModel m;
  m.family = EnvFamily::Gaussian;
  m.variance = variance;
  m.mgf_bound = 8.0;  // MGF is entire; capped for interface purposes
  m.triple = build_triple(m);
  return m;
}

EnvModel EnvModel::centered_poisson(double rate) {
  require(rate > 0.0, "centered_poisson: rate must be > 0");
  EnvModel m;
  m.family = EnvFamily::CenteredPoisson;
  m.rate = rate;
  m.mgf_bound = 8.0;
  m.triple = build_triple(m);
  return m;
}

EnvModel EnvModel::centered_gamma(double shape, double scale) {
  require(shape > 0.0 && scale > 0.0, "centered_gamma: shape and scale must be > 0");
  EnvModel m;
  m.family = EnvFamily::CenteredGamma;
  m.shape = shape;
  m.scale = scale;
  m.mgf_bound = 0.9 / scale;
  m.triple = build_triple(m);
  return m;
}

EnvModel EnvModel::compound_poisson_two_atom(double rate, double a_plus, double a_minus,
                                             double p_plus) {
  require(rate > 0.0, "compound_poisson_two_atom: rate must be > 0");
  require(a_plus != 0.0 && a_minus != 0.0, "compound_poisson_two_atom: atoms must be nonzero");
  require(p_plus >= 0.0 && p_plus <= 1.0, "compound_poisson_two_atom: p_plus must be in [0,1]");
  EnvModel m;
  m.family = EnvFamily::CompoundPoissonTwoAtom;
  m.rate = rate;
  m.a_plus = a_plus;
  m.a_minus = a_minus;
  m.p_plus = p_plus;
  m.mgf_bound = 8.0;
  m.triple = build_triple(m);
  return m;
}

std::string EnvModel::family_name() const {
  switch (family) {
    case EnvFamily::Gaussian: return "gaussian";
    case EnvFamily::CenteredPoisson: return "centered_poisson";
    case EnvFamily::CenteredGamma: return "centered_gamma";
    case EnvFamily::CompoundPoissonTwoAtom: return "compound_poisson_two_atom";
  }
  return "?";
}

std::string EnvModel::name() const {
  std::ostringstream os;
  os << family_name() << "(";
  switch (family) {
    case EnvFamily::Gaussian: os << "variance=" << variance; break;
    case EnvFamily::CenteredPoisson: os << "rate=" << rate; break;
    case EnvFamily::CenteredGamma: os << "shape=" << shape << ",scale=" << scale; break;
    case EnvFamily::CompoundPoissonTwoAtom:
      os << "rate=" << rate << ",a+=" << a_plus << ",a-=" << a_minus << ",p+=" << p_plus;
      break;
  }
  os << ")";
  if (scale_div != 1.0) os << "/" << scale_div;
  return os.str();
}

double lambda(const EnvModel& m, double beta) {
  check_beta_domain(m, beta);
  const double s = beta / m.scale_div;
  switch (m.family) {
    case EnvFamily::Gaussian:
      return 0.5 * m.variance * s * s;
    case EnvFamily::CenteredPoisson:
      return m.rate * (std::expm1(s) - s);
    case EnvFamily::CenteredGamma:
      return -m.shape * std::log1p(-m.scale * s) - m.shape * m.scale * s;
    case EnvFamily::CompoundPoissonTwoAtom:
      return m.rate * (m.p_plus * std::expm1(s * m.a_plus) +
                       (1.0 - m.p_plus) * std::expm1(s * m.a_minus) - s * compound_m1(m));
  }
  return 0.0;
}

double lambda_prime(const EnvModel& m, double beta) {
  check_beta_domain(m, beta);
  const double s = beta / m.scale_div;
  double d = 0.0;
  switch (m.family) {
    case EnvFamily::Gaussian: d = m.variance * s; break;
    case EnvFamily::CenteredPoisson: d = m.rate * std::expm1(s); break;
    case EnvFamily::CenteredGamma:
      d = m.shape * m.scale * m.scale * s / (1.0 - m.scale * s);
      break;
    case EnvFamily::CompoundPoissonTwoAtom:
      d = m.rate * (m.p_plus * m.a_plus * std::exp(s * m.a_plus) +
                    (1.0 - m.p_plus) * m.a_minus * std::exp(s * m.a_minus) - compound_m1(m));
      break;
  }
  return d / m.scale_div;
}

double lambda_second(const EnvModel& m, double beta) {
  check_beta_domain(m, beta);
  const double s = beta / m.scale_div;
  double d = 0.0;
  switch (m.family) {
    case EnvFamily::Gaussian: d = m.variance; break;
    case EnvFamily::CenteredPoisson: d = m.rate * std::exp(s); break;
    case EnvFamily::CenteredGamma: {
      const double g = 1.0 - m.scale * s;
      d = m.shape * m.scale * m.scale / (g * g);
      break;
    }
    case EnvFamily::CompoundPoissonTwoAtom:
      d = m.rate * (m.p_plus * m.a_plus * m.a_plus * std::exp(s * m.a_plus) +
                    (1.0 - m.p_plus) * m.a_minus * m.a_minus * std::exp(s * m.a_minus));
      break;
  }
  return d / (m.scale_div * m.scale_div);
}

double sample_site(const EnvModel& m, uint64_t seed, int i, int x) {
  rng::Stream s = rng::site_stream(seed, i, x);
  double v = 0.0;
  switch (m.family) {
    case EnvFamily::Gaussian:
      v = std::sqrt(m.variance) * s.normal();
      break;
    case EnvFamily::CenteredPoisson:
      v = static_cast<double>(s.poisson(m.rate)) - m.rate;
      break;
    case EnvFamily::CenteredGamma:
      v = s.gamma(m.shape, m.scale) - m.shape * m.scale;
      break;
    case EnvFamily::CompoundPoissonTwoAtom: {
      const long n = s.poisson(m.rate);
      double acc = 0.0;
      for (long k = 0; k < n; ++k) acc += s.u01() < m.p_plus ? m.a_plus : m.a_minus;
      v = acc - m.rate * compound_m1(m);
      break;
    }
  }
  return v / m.scale_div;
}

void sample_layer(const EnvModel& m, uint64_t seed, int i, std::span<double> out) {
  for (int j = 0; j <= i; ++j) out[static_cast<std::size_t>(j)] = sample_site(m, seed, i, 2 * j - i);
}

EnvField sample_field(const EnvModel& m, int n, uint64_t seed) {
  require(n >= 1, "sample_field: n must be >= 1");
  EnvField f;
  f.n = n;
  f.seed = seed;
  f.model_name = m.name();
  f.layers.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    f.layers[static_cast<std::size_t>(i) - 1].resize(static_cast<std::size_t>(i) + 1);
    sample_layer(m, seed, i, f.layers[static_cast<std::size_t>(i) - 1]);
  }
  return f;
}

namespace {

// quad-precision closed forms; mirror lambda()/lambda_prime() above
qfloat lambda_q(const EnvModel& m, qfloat beta) {
  const qfloat s = beta / static_cast<qfloat>(m.scale_div);
  switch (m.family) {
    case EnvFamily::Gaussian:
      return 0.5Q * static_cast<qfloat>(m.variance) * s * s;
    case EnvFamily::CenteredPoisson:
      return static_cast<qfloat>(m.rate) * (expm1q(s) - s);
    case EnvFamily::CenteredGamma: {
      const qfloat ks = static_cast<qfloat>(m.shape), th = static_cast<qfloat>(m.scale);
      return -ks * log1pq(-th * s) - ks * th * s;
    }
    case EnvFamily::CompoundPoissonTwoAtom: {
      const qfloat p = static_cast<qfloat>(m.p_plus), ap = static_cast<qfloat>(m.a_plus),
                   am = static_cast<qfloat>(m.a_minus);
      return static_cast<qfloat>(m.rate) *
             (p * expm1q(s * ap) + (1.0Q - p) * expm1q(s * am) -
              s * static_cast<qfloat>(compound_m1(m)));
    }
  }
  return 0;
}

qfloat lambda_prime_q(const EnvModel& m, qfloat beta) {
  const qfloat s = beta / static_cast<qfloat>(m.scale_div);
  qfloat d = 0;
  switch (m.family) {
    case EnvFamily::Gaussian:
      d = static_cast<qfloat>(m.variance) * s;
      break;
    case EnvFamily::CenteredPoisson:
      d = static_cast<qfloat>(m.rate) * expm1q(s);
      break;
    case EnvFamily::CenteredGamma: {
      const qfloat ks = static_cast<qfloat>(m.shape), th = static_cast<qfloat>(m.scale);
      d = ks * th * th * s / (1.0Q - th * s);
      break;
    }
    case EnvFamily::CompoundPoissonTwoAtom: {
      const qfloat p = static_cast<qfloat>(m.p_plus), ap = static_cast<qfloat>(m.a_plus),
                   am = static_cast<qfloat>(m.a_minus);
      d = static_cast<qfloat>(m.rate) *
          (p * ap * expq(s * ap) + (1.0Q - p) * am * expq(s * am) -
           static_cast<qfloat>(compound_m1(m)));
      break;
    }
  }
  return d / static_cast<qfloat>(m.scale_div);
}

}  // namespace

double ibp_residual(const EnvModel& m, double s) {
  require(s >= 0.0 && s <= m.mgf_bound / 2.0 * (1.0 + 1e-12),
          "ibp_residual: need 0 <= s <= B/2 with B=" + fmt(m.mgf_bound));
  const qfloat qs = static_cast<qfloat>(s);
  const qfloat ef = expq(lambda_q(m, qs));  // E f(eta) with f = exp(s eta)
  const qfloat lhs = lambda_prime_q(m, qs) * ef;

  // c0 Ef + sigma2 Ef' + int (Ef(eta+u) - 1_{|u|<=1} Ef) u pi(du), Ef(eta+u) = e^{su} Ef
  qfloat bracket = static_cast<qfloat>(m.triple.drift) + static_cast<qfloat>(m.triple.sigma2) * qs;
  for (const auto& a : m.triple.jumps.atoms) {
    const qfloat u = static_cast<qfloat>(a.location);
    const qfloat comp = std::abs(a.location) <= 1.0 ? 1.0Q : 0.0Q;
    bracket += static_cast<qfloat>(a.mass) * u * (expq(qs * u) - comp);
  }
  if (m.triple.jumps.density) {
    const auto& d = *m.triple.jumps.density;
    bracket += quad::integrate(d.lo, d.hi, d.nodes, [&](double u) -> qfloat {
      const qfloat comp = std::abs(u) <= 1.0 ? 1.0Q : 0.0Q;
      return (expq(qs * static_cast<qfloat>(u)) - comp) * static_cast<qfloat>(u) *
             static_cast<qfloat>(d.pdf(u));
    });
  }
  const qfloat rhs = ef * bracket;
  return static_cast<double>(fabsq(lhs - rhs));
}

double lemma_c(const EnvModel& m, double big_b) {
  require(big_b >= 0.0, "lemma_c: big_b must be >= 0");
  if (m.triple.jumps.density) {
    // exponential reweighting must stay inside the density's decay
    require(big_b <= m.mgf_bound * (1.0 + 1e-12),
            "lemma_c: positive-side integral diverges beyond B=" + fmt(m.mgf_bound));
  }
  double c = m.triple.sigma2;
  c += m.triple.jumps.integral([big_b](double u) {
    return u < 0.0 ? u * u : u * u * std::exp(big_b * u);
  });
  return c;
}

EnvModel rescaled(const EnvModel& m, double divisor) {
  require(divisor > 0.0, "rescaled: divisor must be > 0");
  EnvModel r = m;
  r.scale_div = m.scale_div * divisor;
  r.mgf_bound = m.mgf_bound * divisor;
  r.triple = build_triple(r);
  return r;
}

EnvModel parse_model(const std::map<std::string, std::string>& kv) {
  auto get = [&kv](const std::string& key, double fallback, bool* found = nullptr) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (found) *found = false;
      return fallback;
    }
    if (found) *found = true;
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("bad number for " + key);
    return v;
  };
  auto fam_it = kv.find("family");
  if (fam_it == kv.end()) throw std::invalid_argument("model section needs family=");
  const std::string fam = fam_it->second;

  EnvModel m;
  if (fam == "gaussian") {
    m = EnvModel::gaussian(get("variance", 1.0));
  } else if (fam == "centered_poisson" || fam == "poisson") {
    m = EnvModel::centered_poisson(get("rate", 1.0));
  } else if (fam == "centered_gamma" || fam == "gamma") {
    m = EnvModel::centered_gamma(get("shape", 1.0), get("scale", 1.0));
  } else if (fam == "compound_poisson_two_atom" || fam == "compound") {
    m = EnvModel::compound_poisson_two_atom(get("rate", 1.0), get("a_plus", 1.0),
                                            get("a_minus", -1.0), get("p_plus", 0.5));
  } else {
    throw std::invalid_argument("unknown environment family: " + fam);
  }
  bool has_bound = false;
  const double bound = get("mgf_bound", 0.0, &has_bound);
  if (has_bound) {
    require(bound > 0.0, "mgf_bound must be > 0");
    m.mgf_bound = bound;
  }
  static const std::map<std::string, std::string> allowed = {
      {"gaussian", "variance"},
      {"centered_poisson", "rate"},
      {"poisson", "rate"},
      {"centered_gamma", "shape scale"},
      {"gamma", "shape scale"},
      {"compound_poisson_two_atom", "rate a_plus a_minus p_plus"},
      {"compound", "rate a_plus a_minus p_plus"}};
  const std::string& ok = allowed.at(fam);
  for (const auto& [key, value] : kv) {
    if (key == "family" || key == "mgf_bound") continue;
    if (ok.find(key) == std::string::npos)
      throw std::invalid_argument("unknown key '" + key + "' for family " + fam);
  }
  return m;
}

}  // namespace polymerlab
