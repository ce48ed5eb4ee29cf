// polymerlab: directed-polymer transfer-matrix lab.
// Subcommands dispatch the experiment harness and emit CSV plus a JSON run
// manifest; outputs are byte-identical for identical configs and any worker
// count.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polymerlab/config.hpp"
#include "polymerlab/env.hpp"
#include "polymerlab/experiments.hpp"
#include "polymerlab/io.hpp"
#include "polymerlab/pinning.hpp"
#include "polymerlab/polymer.hpp"
#include "polymerlab/replica.hpp"
#include "polymerlab/rng.hpp"

using nlohmann::json;
using namespace polymerlab;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Ctx {
  std::string out = ".";
  int workers = 0;
  uint64_t seed = 1;
  bool seed_given = false;
  ConfigSection model_kv;  // resolved to gaussian(variance=1) when left empty
  EnvModel model = EnvModel::gaussian(1.0);
};

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += g17(v[i]);
  }
  return s;
}

uint64_t hash_resolved(const ConfigSection& model_kv, const ConfigSection& run_kv) {
  Config c;
  c["model"] = model_kv;
  c["run"] = run_kv;
  return fnv1a64(canonical_config_string(c));
}

std::string hex64(uint64_t v) {
  char buf[20];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// the resolved model with every parameter pinned, for the manifest and hash
ConfigSection model_section(const EnvModel& m) {
  ConfigSection kv{{"family", m.family_name()}, {"mgf_bound", g17(m.mgf_bound)}};
  switch (m.family) {
    case EnvFamily::Gaussian: kv["variance"] = g17(m.variance); break;
    case EnvFamily::CenteredPoisson: kv["rate"] = g17(m.rate); break;
    case EnvFamily::CenteredGamma:
      kv["shape"] = g17(m.shape);
      kv["scale"] = g17(m.scale);
      break;
    case EnvFamily::CompoundPoissonTwoAtom:
      kv["rate"] = g17(m.rate);
      kv["a_plus"] = g17(m.a_plus);
      kv["a_minus"] = g17(m.a_minus);
      kv["p_plus"] = g17(m.p_plus);
      break;
  }
  return kv;
}

void write_manifest(const Ctx& ctx, const std::string& command, const ConfigSection& run_kv,
                    const json& results, const std::vector<std::string>& outputs) {
  const ConfigSection model_kv = model_section(ctx.model);
  json m;
  m["tool"] = "polymerlab";
  m["version"] = kVersion;
  m["command"] = command;
  m["workers"] = ctx.workers;
  m["config_hash"] = hex64(hash_resolved(model_kv, run_kv));
  m["model"] = json(model_kv);
  m["run"] = json(run_kv);
  m["results"] = results;
  m["outputs"] = json(outputs);
  write_text_file(join_path(ctx.out, command + "_manifest.json"), m.dump(2) + "\n");
}

void require_seed(const Ctx& ctx) {
  if (!ctx.seed_given)
    throw std::invalid_argument(
        "a seed is required (use --seed, a [run] seed= line, or POLYMERLAB_SEED)");
}

std::string flag(bool b) { return b ? "1" : "0"; }

// ---------------------------------------------------------------- free-energy
int run_free_energy(Ctx& ctx, const std::vector<double>& betas, int n, int m) {
  require_seed(ctx);
  CsvWriter csv(join_path(ctx.out, "free_energy.csv"));
  csv.header({"beta", "n", "m", "seed", "mean", "sem", "jensen_margin", "diff_prev_mean",
              "diff_prev_sem", "monotone_ok"});
  bool ok = true;
  json results;
  if (betas.size() == 1) {
    const McEstimate e = estimate_pn(ctx.model, betas[0], n, m, ctx.seed, ctx.workers);
    const double jensen = e.mean - 3.0 * e.sem;  // must be <= 0: E ln W <= ln E W = 0
    ok = jensen <= 0.0;
    csv.row({g17(betas[0]), std::to_string(n), std::to_string(m), std::to_string(ctx.seed),
             g17(e.mean), g17(e.sem), g17(jensen), "", "", flag(ok)});
    results["mean"] = e.mean;
    results["sem"] = e.sem;
  } else {
    const MonotonicityReport rep =
        monotonicity_check(ctx.model, betas, n, m, ctx.seed, ctx.workers);
    for (std::size_t k = 0; k < betas.size(); ++k) {
      const McEstimate& e = rep.pn[k];
      const double jensen = e.mean - 3.0 * e.sem;
      bool row_ok = jensen <= 0.0;
      std::string dm, ds;
      if (k > 0) {
        const McEstimate& d = rep.diffs[k - 1];
        dm = g17(d.mean);
        ds = g17(d.sem);
        row_ok = row_ok && d.mean <= 3.0 * d.sem;
      }
      ok = ok && row_ok;
      csv.row({g17(betas[k]), std::to_string(n), std::to_string(m), std::to_string(ctx.seed),
               g17(e.mean), g17(e.sem), g17(jensen), dm, ds, flag(row_ok)});
    }
    results["monotone_pass"] = rep.pass;
    results["crn_monotone_fraction"] = rep.crn_monotone_fraction;
    ok = ok && rep.pass;
  }
  csv.close();
  ConfigSection run_kv{{"betas", fmt_list(betas)},
                       {"n", std::to_string(n)},
                       {"m", std::to_string(m)},
                       {"seed", std::to_string(ctx.seed)}};
  results["pass"] = ok;
  write_manifest(ctx, "free_energy", run_kv, results, {"free_energy.csv"});
  return ok ? 0 : 2;
}

// -------------------------------------------------------------------- scaling
int run_scaling(Ctx& ctx, const std::vector<double>& betas, int m) {
  require_seed(ctx);
  const ScalingResult res = scaling_fit(ctx.model, betas, m, ctx.seed, ctx.workers);
  CsvWriter csv(join_path(ctx.out, "scaling.csv"));
  csv.header({"beta", "n", "m", "seed", "mean", "sem", "included", "note"});
  for (const auto& p : res.points)
    csv.row({g17(p.beta), std::to_string(p.n), std::to_string(m), std::to_string(ctx.seed),
             g17(p.pn.mean), g17(p.pn.sem), flag(p.included), p.note});
  csv.close();
  ConfigSection run_kv{{"betas", fmt_list(betas)},
                       {"m", std::to_string(m)},
                       {"seed", std::to_string(ctx.seed)}};
  json results;
  results["slope"] = res.fit.slope;
  results["slope_se"] = res.fit.slope_se;
  results["intercept"] = res.fit.intercept;
  results["caveat"] = res.caveat;
  write_manifest(ctx, "scaling", run_kv, results, {"scaling.csv"});
  std::cout << "scaling: slope " << g17(res.fit.slope) << " +- " << g17(res.fit.slope_se) << "\n";
  return 0;
}

// ------------------------------------------------------------------------ wat
int run_wat(Ctx& ctx, double beta, int n, int m) {
  require_seed(ctx);
  const WatReport w = wat_check(ctx.model, beta, n, m, ctx.seed, ctx.workers);
  CsvWriter csv(join_path(ctx.out, "wat.csv"));
  csv.header({"model", "beta", "n", "m", "seed", "pn_mean", "pn_sem", "big_b", "c", "c_interface",
              "fn", "rhs", "margin", "pass"});
  csv.row({w.model, g17(beta), std::to_string(n), std::to_string(m), std::to_string(ctx.seed),
           g17(w.pn.mean), g17(w.pn.sem), g17(w.big_b), g17(w.c), g17(w.c_interface), g17(w.fn),
           g17(w.rhs), g17(w.margin), flag(w.pass)});
  csv.close();
  ConfigSection run_kv{{"beta", g17(beta)},
                       {"n", std::to_string(n)},
                       {"m", std::to_string(m)},
                       {"seed", std::to_string(ctx.seed)}};
  json results{{"pn_mean", w.pn.mean}, {"pn_sem", w.pn.sem}, {"rhs", w.rhs}, {"pass", w.pass}};
  write_manifest(ctx, "wat", run_kv, results, {"wat.csv"});
  return w.pass ? 0 : 2;
}

// ------------------------------------------------------------------------ fkg
int run_fkg(Ctx& ctx, double beta, int n, int m, const std::vector<double>& ts,
            const std::vector<double>& us) {
  require_seed(ctx);
  const bool assert_lemma = lambda_second(ctx.model, 0.0) < 1.0;
  if (!assert_lemma)
    std::cerr << "warning: environment variance >= 1, derivative-gap lemma not asserted\n";
  CsvWriter csv(join_path(ctx.out, "fkg.csv"));
  csv.header({"t", "u", "beta", "n", "m", "seed", "gap_mean", "gap_sem", "margin",
              "lemma_asserted", "pass"});
  Ensemble ens{n, m, ctx.seed, ctx.workers};
  bool ok = true;
  for (double t : ts)
    for (double u : us) {
      const McEstimate g = fkg_gap(ens, {t, u, beta}, ctx.model);
      const double margin = 3.0 * g.sem;
      const bool pass = g.mean >= -margin;
      if (assert_lemma) ok = ok && pass;
      csv.row({g17(t), g17(u), g17(beta), std::to_string(n), std::to_string(m),
               std::to_string(ctx.seed), g17(g.mean), g17(g.sem), g17(margin), flag(assert_lemma),
               flag(pass)});
    }
  csv.close();
  ConfigSection run_kv{{"beta", g17(beta)},      {"n", std::to_string(n)},
                       {"m", std::to_string(m)}, {"seed", std::to_string(ctx.seed)},
                       {"t_grid", fmt_list(ts)}, {"u_grid", fmt_list(us)}};
  json results{{"lemma_asserted", assert_lemma}, {"pass", ok}};
  write_manifest(ctx, "fkg", run_kv, results, {"fkg.csv"});
  return ok ? 0 : 2;
}

// ----------------------------------------------------------------------- path
int run_path(Ctx& ctx, double beta, int n, int m, const std::vector<double>& ts) {
  require_seed(ctx);
  CsvWriter csv(join_path(ctx.out, "path.csv"));
  csv.header({"t", "beta", "n", "m", "seed", "phi_mean", "phi_sem", "pinning_ref", "diff",
              "margin", "pass"});
  Ensemble ens{n, m, ctx.seed, ctx.workers};
  bool ok = true;
  for (double t : ts) {
    const PathCheckReport r = path_check(ens, t, beta, ctx.model);
    ok = ok && r.pass;
    csv.row({g17(t), g17(beta), std::to_string(n), std::to_string(m), std::to_string(ctx.seed),
             g17(r.phi_mean.mean), g17(r.phi_mean.sem), g17(r.pinning_ref), g17(r.diff),
             g17(r.margin), flag(r.pass)});
  }
  csv.close();
  ConfigSection run_kv{{"beta", g17(beta)},
                       {"n", std::to_string(n)},
                       {"m", std::to_string(m)},
                       {"seed", std::to_string(ctx.seed)},
                       {"t_grid", fmt_list(ts)}};
  write_manifest(ctx, "path", run_kv, json{{"pass", ok}}, {"path.csv"});
  return ok ? 0 : 2;
}

// -------------------------------------------------------------------- pinning
int run_pinning(Ctx& ctx, double t, int n_max) {
  const PinningEstimate est = pinning_free_energy(t, n_max);
  const std::vector<double> curve = log_pinning_curve(n_max, t);
  CsvWriter csv(join_path(ctx.out, "pinning.csv"));
  csv.header({"n", "log_pinning", "rate", "rate_refined", "f_hat", "rate_exact", "low_n_warning"});
  for (int nn = std::max(4, n_max / 16); nn <= n_max; nn *= 2) {
    const double rate = curve[static_cast<std::size_t>(nn) - 1] / nn;
    const int half = nn / 2;
    const double refined =
        (curve[static_cast<std::size_t>(nn) - 1] - curve[static_cast<std::size_t>(half) - 1]) /
        (nn - half);
    csv.row({std::to_string(nn), g17(curve[static_cast<std::size_t>(nn) - 1]), g17(rate),
             g17(refined), g17(0.5 * refined), g17(pinning_rate_exact(t)),
             flag(nn * t * t < 50.0)});
  }
  csv.close();
  ConfigSection run_kv{{"t", g17(t)}, {"n_max", std::to_string(n_max)}};
  json results{{"rate_nmax", est.rate_nmax},
               {"rate_refined", est.rate_refined},
               {"f_hat", est.f_hat},
               {"rate_exact", pinning_rate_exact(t)},
               {"low_n_warning", est.low_n_warning}};
  write_manifest(ctx, "pinning", run_kv, results, {"pinning.csv"});
  if (est.low_n_warning)
    std::cerr << "warning: n_max * t^2 < 50, correlation length close to n_max\n";
  std::cout << "pinning: f_hat " << g17(est.f_hat) << " (exact " << g17(0.5 * pinning_rate_exact(t))
            << ")\n";
  return 0;
}

// ------------------------------------------------------------------------ ibp
int run_ibp(Ctx& ctx, std::vector<double> s_grid) {
  if (s_grid.empty()) {
    const double b = ctx.model.mgf_bound;
    s_grid = {0.0, b / 8.0, b / 4.0, b / 2.0};
  }
  CsvWriter csv(join_path(ctx.out, "ibp.csv"));
  csv.header({"model", "s", "residual", "tol", "pass"});
  bool ok = true;
  const double tol = 1e-6;
  for (double s : s_grid) {
    const double r = ibp_residual(ctx.model, s);
    const bool pass = r <= tol;
    ok = ok && pass;
    csv.row({ctx.model.name(), g17(s), g17(r), g17(tol), flag(pass)});
  }
  csv.close();
  ConfigSection run_kv{{"s_grid", fmt_list(s_grid)}};
  write_manifest(ctx, "ibp", run_kv, json{{"pass", ok}}, {"ibp.csv"});
  return ok ? 0 : 2;
}

// -------------------------------------------------------------- concentration
int run_concentration(Ctx& ctx, double beta, int n, int m) {
  require_seed(ctx);
  const TailReport rep = concentration_tails(ctx.model, beta, n, m, ctx.seed, ctx.workers);
  CsvWriter csv(join_path(ctx.out, "concentration.csv"));
  csv.header({"x", "upper_freq", "lower_freq", "bound"});
  for (std::size_t j = 0; j < rep.xs.size(); ++j) {
    const double bound =
        rep.k_hat > 0.0 ? std::exp(-n * rep.xs[j] * rep.xs[j] / (4.0 * rep.k_hat)) : 1.0;
    csv.row({g17(rep.xs[j]), g17(rep.upper[j]), g17(rep.lower[j]), g17(bound)});
  }
  csv.close();
  ConfigSection run_kv{{"beta", g17(beta)},
                       {"n", std::to_string(n)},
                       {"m", std::to_string(m)},
                       {"seed", std::to_string(ctx.seed)}};
  json results{{"mean_rate", rep.mean_rate}, {"nvar", rep.nvar}, {"k_hat", rep.k_hat}};
  write_manifest(ctx, "concentration", run_kv, results, {"concentration.csv"});
  std::cout << "concentration: n*Var " << g17(rep.nvar) << " K_hat " << g17(rep.k_hat) << "\n";
  return 0;
}

// ---------------------------------------------------------------- gaussian-eq
int run_gaussian_eq(Ctx& ctx, double beta, int n, int m, double h) {
  require_seed(ctx);
  const GaussianEqReport r =
      gaussian_equality_check(ctx.model, beta, n, m, ctx.seed, ctx.workers, h);
  CsvWriter csv(join_path(ctx.out, "gaussian_eq.csv"));
  csv.header({"model", "beta", "h", "n", "m", "seed", "fd_mean", "fd_sem", "rhs_mean", "rhs_sem",
              "paired_mean", "paired_sem", "c_used", "equality", "pass"});
  csv.row({r.model, g17(beta), g17(h), std::to_string(n), std::to_string(m),
           std::to_string(ctx.seed), g17(r.fd.mean), g17(r.fd.sem), g17(r.rhs.mean),
           g17(r.rhs.sem), g17(r.paired.mean), g17(r.paired.sem), g17(r.c_used), flag(r.equality),
           flag(r.pass)});
  csv.close();
  ConfigSection run_kv{{"beta", g17(beta)},
                       {"h", g17(h)},
                       {"n", std::to_string(n)},
                       {"m", std::to_string(m)},
                       {"seed", std::to_string(ctx.seed)}};
  json results{{"paired_mean", r.paired.mean},
               {"paired_sem", r.paired.sem},
               {"equality", r.equality},
               {"pass", r.pass}};
  write_manifest(ctx, "gaussian_eq", run_kv, results, {"gaussian_eq.csv"});
  return r.pass ? 0 : 2;
}

// ------------------------------------------------------------------- selftest
int run_selftest(Ctx& ctx) {
  struct Check {
    std::string name;
    int instances;
    double worst;
    double tol;
  };
  std::vector<Check> checks;
  const auto gm = EnvModel::gaussian(1.0);
  const auto pm = EnvModel::centered_poisson(1.0);

  {  // single-path DP vs brute force
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const int n = 2 + k % 9;
      const EnvField f = sample_field(k % 2 ? gm : pm, n, ctx.seed + k);
      const double beta = 0.3 * (k % 4);
      worst =
          std::max(worst, std::abs(log_partition(f, beta) - brute_force_log_partition(f, beta)));
    }
    checks.push_back({"log_partition_vs_brute_force", 200, worst, 1e-10});
  }
  {  // two-replica DP vs brute force
    const auto m25 = EnvModel::gaussian(0.25);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const int n = 2 + k % 5;
      const EnvField f = sample_field(m25, n, ctx.seed + 1000 + k);
      const InterpolationPoint pt{(k % 5) / 4.0, 0.5 * (k % 3), 0.3 + 0.1 * (k % 4)};
      worst = std::max(worst, std::abs(phi(f, pt, m25) - brute_force_phi(f, pt, m25)));
    }
    checks.push_back({"phi_vs_brute_force", 200, worst, 1e-10});
  }
  {  // pinning DP vs brute force
    double worst = 0.0;
    int count = 0;
    for (int n = 1; n <= 8; ++n)
      for (double t : {0.0, 0.3, std::log(2.0), 1.5}) {
        worst = std::max(worst, std::abs(log_pinning(n, t) - brute_force_pinning(n, t)));
        ++count;
      }
    checks.push_back({"log_pinning_vs_brute_force", count, worst, 1e-10});
  }
  {  // cross-module identities
    const auto m25 = EnvModel::gaussian(0.25);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const EnvField f = sample_field(m25, 12, ctx.seed + 2000 + k);
      const double beta = 0.3 + 0.05 * k;
      worst = std::max(worst, std::abs(phi(f, {1.0, 0.0, beta}, m25) - log_w(f, beta, m25) / f.n));
      worst = std::max(worst, std::abs(phi(f, {0.0, 2.0, beta}, m25) - f_n(beta, f.n)));
      const double du = dphi_du(FieldView(f), {0.5, 0.0, beta}, m25);
      const double rhs =
          beta * beta / (2.0 * f.n) * overlap_expectation(f, std::sqrt(0.5) * beta);
      worst = std::max(worst, std::abs(du - rhs));
    }
    checks.push_back({"cross_module_identities", 30, worst, 1e-10});
  }

  CsvWriter csv(join_path(ctx.out, "selftest.csv"));
  csv.header({"check", "instances", "worst_abs_err", "tol", "pass"});
  bool ok = true;
  for (const auto& c : checks) {
    const bool pass = c.worst <= c.tol;
    ok = ok && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << c.name << " worst " << g17(c.worst) << "\n";
    csv.row({c.name, std::to_string(c.instances), g17(c.worst), g17(c.tol), flag(pass)});
  }
  csv.close();
  ConfigSection run_kv{{"seed", std::to_string(ctx.seed)}};
  write_manifest(ctx, "selftest", run_kv, json{{"pass", ok}}, {"selftest.csv"});
  return ok ? 0 : 2;
}

void add_model_flags(CLI::App* sub, ConfigSection& kv) {
  auto bind = [sub, &kv](const std::string& flag_name, const std::string& key,
                         const std::string& help) {
    sub->add_option_function<std::string>(
        flag_name, [&kv, key](const std::string& v) { kv[key] = v; }, help);
  };
  bind("--model", "family",
       "environment family: gaussian | centered_poisson | centered_gamma | "
       "compound_poisson_two_atom");
  bind("--var", "variance", "gaussian variance");
  bind("--rate", "rate", "poisson / compound rate");
  bind("--shape", "shape", "gamma shape");
  bind("--scale", "scale", "gamma scale");
  bind("--a-plus", "a_plus", "compound positive atom");
  bind("--a-minus", "a_minus", "compound negative atom");
  bind("--p-plus", "p_plus", "compound probability of the positive atom");
  bind("--mgf-bound", "mgf_bound", "override the MGF domain bound B");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polymerlab: exact transfer-matrix and Monte Carlo checks for 1+1 dimensional "
               "directed polymers in random environment"};
  app.require_subcommand(1);

  // two-phase config handling: an early scan picks up --config so its values
  // become defaults, then the regular parse lets flags win
  std::string config_path;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  Config file_cfg;
  try {
    if (!config_path.empty()) file_cfg = parse_config_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  Ctx ctx;
  if (auto it = file_cfg.find("model"); it != file_cfg.end()) ctx.model_kv = it->second;
  ConfigSection run_cfg;
  if (auto it = file_cfg.find("run"); it != file_cfg.end()) run_cfg = it->second;

  auto run_default = [&run_cfg](const std::string& key, double fallback) {
    auto it = run_cfg.find(key);
    return it == run_cfg.end() ? fallback : std::stod(it->second);
  };
  if (auto it = run_cfg.find("seed"); it != run_cfg.end()) {
    ctx.seed = std::stoull(it->second);
    ctx.seed_given = true;
  } else if (const char* env = std::getenv("POLYMERLAB_SEED")) {
    ctx.seed = std::stoull(env);
    ctx.seed_given = true;
  }

  // shared numeric parameters (config defaults, flags override)
  double beta = run_default("beta", 0.3);
  std::string betas_str, t_grid_str, u_grid_str, s_grid_str;
  if (auto it = run_cfg.find("betas"); it != run_cfg.end()) betas_str = it->second;
  int n = static_cast<int>(run_default("n", 0));
  int m = static_cast<int>(run_default("m", 0));
  int n_max = static_cast<int>(run_default("n_max", 4000));
  double t = run_default("t", 0.4);
  double fd_step = run_default("h", 0.02);
  ctx.workers = static_cast<int>(run_default("workers", 0));
  if (auto it = run_cfg.find("out"); it != run_cfg.end()) ctx.out = it->second;

  app.add_option("--config", config_path, "config file ([model] and [run] sections)");
  app.add_option("--out", ctx.out, "output directory for CSV and manifest");
  app.add_option("--workers", ctx.workers, "worker cap for replicate parallelism (0 = all cores)");
  app.add_option_function<uint64_t>(
      "--seed",
      [&ctx](uint64_t s) {
        ctx.seed = s;
        ctx.seed_given = true;
      },
      "master seed (mandatory for stochastic commands; POLYMERLAB_SEED is the fallback)");

  auto* c_free = app.add_subcommand(
      "free-energy",
      "estimate p_n(beta); with a beta grid also runs the common-random-numbers "
      "monotonicity check. CSV: beta,n,m,seed,mean,sem,jensen_margin,"
      "diff_prev_mean,diff_prev_sem,monotone_ok");
  auto* c_scaling = app.add_subcommand(
      "scaling",
      "fit the small-beta exponent of -p_n on a beta grid, n(beta)=min(ceil(50/beta^4)"
      ",4096). CSV: beta,n,m,seed,mean,sem,included,note; slope in the manifest");
  auto* c_wat = app.add_subcommand(
      "wat",
      "replica lower bound: p_n >= (1-e^c) F_n(beta) within 3 sem. CSV: model,beta,n,m,"
      "seed,pn_mean,pn_sem,big_b,c,c_interface,fn,rhs,margin,pass");
  auto* c_fkg = app.add_subcommand(
      "fkg",
      "derivative gap E[d phi/du - d phi/dt] on a (t,u) grid, expected >= 0 for variance "
      "< 1. CSV: t,u,beta,n,m,seed,gap_mean,gap_sem,margin,lemma_asserted,pass");
  auto* c_path = app.add_subcommand(
      "path",
      "interpolation path check E[phi(t,2-t)] - phi(0,2) <= 0. CSV: t,beta,n,m,seed,"
      "phi_mean,phi_sem,pinning_ref,diff,margin,pass");
  auto* c_pinning = app.add_subcommand(
      "pinning",
      "exact pinning partition function and free-energy extrapolation. CSV: n,"
      "log_pinning,rate,rate_refined,f_hat,rate_exact,low_n_warning");
  auto* c_ibp = app.add_subcommand(
      "ibp",
      "integration-by-parts residual of the Levy-Khinchine triple. CSV: model,s,"
      "residual,tol,pass");
  auto* c_conc = app.add_subcommand(
      "concentration",
      "tails of (1/n)(ln Z - mean) with the fitted sub-Gaussian constant. "
      "CSV: x,upper_freq,lower_freq,bound");
  auto* c_geq = app.add_subcommand(
      "gaussian-eq",
      "finite-difference p_n'(beta) against -(c beta/n) <overlap>; equality for "
      "gaussian, one-sided bound otherwise. CSV: model,beta,h,n,m,seed,fd_mean,"
      "fd_sem,rhs_mean,rhs_sem,paired_mean,paired_sem,c_used,equality,pass");
  auto* c_self = app.add_subcommand(
      "selftest",
      "oracle-equivalence suites on small instances. CSV: check,instances,"
      "worst_abs_err,tol,pass");

  for (auto* sub : {c_free, c_scaling, c_wat, c_fkg, c_path, c_pinning, c_ibp, c_conc, c_geq,
                    c_self})
    sub->fallthrough();  // global flags (--out, --seed, ...) work after the subcommand
  for (auto* sub : {c_free, c_scaling, c_wat, c_fkg, c_path, c_ibp, c_conc, c_geq})
    add_model_flags(sub, ctx.model_kv);

  c_free->add_option("--beta", beta, "single beta");
  c_free->add_option("--betas", betas_str, "comma-separated beta grid (enables CRN monotonicity)");
  c_free->add_option("--n", n, "polymer length (default 64)");
  c_free->add_option("--m", m, "replicates (default 400)");

  c_scaling->add_option("--betas", betas_str, "beta grid (default 0.6,0.8,1.0,1.2)");
  c_scaling->add_option("--m", m, "replicates per point (default 400)");

  c_wat->add_option("--beta", beta, "beta (default 0.3)");
  c_wat->add_option("--n", n, "polymer length (default 50)");
  c_wat->add_option("--m", m, "replicates (default 1000)");

  c_fkg->add_option("--beta", beta, "beta (default 0.3)");
  c_fkg->add_option("--n", n, "polymer length (default 16)");
  c_fkg->add_option("--m", m, "replicates per grid point (default 2000)");
  c_fkg->add_option("--t-grid", t_grid_str, "t grid (default 0.1,0.5,1)");
  c_fkg->add_option("--u-grid", u_grid_str, "u grid (default 0,1,2)");

  c_path->add_option("--beta", beta, "beta (default 0.3)");
  c_path->add_option("--n", n, "polymer length (default 16)");
  c_path->add_option("--m", m, "replicates per t (default 2000)");
  c_path->add_option("--t-grid", t_grid_str, "t grid (default 0,0.25,0.5,0.75,1)");

  c_pinning->add_option("--t", t, "pinning parameter (default 0.4)");
  c_pinning->add_option("--n-max", n_max, "largest chain length (default 4000)");

  c_ibp->add_option("--s-grid", s_grid_str, "s grid (default 0,B/8,B/4,B/2)");

  c_conc->add_option("--beta", beta, "beta (default 0.5)");
  c_conc->add_option("--n", n, "polymer length (default 32)");
  c_conc->add_option("--m", m, "replicates (default 2000)");

  c_geq->add_option("--beta", beta, "beta (default 0.4)");
  c_geq->add_option("--n", n, "polymer length (default 32)");
  c_geq->add_option("--m", m, "replicates (default 2000)");
  c_geq->add_option("--fd-step", fd_step, "finite-difference step (default 0.02)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::filesystem::create_directories(ctx.out);
    if (ctx.model_kv.find("family") == ctx.model_kv.end()) ctx.model_kv["family"] = "gaussian";
    ctx.model = parse_model(ctx.model_kv);
    auto grid_or = [](const std::string& s, std::vector<double> fallback) {
      return s.empty() ? fallback : parse_double_list(s);
    };
    if (c_free->parsed()) {
      const std::vector<double> betas =
          betas_str.empty() ? std::vector<double>{beta} : parse_double_list(betas_str);
      return run_free_energy(ctx, betas, n > 0 ? n : 64, m > 0 ? m : 400);
    }
    if (c_scaling->parsed())
      return run_scaling(ctx, grid_or(betas_str, {0.6, 0.8, 1.0, 1.2}), m > 0 ? m : 400);
    if (c_wat->parsed()) return run_wat(ctx, beta, n > 0 ? n : 50, m > 0 ? m : 1000);
    if (c_fkg->parsed())
      return run_fkg(ctx, beta, n > 0 ? n : 16, m > 0 ? m : 2000,
                     grid_or(t_grid_str, {0.1, 0.5, 1.0}), grid_or(u_grid_str, {0.0, 1.0, 2.0}));
    if (c_path->parsed())
      return run_path(ctx, beta, n > 0 ? n : 16, m > 0 ? m : 2000,
                      grid_or(t_grid_str, {0.0, 0.25, 0.5, 0.75, 1.0}));
    if (c_pinning->parsed()) return run_pinning(ctx, t, n_max);
    if (c_ibp->parsed())
      return run_ibp(ctx,
                     s_grid_str.empty() ? std::vector<double>{} : parse_double_list(s_grid_str));
    if (c_conc->parsed()) return run_concentration(ctx, beta, n > 0 ? n : 32, m > 0 ? m : 2000);
    if (c_geq->parsed())
      return run_gaussian_eq(ctx, beta, n > 0 ? n : 32, m > 0 ? m : 2000, fd_step);
    if (c_self->parsed()) return run_selftest(ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
