// mixconc command-line front end. Talks to the library only through mixconc.h.
//
// Exit codes: 0 success, 1 verification failure, 2 input error.

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mixconc/mixconc.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInput = 2;

struct RunConfig {
  std::string command;
  std::string spec_path;
  std::size_t n = 1000;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  std::vector<double> epsilon_grid{0.02, 0.05, 0.1, 0.2};
  std::size_t horizon = 64;
  std::string format = "text";
  bool nonstationary = false;
  std::string statistic = "sup";
  unsigned workers = 1;
  std::size_t instances = 200;
  std::size_t max_states = 4;
  std::size_t limit = 5;
  std::size_t audit_pairs = 10000;
};

// Carries a library status out of a command; main turns it into exit code 2.
struct ApiFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(mixconc_status s) {
  if (s != MIXCONC_OK) throw ApiFailure(std::string(mixconc_status_name(s)) + ": " + mixconc_last_error());
}

struct ChainDeleter {
  void operator()(mixconc_chain* c) const { mixconc_chain_free(c); }
};
struct ReportDeleter {
  void operator()(mixconc_report* r) const { mixconc_report_free(r); }
};
struct LemmaDeleter {
  void operator()(mixconc_lemma_report* r) const { mixconc_lemma_report_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { mixconc_string_free(s); }
};

using Chain = std::unique_ptr<mixconc_chain, ChainDeleter>;

Chain load(const RunConfig& cfg) {
  if (cfg.spec_path.empty()) throw ApiFailure("--spec is required for '" + cfg.command + "'");
  mixconc_chain* raw = nullptr;
  check(mixconc_chain_load_file(cfg.spec_path.c_str(), &raw));
  return Chain(raw);
}

void require_ergodic(const mixconc_chain* chain) {
  if (!mixconc_chain_is_ergodic(chain))
    throw ApiFailure(
        "not ergodic: the transition kernel is not irreducible and aperiodic, so no stationary law is "
        "approached and no (G, theta) exists");
}

mixconc_format format_of(const std::string& f) {
  if (f == "csv") return MIXCONC_FORMAT_CSV;
  if (f == "structured") return MIXCONC_FORMAT_STRUCTURED;
  return MIXCONC_FORMAT_TEXT;
}

mixconc_statistic statistic_of(const std::string& s) {
  if (s == "tv") return MIXCONC_STAT_TOTAL_VARIATION;
  if (s == "lip") return MIXCONC_STAT_CUSTOM_LIPSCHITZ;
  return MIXCONC_STAT_SUP_NORM;
}

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<double> vec(const mixconc_chain* chain, bool observation) {
  const std::size_t len = observation ? mixconc_chain_symbols(chain) : mixconc_chain_states(chain);
  std::vector<double> out(len);
  check(observation ? mixconc_chain_observation_stationary(chain, out.data(), len)
                    : mixconc_chain_stationary(chain, out.data(), len));
  return out;
}

// ---- mixing ---------------------------------------------------------------

int cmd_mixing(const RunConfig& cfg) {
  Chain chain = load(cfg);
  require_ergodic(chain.get());
  double kappa = 0.0;
  check(mixconc_contraction_coefficient(chain.get(), &kappa));
  mixconc_ergodicity erg{};
  std::vector<double> tau(cfg.horizon);
  check(mixconc_fit_ergodicity(chain.get(), cfg.horizon, &erg, tau.data()));
  double inf_norm = 0.0;
  double two_norm = 0.0;
  check(mixconc_delta_norms(erg.G, erg.theta, cfg.n, &inf_norm, &two_norm));

  if (cfg.format == "structured") {
    json doc{{"spec_id", mixconc_chain_name(chain.get())},
             {"kappa", kappa},
             {"horizon", erg.horizon},
             {"tau", tau},
             {"G", erg.G},
             {"theta", erg.theta},
             {"horizon_too_short", erg.horizon_too_short != 0},
             {"n", cfg.n},
             {"delta_inf_norm", inf_norm},
             {"delta_2_norm", two_norm}};
    std::printf("%s\n", doc.dump(2).c_str());
  } else if (cfg.format == "csv") {
    std::printf("quantity,s,value\n");
    std::printf("kappa,,%s\n", exact(kappa).c_str());
    for (std::size_t s = 0; s < tau.size(); ++s) std::printf("tau,%zu,%s\n", s + 1, exact(tau[s]).c_str());
    std::printf("G,,%s\ntheta,,%s\nhorizon_too_short,,%d\n", exact(erg.G).c_str(), exact(erg.theta).c_str(),
                erg.horizon_too_short);
    std::printf("delta_inf_norm,%zu,%s\ndelta_2_norm,%zu,%s\n", cfg.n, exact(inf_norm).c_str(), cfg.n,
                exact(two_norm).c_str());
  } else {
    std::printf("mixing analysis: %s\n", mixconc_chain_name(chain.get()));
    std::printf("  kappa (contraction)   %s\n", fixed(kappa, 10).c_str());
    std::printf("  G                     %s\n", fixed(erg.G, 10).c_str());
    std::printf("  theta                 %s\n", fixed(erg.theta, 10).c_str());
    if (erg.horizon_too_short)
      std::printf("  warning: tau_%zu is not below tau_1 / 2; the horizon is too short for a trustworthy fit\n",
                  erg.horizon);
    std::printf("  ||Delta||_inf (n=%zu)  %s\n", cfg.n, fixed(inf_norm, 6).c_str());
    std::printf("  ||Delta||_2   (n=%zu)  %s\n", cfg.n, fixed(two_norm, 6).c_str());
    std::printf("  inverse mixing times:\n");
    for (std::size_t s = 0; s < tau.size(); ++s) std::printf("    tau_%-4zu %.10e\n", s + 1, tau[s]);
  }
  return kExitOk;
}

// ---- bounds ---------------------------------------------------------------

struct BoundsRow {
  double epsilon;
  mixconc_bound lipschitz_tail;
  double dkw_threshold;
  mixconc_bound dkw_tail;
  mixconc_lambda lambda;
  double chernoff_threshold;
  mixconc_bound chernoff_tail;
};

int cmd_bounds(const RunConfig& cfg) {
  Chain chain = load(cfg);
  require_ergodic(chain.get());
  mixconc_ergodicity erg{};
  check(mixconc_fit_ergodicity(chain.get(), cfg.horizon, &erg, nullptr));
  const std::vector<double> rho = vec(chain.get(), true);

  double correction = 0.0;
  if (cfg.nonstationary) {
    const std::vector<double> pi = vec(chain.get(), false);
    std::vector<double> initial(pi.size());
    check(mixconc_chain_initial(chain.get(), initial.data(), initial.size()));
    check(mixconc_nonstationary_correction(pi.data(), initial.data(), pi.size(), &correction));
  }

  std::vector<BoundsRow> rows;
  for (double eps : cfg.epsilon_grid) {
    BoundsRow r{};
    r.epsilon = eps;
    check(mixconc_hmm_concentration_bound(erg.G, erg.theta, cfg.n, eps, 1.0, 0, &r.lipschitz_tail));
    check(mixconc_dkw_bound(erg.G, erg.theta, cfg.n, eps, &r.dkw_threshold, &r.dkw_tail));
    check(mixconc_lambda_n(rho.data(), rho.size(), erg.G, erg.theta, cfg.n, &r.lambda));
    check(mixconc_uniform_chernoff_bound(rho.data(), rho.size(), erg.G, erg.theta, cfg.n, eps, &r.chernoff_threshold,
                                         &r.chernoff_tail));
    rows.push_back(r);
  }

  if (cfg.format == "structured") {
    json out = json::array();
    for (const auto& r : rows)
      out.push_back({{"epsilon", r.epsilon},
                     {"lipschitz_tail", r.lipschitz_tail.capped},
                     {"lipschitz_tail_raw", r.lipschitz_tail.raw},
                     {"dkw_threshold", r.dkw_threshold},
                     {"dkw_tail", r.dkw_tail.capped},
                     {"gamma_n", r.lambda.gamma_n},
                     {"lambda_heavy_sqrt_sum", r.lambda.heavy_sqrt_sum},
                     {"lambda_heavy_term", r.lambda.heavy_term},
                     {"lambda_light_sqrt_sum", r.lambda.light_sqrt_sum},
                     {"lambda_light_mass_sum", r.lambda.light_mass_sum},
                     {"lambda_light_term", r.lambda.light_term},
                     {"lambda", r.lambda.lambda},
                     {"chernoff_threshold", r.chernoff_threshold},
                     {"chernoff_tail", r.chernoff_tail.capped}});
    json doc{{"spec_id", mixconc_chain_name(chain.get())},
             {"n", cfg.n},
             {"G", erg.G},
             {"theta", erg.theta},
             {"stationary", !cfg.nonstationary},
             {"correction", correction},
             {"rows", std::move(out)}};
    std::printf("%s\n", doc.dump(2).c_str());
  } else if (cfg.format == "csv") {
    std::printf(
        "epsilon,lipschitz_tail,dkw_threshold,dkw_tail,gamma_n,lambda_heavy_sqrt_sum,lambda_heavy_term,"
        "lambda_light_sqrt_sum,lambda_light_mass_sum,lambda_light_term,lambda,chernoff_threshold,chernoff_tail,"
        "correction\n");
    for (const auto& r : rows)
      std::printf("%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s\n", exact(r.epsilon).c_str(),
                  exact(r.lipschitz_tail.capped).c_str(), exact(r.dkw_threshold).c_str(), exact(r.dkw_tail.capped).c_str(),
                  exact(r.lambda.gamma_n).c_str(), exact(r.lambda.heavy_sqrt_sum).c_str(),
                  exact(r.lambda.heavy_term).c_str(), exact(r.lambda.light_sqrt_sum).c_str(),
                  exact(r.lambda.light_mass_sum).c_str(), exact(r.lambda.light_term).c_str(),
                  exact(r.lambda.lambda).c_str(), exact(r.chernoff_threshold).c_str(),
                  exact(r.chernoff_tail.capped).c_str(), exact(correction).c_str());
  } else {
    std::printf("bounds: %s  n = %zu  G = %s  theta = %s\n", mixconc_chain_name(chain.get()), cfg.n,
                fixed(erg.G).c_str(), fixed(erg.theta).c_str());
    if (!rows.empty()) {
      const auto& l = rows.front().lambda;
      std::printf("  gamma_n %s   Lambda_n %s = min(heavy %s, light %s)\n", fixed(l.gamma_n).c_str(),
                  fixed(l.lambda).c_str(), fixed(l.heavy_term).c_str(), fixed(l.light_term).c_str());
    }
    if (cfg.nonstationary)
      std::printf("  nonstationary start: add TV(pi, initial) = %s to every tail\n", fixed(correction).c_str());
    std::printf("  epsilon   thm1 tail   dkw thr    dkw tail    chern thr  chern tail\n");
    for (const auto& r : rows)
      std::printf("  %-8s  %-10s  %-9s  %-10s  %-9s  %-10s\n", fixed(r.epsilon, 4).c_str(),
                  fixed(r.lipschitz_tail.capped).c_str(), fixed(r.dkw_threshold).c_str(), fixed(r.dkw_tail.capped).c_str(),
                  fixed(r.chernoff_threshold).c_str(), fixed(r.chernoff_tail.capped).c_str());
  }
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg) {
  Chain chain = load(cfg);
  require_ergodic(chain.get());
  if (cfg.epsilon_grid.empty()) throw ApiFailure("--eps must list at least one value");
  mixconc_experiment_config ec{};
  ec.n = cfg.n;
  ec.trials = cfg.trials;
  ec.seed = cfg.seed;
  ec.horizon = cfg.horizon;
  ec.workers = cfg.workers;
  ec.stationary = cfg.nonstationary ? 0 : 1;
  ec.statistic = statistic_of(cfg.statistic);

  mixconc_report* raw = nullptr;
  check(mixconc_deviation_experiment(chain.get(), &ec, cfg.epsilon_grid.data(), cfg.epsilon_grid.size(), &raw));
  std::unique_ptr<mixconc_report, ReportDeleter> report(raw);

  char* text = nullptr;
  check(mixconc_report_serialize(report.get(), format_of(cfg.format), &text));
  std::unique_ptr<char, StringDeleter> owned(text);
  std::fputs(text, stdout);

  if (cfg.format == "text" && ec.statistic != MIXCONC_STAT_CUSTOM_LIPSCHITZ) {
    mixconc_expectation e{};
    check(mixconc_expectation_experiment(chain.get(), &ec, &e));
    std::printf("expectation of the statistic: %s +/- %s (3 s.e.), bound %s\n", fixed(e.estimate).c_str(),
                fixed(e.halfwidth).c_str(), fixed(e.bound).c_str());
  }

  mixconc_report_info info{};
  check(mixconc_report_info_get(report.get(), &info));
  return info.all_satisfied ? kExitOk : kExitFailed;
}

// ---- verify ---------------------------------------------------------------

// Checks eta-bar_ij <= 2 tau_(j-i+1) <= 2 G theta^(j-i) on the given spec by enumeration.
json verify_spec(const RunConfig& cfg, bool& ok) {
  Chain chain = load(cfg);
  require_ergodic(chain.get());
  mixconc_ergodicity erg{};
  check(mixconc_fit_ergodicity(chain.get(), cfg.horizon, &erg, nullptr));
  const std::size_t n = cfg.limit;
  double worst = -INFINITY;
  std::size_t checks = 0;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) {
      double eta = 0.0;
      double tau = 0.0;
      check(mixconc_eta_bar_exact(chain.get(), n, i, j, &eta));
      check(mixconc_inverse_mixing_time(chain.get(), j - i + 1, &tau));
      const double geo = 2.0 * erg.G * std::pow(erg.theta, static_cast<double>(j - i));
      worst = std::max({worst, eta - 2.0 * tau, 2.0 * tau - geo});
      checks += 2;
    }
  const bool passed = checks == 0 || worst <= 1e-10;
  ok = ok && passed;
  return {{"spec_id", mixconc_chain_name(chain.get())},
          {"n", n},
          {"checks", checks},
          {"worst_gap", checks ? worst : 0.0},
          {"passed", passed}};
}

int cmd_verify(const RunConfig& cfg) {
  mixconc_verify_config vc{cfg.seed, cfg.instances, cfg.max_states, cfg.limit, cfg.horizon};
  mixconc_lemma_report* raw = nullptr;
  check(mixconc_verify(&vc, &raw));
  std::unique_ptr<mixconc_lemma_report, LemmaDeleter> report(raw);
  bool ok = mixconc_lemma_report_all_passed(report.get()) != 0;

  // Lipschitz audit of g = n * sup-norm and h = 2n * TV on a uniform 5-letter law, n = 50.
  const std::vector<double> rho(5, 0.2);
  double g_ratio = 0.0;
  double h_ratio = 0.0;
  int within = 0;
  check(mixconc_lipschitz_audit(rho.data(), rho.size(), 50, cfg.audit_pairs, cfg.seed, &g_ratio, &h_ratio, &within));
  const bool audit_ok = within != 0;
  ok = ok && audit_ok;

  json spec_result;
  if (!cfg.spec_path.empty()) spec_result = verify_spec(cfg, ok);

  char* text = nullptr;
  check(mixconc_lemma_report_serialize(report.get(), format_of(cfg.format), &text));
  std::unique_ptr<char, StringDeleter> owned(text);

  if (cfg.format == "structured") {
    json doc = json::parse(text);
    doc["lipschitz_audit"] = {{"k", 5}, {"n", 50}, {"pairs", cfg.audit_pairs}, {"max_g_ratio", g_ratio},
                              {"max_h_ratio", h_ratio}, {"passed", audit_ok}};
    if (!spec_result.is_null()) doc["spec_check"] = spec_result;
    doc["all_passed"] = ok;
    std::printf("%s\n", doc.dump(2).c_str());
  } else if (cfg.format == "csv") {
    std::fputs(text, stdout);
    std::printf("lipschitz_audit,inequality,0,%zu,%s,%d,\n", cfg.audit_pairs,
                exact(std::max(g_ratio - 1.0, h_ratio - 2.0)).c_str(), audit_ok ? 1 : 0);
    if (!spec_result.is_null())
      std::printf("spec_eta_chain,inequality,1e-10,%zu,%s,%d,\n", spec_result["checks"].get<std::size_t>(),
                  exact(spec_result["worst_gap"].get<double>()).c_str(), spec_result["passed"].get<bool>() ? 1 : 0);
  } else {
    std::fputs(text, stdout);
    std::printf("  %-4s lipschitz audit: max |g(x)-g(y)|/d = %s (<= 1), max |h(x)-h(y)|/d = %s (<= 2)\n",
                audit_ok ? "PASS" : "FAIL", fixed(g_ratio, 6).c_str(), fixed(h_ratio, 6).c_str());
    if (!spec_result.is_null())
      std::printf("  %-4s eta-bar chain on %s (n = %zu): worst gap %+.3e over %zu checks\n",
                  spec_result["passed"].get<bool>() ? "PASS" : "FAIL", spec_result["spec_id"].get<std::string>().c_str(),
                  cfg.limit, spec_result["worst_gap"].get<double>(), spec_result["checks"].get<std::size_t>());
    std::printf("%s\n", ok ? "verification passed" : "VERIFICATION FAILED");
  }
  return ok ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Mixing coefficients, concentration bounds and their verification for finite Markov and hidden Markov "
               "chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mixconc_version());

  auto positive = CLI::PositiveNumber;
  auto add_common = [&](CLI::App* sub, bool spec_required) {
    auto* spec = sub->add_option("--spec", cfg.spec_path, "Chain spec file (JSON)");
    if (spec_required) spec->required();
    sub->add_option("--n", cfg.n, "Trajectory length")->capture_default_str()->check(positive);
    sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    sub->add_option("--horizon", cfg.horizon, "Horizon for the tau table and (G, theta) fit")
        ->capture_default_str()
        ->check(positive);
    sub->add_option("--format", cfg.format, "Output format")
        ->capture_default_str()
        ->check(CLI::IsMember({"text", "csv", "structured"}));
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--eps", cfg.epsilon_grid, "Comma-separated epsilon grid")
        ->delimiter(',')
        ->capture_default_str()
        ->check(positive);
    sub->add_flag("--nonstationary", cfg.nonstationary, "Start from the spec's initial law instead of pi");
  };

  CLI::App* mixing = app.add_subcommand("mixing", "Contraction coefficient, tau table, (G, theta) and Delta norms");
  add_common(mixing, true);

  CLI::App* bounds = app.add_subcommand("bounds", "Concentration, DKW and uniform Chernoff bounds per epsilon");
  add_common(bounds, true);
  add_grid(bounds);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo check of the deviation bounds");
  add_common(simulate, true);
  add_grid(simulate);
  simulate->add_option("--trials", cfg.trials, "Monte Carlo trials")->capture_default_str()->check(positive);
  simulate->add_option("--statistic", cfg.statistic, "sup (sup-norm), tv (total variation) or lip (n times the sup-norm count deviation)")
      ->capture_default_str()
      ->check(CLI::IsMember({"sup", "tv", "lip"}));
  simulate->add_option("--workers", cfg.workers, "Worker threads")->capture_default_str()->check(positive);

  CLI::App* verify = app.add_subcommand("verify", "Exact lemma suite on random small instances and Lipschitz audit");
  add_common(verify, false);
  verify->add_option("--instances", cfg.instances, "Random instances")->capture_default_str()->check(positive);
  verify->add_option("--max-states", cfg.max_states, "Largest state / symbol count")
      ->capture_default_str()
      ->check(CLI::Range(2, 64));
  verify->add_option("--limit", cfg.limit, "Largest trajectory length enumerated")
      ->capture_default_str()
      ->check(CLI::Range(2, 64));
  verify->add_option("--pairs", cfg.audit_pairs, "Random pairs in the Lipschitz audit")
      ->capture_default_str()
      ->check(positive);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*mixing) return cfg.command = "mixing", cmd_mixing(cfg);
    if (*bounds) return cfg.command = "bounds", cmd_bounds(cfg);
    if (*simulate) return cfg.command = "simulate", cmd_simulate(cfg);
    if (*verify) return cfg.command = "verify", cmd_verify(cfg);
  } catch (const ApiFailure& e) {
    std::fprintf(stderr, "mixconc: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mixconc: %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
