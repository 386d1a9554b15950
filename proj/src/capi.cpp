#include "mixconc/mixconc.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "mixconc/bounds.hpp"
#include "mixconc/chain.hpp"
#include "mixconc/empirics.hpp"
#include "mixconc/error.hpp"
#include "mixconc/mixing.hpp"
#include "mixconc/report_io.hpp"
#include "mixconc/spec_file.hpp"

struct mixconc_chain {
  mixconc::ChainSpec spec;
};

struct mixconc_report {
  mixconc::DeviationReport report;
};

struct mixconc_lemma_report {
  mixconc::LemmaReport report;
};

namespace {

using namespace mixconc;

thread_local std::string last_error;

mixconc_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return MIXCONC_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch:
      return MIXCONC_ERR_DIMENSION;
    case ErrorCode::NotErgodic:
      return MIXCONC_ERR_NOT_ERGODIC;
    case ErrorCode::EnumerationLimit:
      return MIXCONC_ERR_ENUMERATION_LIMIT;
    case ErrorCode::NoConvergence:
      return MIXCONC_ERR_NO_CONVERGENCE;
    case ErrorCode::Parse:
      return MIXCONC_ERR_PARSE;
    case ErrorCode::Io:
      return MIXCONC_ERR_IO;
  }
  return MIXCONC_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
mixconc_status guarded(F&& body) {
  try {
    body();
    return MIXCONC_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return MIXCONC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MIXCONC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return MIXCONC_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

std::vector<double> copy(const double* data, std::size_t len) { return {data, data + len}; }

StochasticMatrix rows_to_kernel(const double* rows, std::size_t sources, std::size_t targets) {
  std::vector<std::vector<double>> r(sources);
  for (std::size_t x = 0; x < sources; ++x) r[x] = copy(rows + x * targets, targets);
  return StochasticMatrix::from_source_rows(r);
}

ErgodicityConstants constants(double G, double theta) { return ErgodicityConstants::from_values(G, theta); }

void write_out(const std::span<const double> src, double* out, std::size_t len) {
  need(out, "output buffer");
  require(len == src.size(), ErrorCode::DimensionMismatch,
          "output buffer has " + std::to_string(len) + " slots, expected " + std::to_string(src.size()));
  std::copy(src.begin(), src.end(), out);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

OutputFormat format_of(mixconc_format f) {
  switch (f) {
    case MIXCONC_FORMAT_TEXT:
      return OutputFormat::Text;
    case MIXCONC_FORMAT_CSV:
      return OutputFormat::Csv;
    case MIXCONC_FORMAT_STRUCTURED:
      return OutputFormat::Structured;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown output format");
}

Statistic statistic_of(mixconc_statistic s) {
  switch (s) {
    case MIXCONC_STAT_SUP_NORM:
      return Statistic::SupNorm;
    case MIXCONC_STAT_TOTAL_VARIATION:
      return Statistic::TotalVariation;
    case MIXCONC_STAT_CUSTOM_LIPSCHITZ:
      return Statistic::CustomLipschitz;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown statistic");
}

mixconc_statistic statistic_to_c(Statistic s) {
  switch (s) {
    case Statistic::SupNorm:
      return MIXCONC_STAT_SUP_NORM;
    case Statistic::TotalVariation:
      return MIXCONC_STAT_TOTAL_VARIATION;
    case Statistic::CustomLipschitz:
      return MIXCONC_STAT_CUSTOM_LIPSCHITZ;
  }
  return MIXCONC_STAT_SUP_NORM;
}

ExperimentOptions options_of(const mixconc_experiment_config& c) {
  ExperimentOptions o;
  o.horizon = c.horizon ? c.horizon : kDefaultHorizon;
  o.workers = c.workers ? c.workers : 1;
  o.stationary = c.stationary != 0;
  o.delta_mc = c.delta_mc > 0.0 ? c.delta_mc : 1e-3;
  return o;
}

mixconc_bound to_c(BoundValue b) { return {b.raw, b.capped}; }

}  // namespace

extern "C" {

const char* mixconc_last_error(void) { return last_error.c_str(); }

const char* mixconc_status_name(mixconc_status status) {
  switch (status) {
    case MIXCONC_OK:
      return "ok";
    case MIXCONC_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case MIXCONC_ERR_DIMENSION:
      return "dimension mismatch";
    case MIXCONC_ERR_NOT_ERGODIC:
      return "not ergodic";
    case MIXCONC_ERR_ENUMERATION_LIMIT:
      return "enumeration limit";
    case MIXCONC_ERR_NO_CONVERGENCE:
      return "no convergence";
    case MIXCONC_ERR_PARSE:
      return "parse error";
    case MIXCONC_ERR_IO:
      return "i/o error";
    case MIXCONC_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* mixconc_version(void) { return "1.0.0"; }

void mixconc_string_free(char* s) { std::free(s); }

// ---- chains ---------------------------------------------------------------

mixconc_status mixconc_chain_load_file(const char* path, mixconc_chain** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new mixconc_chain{load_chain_spec(path)};
  });
}

mixconc_status mixconc_chain_parse(const char* json_text, const char* name, mixconc_chain** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = new mixconc_chain{parse_chain_spec(json_text, name ? name : "")};
  });
}

mixconc_status mixconc_chain_create(size_t states, const double* initial, const double* transition_rows,
                                    size_t symbols, const double* emission_rows, mixconc_chain** out) {
  return guarded([&] {
    need(transition_rows, "transition_rows");
    need(out, "out");
    require(states > 0, ErrorCode::InvalidArgument, "states must be > 0");
    StochasticMatrix a = rows_to_kernel(transition_rows, states, states);
    std::optional<StochasticMatrix> b;
    if (emission_rows) {
      require(symbols > 0, ErrorCode::InvalidArgument, "symbols must be > 0 with an emission kernel");
      b = rows_to_kernel(emission_rows, states, symbols);
    }
    StochasticVector p1 = initial ? StochasticVector(copy(initial, states)) : stationary_distribution(a);
    *out = new mixconc_chain{ChainSpec(std::move(p1), std::move(a), std::move(b))};
  });
}

void mixconc_chain_free(mixconc_chain* chain) { delete chain; }

size_t mixconc_chain_states(const mixconc_chain* chain) { return chain ? chain->spec.state_count() : 0; }

size_t mixconc_chain_symbols(const mixconc_chain* chain) { return chain ? chain->spec.symbol_count() : 0; }

const char* mixconc_chain_name(const mixconc_chain* chain) { return chain ? chain->spec.name().c_str() : ""; }

int mixconc_chain_is_ergodic(const mixconc_chain* chain) {
  return chain && check_ergodic(chain->spec.transition()) ? 1 : 0;
}

mixconc_status mixconc_chain_initial(const mixconc_chain* chain, double* out, size_t len) {
  return guarded([&] {
    need(chain, "chain");
    write_out(chain->spec.initial().probs(), out, len);
  });
}

mixconc_status mixconc_chain_stationary(const mixconc_chain* chain, double* out, size_t len) {
  return guarded([&] {
    need(chain, "chain");
    write_out(stationary_distribution(chain->spec.transition()).probs(), out, len);
  });
}

mixconc_status mixconc_chain_observation_stationary(const mixconc_chain* chain, double* out, size_t len) {
  return guarded([&] {
    need(chain, "chain");
    write_out(observation_stationary(chain->spec).probs(), out, len);
  });
}

mixconc_status mixconc_sample_trajectory(const mixconc_chain* chain, size_t n, uint64_t seed,
                                         uint32_t* observations, uint32_t* hidden) {
  return guarded([&] {
    need(chain, "chain");
    need(observations, "observations");
    const Trajectory t = sample_trajectory(chain->spec, n, seed, hidden != nullptr);
    std::copy(t.observations.begin(), t.observations.end(), observations);
    if (hidden) std::copy(t.hidden.begin(), t.hidden.end(), hidden);
  });
}

// ---- mixing ---------------------------------------------------------------

mixconc_status mixconc_contraction_coefficient(const mixconc_chain* chain, double* out) {
  return guarded([&] {
    need(chain, "chain");
    need(out, "out");
    *out = contraction_coefficient(chain->spec.transition());
  });
}

mixconc_status mixconc_inverse_mixing_time(const mixconc_chain* chain, size_t s, double* out) {
  return guarded([&] {
    need(chain, "chain");
    need(out, "out");
    *out = inverse_mixing_time(chain->spec.transition(), s);
  });
}

mixconc_status mixconc_fit_ergodicity(const mixconc_chain* chain, size_t horizon, mixconc_ergodicity* out,
                                      double* tau_table) {
  return guarded([&] {
    need(chain, "chain");
    need(out, "out");
    const ErgodicityConstants c = fit_ergodicity(chain->spec.transition(), horizon);
    *out = {c.G, c.theta, c.horizon, c.horizon_too_short ? 1 : 0};
    if (tau_table) std::copy(c.tau_table.begin(), c.tau_table.end(), tau_table);
  });
}

mixconc_status mixconc_eta_bar_exact(const mixconc_chain* chain, size_t n, size_t i, size_t j, double* out) {
  return guarded([&] {
    need(chain, "chain");
    need(out, "out");
    *out = eta_bar_exact(chain->spec, n, i, j);
  });
}

mixconc_status mixconc_delta_norms(double G, double theta, size_t n, double* inf_norm, double* two_norm) {
  return guarded([&] {
    const DeltaMatrix d = delta_matrix(constants(G, theta), n);
    if (inf_norm) *inf_norm = delta_inf_norm(d);
    if (two_norm) *two_norm = delta_2_norm(d);
  });
}

// ---- bounds ---------------------------------------------------------------

mixconc_status mixconc_master_bound(double delta_inf, double delta_2, size_t n, double epsilon, mixconc_bound* out) {
  return guarded([&] {
    need(out, "out");
    *out = to_c(master_bound(delta_inf, delta_2, n, epsilon));
  });
}

mixconc_status mixconc_hmm_concentration_bound(double G, double theta, size_t n, double epsilon, double lipschitz,
                                               int two_tailed, mixconc_bound* out) {
  return guarded([&] {
    need(out, "out");
    const BoundQuery q{n, epsilon, constants(G, theta), lipschitz};
    *out = to_c(two_tailed ? hmm_concentration_bound_two_tailed(q) : hmm_concentration_bound(q));
  });
}

mixconc_status mixconc_gamma_n(double G, double theta, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = gamma_n(constants(G, theta), n);
  });
}

mixconc_status mixconc_dkw_bound(double G, double theta, size_t n, double epsilon, double* threshold,
                                 mixconc_bound* tail) {
  return guarded([&] {
    const ThresholdBound b = dkw_bound(constants(G, theta), n, epsilon);
    if (threshold) *threshold = b.threshold;
    if (tail) *tail = to_c(b.tail);
  });
}

mixconc_status mixconc_lambda_n(const double* rho, size_t len, double G, double theta, size_t n,
                                mixconc_lambda* out) {
  return guarded([&] {
    need(rho, "rho");
    need(out, "out");
    const LambdaBreakdown l = lambda_n(StochasticVector(copy(rho, len)), constants(G, theta), n);
    *out = {l.gamma_n, l.heavy_sqrt_sum, l.heavy_term, l.light_sqrt_sum, l.light_mass_sum, l.light_term, l.lambda};
  });
}

mixconc_status mixconc_uniform_chernoff_bound(const double* rho, size_t len, double G, double theta, size_t n,
                                              double epsilon, double* threshold, mixconc_bound* tail) {
  return guarded([&] {
    need(rho, "rho");
    const ThresholdBound b = uniform_chernoff_bound(StochasticVector(copy(rho, len)), constants(G, theta), n, epsilon);
    if (threshold) *threshold = b.threshold;
    if (tail) *tail = to_c(b.tail);
  });
}

mixconc_status mixconc_variance_bound(double rho_y, double G, double theta, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = variance_bound(rho_y, constants(G, theta), n);
  });
}

mixconc_status mixconc_expectation_sup_bound(double G, double theta, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = expectation_sup_bound(constants(G, theta), n);
  });
}

mixconc_status mixconc_empirical_mean_drift_bound(double G, double theta, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = empirical_mean_drift_bound(constants(G, theta), n);
  });
}

mixconc_status mixconc_nonstationary_correction(const double* pi, const double* pi_prime, size_t len, double* out) {
  return guarded([&] {
    need(pi, "pi");
    need(pi_prime, "pi_prime");
    need(out, "out");
    *out = nonstationary_correction(StochasticVector(copy(pi, len)), StochasticVector(copy(pi_prime, len)));
  });
}

mixconc_status mixconc_burn_in_steps(double G, double theta, double target, size_t* out) {
  return guarded([&] {
    need(out, "out");
    *out = burn_in_steps(constants(G, theta), target);
  });
}

// ---- experiments ----------------------------------------------------------

mixconc_status mixconc_deviation_experiment(const mixconc_chain* chain, const mixconc_experiment_config* config,
                                            const double* epsilon_grid, size_t grid_len, mixconc_report** out) {
  return guarded([&] {
    need(chain, "chain");
    need(config, "config");
    need(out, "out");
    require(grid_len > 0 && epsilon_grid, ErrorCode::InvalidArgument, "epsilon grid is empty");
    *out = new mixconc_report{deviation_experiment(chain->spec, config->n, config->trials, config->seed,
                                                   statistic_of(config->statistic), copy(epsilon_grid, grid_len),
                                                   options_of(*config))};
  });
}

void mixconc_report_free(mixconc_report* report) { delete report; }

mixconc_status mixconc_report_info_get(const mixconc_report* report, mixconc_report_info* out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    const DeviationReport& r = report->report;
    *out = {r.n,     r.trials,     r.seed,          statistic_to_c(r.statistic), r.delta_mc, r.stationary ? 1 : 0,
            r.G,     r.theta,      r.correction,    r.rows.size(),               r.all_satisfied() ? 1 : 0};
  });
}

mixconc_status mixconc_report_row_get(const mixconc_report* report, size_t index, mixconc_report_row* out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    require(index < report->report.rows.size(), ErrorCode::InvalidArgument, "row index out of range");
    const DeviationRow& r = report->report.rows[index];
    *out = {r.epsilon, r.threshold,  r.exceedances, r.empirical_frequency,
            r.mc_halfwidth, r.bound, r.bound_raw,   r.satisfied ? 1 : 0};
  });
}

mixconc_status mixconc_report_serialize(const mixconc_report* report, mixconc_format format, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    *out = dup_string(format_deviation_report(report->report, format_of(format)));
  });
}

mixconc_status mixconc_report_parse(const char* structured, mixconc_report** out) {
  return guarded([&] {
    need(structured, "structured");
    need(out, "out");
    *out = new mixconc_report{parse_deviation_report(structured)};
  });
}

int mixconc_report_equal(const mixconc_report* a, const mixconc_report* b) {
  return a && b && a->report == b->report ? 1 : 0;
}

mixconc_status mixconc_expectation_experiment(const mixconc_chain* chain, const mixconc_experiment_config* config,
                                              mixconc_expectation* out) {
  return guarded([&] {
    need(chain, "chain");
    need(config, "config");
    need(out, "out");
    const ExpectationEstimate e = expectation_experiment(chain->spec, config->n, config->trials, config->seed,
                                                         statistic_of(config->statistic), options_of(*config));
    *out = {e.estimate, e.halfwidth, e.bound};
  });
}

mixconc_status mixconc_exact_mean_drift(const mixconc_chain* chain, size_t n, double* out) {
  return guarded([&] {
    need(chain, "chain");
    need(out, "out");
    *out = exact_mean_drift(chain->spec, n);
  });
}

mixconc_status mixconc_lipschitz_audit(const double* rho, size_t len, size_t n, size_t pairs, uint64_t seed,
                                       double* max_g_ratio, double* max_h_ratio, int* within_bounds) {
  return guarded([&] {
    need(rho, "rho");
    const LipschitzAudit a = lipschitz_audit(StochasticVector(copy(rho, len)), n, pairs, seed);
    if (max_g_ratio) *max_g_ratio = a.max_g_ratio;
    if (max_h_ratio) *max_h_ratio = a.max_h_ratio;
    if (within_bounds) *within_bounds = a.g_within_bound && a.h_within_bound ? 1 : 0;
  });
}

mixconc_status mixconc_verify(const mixconc_verify_config* config, mixconc_lemma_report** out) {
  return guarded([&] {
    need(out, "out");
    LemmaSuiteOptions o;
    if (config) {
      o.seed = config->seed;
      if (config->instances) o.instances = config->instances;
      if (config->max_states) o.max_states = config->max_states;
      if (config->max_length) o.max_length = config->max_length;
      if (config->horizon) o.horizon = config->horizon;
    }
    *out = new mixconc_lemma_report{exact_lemma_suite(o)};
  });
}

void mixconc_lemma_report_free(mixconc_lemma_report* report) { delete report; }

int mixconc_lemma_report_all_passed(const mixconc_lemma_report* report) {
  return report && report->report.all_passed() ? 1 : 0;
}

size_t mixconc_lemma_report_check_count(const mixconc_lemma_report* report) {
  return report ? report->report.checks.size() : 0;
}

mixconc_status mixconc_lemma_report_check(const mixconc_lemma_report* report, size_t index, mixconc_lemma_check* out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    require(index < report->report.checks.size(), ErrorCode::InvalidArgument, "check index out of range");
    const LemmaCheck& c = report->report.checks[index];
    *out = {c.name.c_str(), c.equality ? 1 : 0, c.tolerance,           c.checks,
            c.worst_gap,    c.passed() ? 1 : 0, c.failing_seeds.size()};
  });
}

mixconc_status mixconc_lemma_report_serialize(const mixconc_lemma_report* report, mixconc_format format, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    *out = dup_string(format_lemma_report(report->report, format_of(format)));
  });
}

}  // extern "C"
