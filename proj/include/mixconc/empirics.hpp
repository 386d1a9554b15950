#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixconc/bounds.hpp"
#include "mixconc/chain.hpp"
#include "mixconc/mixing.hpp"

namespace mixconc {

/// Occupation counts of a trajectory; counts sum to n exactly.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution(std::vector<std::uint64_t> counts);

  std::size_t alphabet() const noexcept { return counts_.size(); }
  std::uint64_t n() const noexcept { return n_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  double prob(std::size_t y) const { return static_cast<double>(counts_[y]) / static_cast<double>(n_); }
  std::vector<double> probs() const;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_;
};

EmpiricalDistribution empirical_distribution(std::span<const Symbol> seq, std::size_t alphabet);
EmpiricalDistribution empirical_distribution(const Trajectory& t);

/// max_y |rho_y - rho_hat_y|
double sup_norm_stat(const EmpiricalDistribution& e, const StochasticVector& rho);
/// TV(rho, rho_hat), equal to sup_E |rho(E) - rho_hat(E)|.
double tv_stat(const EmpiricalDistribution& e, const StochasticVector& rho);

enum class Statistic { SupNorm, TotalVariation, CustomLipschitz };

std::string_view to_string(Statistic s);
/// Accepts the canonical names and the short CLI forms sup, tv, lip.
Statistic parse_statistic(std::string_view name);

/// Real function of a length-n trajectory that is `lipschitz`-Lipschitz in
/// the Hamming metric. Used by the CustomLipschitz statistic, which checks
/// P(f - E f > n eps) <= exp(-n (1-theta)^2 (eps/L)^2 / (2 G^2)).
struct LipschitzFunctional {
  std::string name;
  double lipschitz = 1.0;
  std::function<double(std::span<const Symbol>, const StochasticVector& rho)> eval;

  /// g(x) = max_j |n rho_j - #{i : x_i = j}|, 1-Lipschitz.
  static LipschitzFunctional sup_count_deviation();
};

struct DeviationRow {
  double epsilon = 0.0;
  double threshold = 0.0;
  std::uint64_t exceedances = 0;
  double empirical_frequency = 0.0;
  double mc_halfwidth = 0.0;
  double bound = 0.0;      // capped at 1, includes any nonstationary correction
  double bound_raw = 0.0;  // uncapped
  bool satisfied = false;  // empirical_frequency - mc_halfwidth <= bound

  friend bool operator==(const DeviationRow&, const DeviationRow&) = default;
};

struct DeviationReport {
  std::string spec_id;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  Statistic statistic = Statistic::SupNorm;
  double delta_mc = 1e-3;
  bool stationary = true;
  double G = 1.0;
  double theta = 0.0;
  double correction = 0.0;  // TV(pi, pi') added to every bound when not stationary
  std::vector<DeviationRow> rows;

  bool all_satisfied() const;
  friend bool operator==(const DeviationReport&, const DeviationReport&) = default;
};

struct ExperimentOptions {
  std::size_t horizon = kDefaultHorizon;
  unsigned workers = 1;
  // Stationary runs start from pi; otherwise from the spec's initial law and
  // the bound column carries the TV(pi, initial) correction.
  bool stationary = true;
  double delta_mc = 1e-3;
  // Overrides the fitted (G, theta) when set.
  std::optional<ErgodicityConstants> constants;
  LipschitzFunctional functional = LipschitzFunctional::sup_count_deviation();
};

/// sqrt(ln(2/delta) / (2 trials))
double hoeffding_halfwidth(std::size_t trials, double delta);

DeviationReport deviation_experiment(const ChainSpec& spec, std::size_t n, std::size_t trials, std::uint64_t seed,
                                     Statistic statistic, const std::vector<double>& epsilon_grid,
                                     const ExperimentOptions& options = {});

struct ExpectationEstimate {
  double estimate;   // Monte Carlo mean of the statistic
  double halfwidth;  // 3 standard errors
  double bound;      // expectation_sup_bound or Lambda_n
};

/// SupNorm and TotalVariation only.
ExpectationEstimate expectation_experiment(const ChainSpec& spec, std::size_t n, std::size_t trials,
                                           std::uint64_t seed, Statistic statistic,
                                           const ExperimentOptions& options = {});

/// TV((1/n) sum_i L(Y_i), rho), computed exactly from step laws.
double exact_mean_drift(const ChainSpec& spec, std::size_t n);

struct LipschitzAudit {
  double max_g_ratio = 0.0;
  double max_h_ratio = 0.0;
  std::size_t comparisons = 0;
  // Decided on the exact rational maxima, before rounding to double.
  bool g_within_bound = true;  // max ratio for g is <= 1
  bool h_within_bound = true;  // max ratio for h is <= 2
};

/// Checks |g(x)-g(y)| <= d_H(x,y) and |h(x)-h(y)| <= 2 d_H(x,y) for
/// g = n * sup-norm and h = 2n * TV in exact rational arithmetic, over
/// `pairs` random pairs plus every single-coordinate change of one draw.
LipschitzAudit lipschitz_audit(const StochasticVector& rho, std::size_t n, std::size_t pairs, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Exact lemma suite

struct LemmaCheck {
  std::string name;
  bool equality = false;
  double tolerance = 0.0;
  std::size_t checks = 0;
  // Inequalities: max of lhs - rhs. Equalities: max |lhs - rhs|.
  double worst_gap = 0.0;
  std::vector<std::uint64_t> failing_seeds;

  bool passed() const { return failing_seeds.empty(); }
};

struct LemmaReport {
  std::uint64_t seed = 0;
  std::size_t instances = 0;
  std::size_t max_states = 0;
  std::size_t max_length = 0;
  std::vector<LemmaCheck> checks;
  // Markov eta-bar_ij compared against kappa(A^(j-i)); how often they agree.
  std::size_t eta_kappa_comparisons = 0;
  std::size_t eta_kappa_equalities = 0;

  bool all_passed() const;
};

struct LemmaSuiteOptions {
  std::uint64_t seed = 0;
  std::size_t instances = 200;
  std::size_t max_states = 4;
  std::size_t max_length = 5;
  std::size_t horizon = kDefaultHorizon;
};

/// Throws EnumerationLimit when max_states^max_length exceeds 1e7.
LemmaReport exact_lemma_suite(const LemmaSuiteOptions& options = {});

}  // namespace mixconc
