#include "mixconc/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include "mixconc/error.hpp"
#include "mixconc/rng.hpp"

namespace mixconc {

namespace {

using Rational = boost::multiprecision::cpp_rational;

struct TrialSetup {
  ChainSpec spec;  // initial law already chosen
  StochasticVector rho;
  ErgodicityConstants constants;
  double correction = 0.0;
};

TrialSetup prepare(const ChainSpec& spec, const ExperimentOptions& options) {
  const StochasticVector pi = stationary_distribution(spec.transition());
  ErgodicityConstants constants =
      options.constants ? *options.constants : fit_ergodicity(spec.transition(), options.horizon);
  StochasticVector rho = spec.emission() ? spec.emission()->apply(pi) : pi;
  if (options.stationary) return {spec.with_initial(pi), std::move(rho), std::move(constants), 0.0};
  const double correction = nonstationary_correction(pi, spec.initial());
  return {spec, std::move(rho), std::move(constants), correction};
}

// Evaluates `statistic` on `trials` independent trajectories. Trial t always
// uses stream derive_seed(seed, t), so the result does not depend on how
// trials are split across workers.
std::vector<double> run_trials(const TrialSetup& setup, std::size_t n, std::size_t trials, std::uint64_t seed,
                               Statistic statistic, const ExperimentOptions& options) {
  require(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
  require(trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");
  require(statistic != Statistic::CustomLipschitz || static_cast<bool>(options.functional.eval),
          ErrorCode::InvalidArgument, "custom Lipschitz statistic needs a functional");
  const TrajectorySampler sampler(setup.spec);
  std::vector<double> values(trials);

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<Symbol> obs;
    for (std::size_t t = begin; t < end; ++t) {
      sampler.sample(n, derive_seed(seed, t), obs);
      switch (statistic) {
        case Statistic::SupNorm:
          values[t] = sup_norm_stat(empirical_distribution(obs, sampler.alphabet()), setup.rho);
          break;
        case Statistic::TotalVariation:
          values[t] = tv_stat(empirical_distribution(obs, sampler.alphabet()), setup.rho);
          break;
        case Statistic::CustomLipschitz:
          values[t] = options.functional.eval(obs, setup.rho);
          break;
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, trials);
  if (workers == 1) {
    work(0, trials);
    return values;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (trials + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(trials, begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  for (auto& th : pool) th.join();
  return values;
}

Rational exact_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

struct Deviations {
  Rational g;  // max_j |n p_j - c_j|
  Rational h;  // sum_j |n p_j - c_j|
};

Deviations deviations(const std::vector<Rational>& scaled, const std::vector<std::int64_t>& counts) {
  Deviations d{0, 0};
  for (std::size_t j = 0; j < scaled.size(); ++j) {
    const Rational dev = exact_abs(scaled[j] - counts[j]);
    if (dev > d.g) d.g = dev;
    d.h += dev;
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------

EmpiricalDistribution::EmpiricalDistribution(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
  require(!counts_.empty(), ErrorCode::InvalidArgument, "empty alphabet");
  n_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  require(n_ >= 1, ErrorCode::InvalidArgument, "empirical distribution needs n >= 1");
}

std::vector<double> EmpiricalDistribution::probs() const {
  std::vector<double> p(counts_.size());
  for (std::size_t y = 0; y < p.size(); ++y) p[y] = prob(y);
  return p;
}

EmpiricalDistribution empirical_distribution(std::span<const Symbol> seq, std::size_t alphabet) {
  std::vector<std::uint64_t> counts(alphabet, 0);
  for (Symbol s : seq) {
    require(s < alphabet, ErrorCode::InvalidArgument, "symbol " + std::to_string(s) + " outside the alphabet");
    ++counts[s];
  }
  return EmpiricalDistribution(std::move(counts));
}

EmpiricalDistribution empirical_distribution(const Trajectory& t) {
  return empirical_distribution(t.observations, t.alphabet);
}

double sup_norm_stat(const EmpiricalDistribution& e, const StochasticVector& rho) {
  require(e.alphabet() == rho.size(), ErrorCode::DimensionMismatch, "alphabet size mismatch");
  double best = 0.0;
  for (std::size_t y = 0; y < rho.size(); ++y) best = std::max(best, std::abs(rho[y] - e.prob(y)));
  return best;
}

double tv_stat(const EmpiricalDistribution& e, const StochasticVector& rho) {
  require(e.alphabet() == rho.size(), ErrorCode::DimensionMismatch, "alphabet size mismatch");
  double acc = 0.0;
  for (std::size_t y = 0; y < rho.size(); ++y) acc += std::abs(rho[y] - e.prob(y));
  return 0.5 * acc;
}

std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::SupNorm:
      return "sup_norm";
    case Statistic::TotalVariation:
      return "total_variation";
    case Statistic::CustomLipschitz:
      return "custom_lipschitz";
  }
  return "unknown";
}

Statistic parse_statistic(std::string_view name) {
  if (name == "sup" || name == "sup_norm") return Statistic::SupNorm;
  if (name == "tv" || name == "total_variation") return Statistic::TotalVariation;
  if (name == "lip" || name == "custom_lipschitz") return Statistic::CustomLipschitz;
  throw Error(ErrorCode::InvalidArgument, "unknown statistic '" + std::string(name) + "'");
}

LipschitzFunctional LipschitzFunctional::sup_count_deviation() {
  return {"sup_count_deviation", 1.0, [](std::span<const Symbol> seq, const StochasticVector& rho) {
            const auto e = empirical_distribution(seq, rho.size());
            return static_cast<double>(seq.size()) * sup_norm_stat(e, rho);
          }};
}

bool DeviationReport::all_satisfied() const {
  return std::all_of(rows.begin(), rows.end(), [](const DeviationRow& r) { return r.satisfied; });
}

double hoeffding_halfwidth(std::size_t trials, double delta) {
  require(trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");
  require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta_mc must lie in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(trials)));
}

DeviationReport deviation_experiment(const ChainSpec& spec, std::size_t n, std::size_t trials, std::uint64_t seed,
                                     Statistic statistic, const std::vector<double>& epsilon_grid,
                                     const ExperimentOptions& options) {
  require(!epsilon_grid.empty(), ErrorCode::InvalidArgument, "epsilon grid is empty");
  for (double eps : epsilon_grid)
    require(eps > 0.0 && std::isfinite(eps), ErrorCode::InvalidArgument, "epsilon values must be positive");
  const TrialSetup setup = prepare(spec, options);
  const std::vector<double> values = run_trials(setup, n, trials, seed, statistic, options);

  DeviationReport report;
  report.spec_id = spec.name();
  report.n = n;
  report.trials = trials;
  report.seed = seed;
  report.statistic = statistic;
  report.delta_mc = options.delta_mc;
  report.stationary = options.stationary;
  report.G = setup.constants.G;
  report.theta = setup.constants.theta;
  report.correction = setup.correction;

  // Centering for the custom statistic: the Monte Carlo mean of f / n.
  double centre = 0.0;
  if (statistic == Statistic::CustomLipschitz) {
    for (double v : values) centre += v;
    centre /= static_cast<double>(trials) * static_cast<double>(n);
  }

  const double halfwidth = hoeffding_halfwidth(trials, options.delta_mc);
  for (double eps : epsilon_grid) {
    DeviationRow row;
    row.epsilon = eps;
    BoundValue tail{};
    switch (statistic) {
      case Statistic::SupNorm: {
        const ThresholdBound b = dkw_bound(setup.constants, n, eps);
        row.threshold = b.threshold;
        tail = b.tail;
        break;
      }
      case Statistic::TotalVariation: {
        const ThresholdBound b = uniform_chernoff_bound(setup.rho, setup.constants, n, eps);
        row.threshold = b.threshold;
        tail = b.tail;
        break;
      }
      case Statistic::CustomLipschitz: {
        row.threshold = centre;
        tail = hmm_concentration_bound({n, eps, setup.constants, options.functional.lipschitz});
        break;
      }
    }
    const double scale = statistic == Statistic::CustomLipschitz ? static_cast<double>(n) : 1.0;
    for (double v : values)
      if (v / scale > row.threshold + eps) ++row.exceedances;
    row.empirical_frequency = static_cast<double>(row.exceedances) / static_cast<double>(trials);
    row.mc_halfwidth = halfwidth;
    row.bound_raw = tail.raw + setup.correction;
    row.bound = std::min(1.0, row.bound_raw);
    row.satisfied = row.empirical_frequency - row.mc_halfwidth <= row.bound;
    report.rows.push_back(row);
  }
  return report;
}

ExpectationEstimate expectation_experiment(const ChainSpec& spec, std::size_t n, std::size_t trials,
                                           std::uint64_t seed, Statistic statistic,
                                           const ExperimentOptions& options) {
  require(statistic != Statistic::CustomLipschitz, ErrorCode::InvalidArgument,
          "expectation experiments support the sup_norm and total_variation statistics");
  const TrialSetup setup = prepare(spec, options);
  const std::vector<double> values = run_trials(setup, n, trials, seed, statistic, options);

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(trials);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var = trials > 1 ? var / static_cast<double>(trials - 1) : 0.0;

  ExpectationEstimate out{};
  out.estimate = mean;
  out.halfwidth = 3.0 * std::sqrt(var / static_cast<double>(trials));
  out.bound = statistic == Statistic::SupNorm ? expectation_sup_bound(setup.constants, n)
                                              : lambda_n(setup.rho, setup.constants, n).lambda;
  return out;
}

double exact_mean_drift(const ChainSpec& spec, std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
  const StochasticVector rho = observation_stationary(spec);
  const StochasticMatrix b = spec.emission_or_identity();
  std::vector<double> mean(rho.size(), 0.0);
  StochasticVector law = spec.initial();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) law = spec.transition().apply(law);
    const StochasticVector y = b.apply(law);
    for (std::size_t s = 0; s < mean.size(); ++s) mean[s] += y[s];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  return tv_distance(mean, rho.probs());
}

LipschitzAudit lipschitz_audit(const StochasticVector& rho, std::size_t n, std::size_t pairs, std::uint64_t seed) {
  require(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
  require(pairs >= 1, ErrorCode::InvalidArgument, "pairs must be >= 1");
  const std::size_t k = rho.size();
  std::vector<Rational> scaled(k);
  for (std::size_t j = 0; j < k; ++j) scaled[j] = Rational(rho[j]) * static_cast<std::int64_t>(n);

  LipschitzAudit audit;
  Rational best_g = 0;
  Rational best_h = 0;
  auto compare = [&](const std::vector<std::int64_t>& cx, const std::vector<std::int64_t>& cy, std::size_t dist) {
    if (dist == 0) return;
    const Deviations dx = deviations(scaled, cx);
    const Deviations dy = deviations(scaled, cy);
    const Rational d = static_cast<std::int64_t>(dist);
    const Rational rg = exact_abs(dx.g - dy.g) / d;
    const Rational rh = exact_abs(dx.h - dy.h) / d;
    if (rg > best_g) best_g = rg;
    if (rh > best_h) best_h = rh;
    ++audit.comparisons;
  };
  auto count = [k](const std::vector<Symbol>& x) {
    std::vector<std::int64_t> c(k, 0);
    for (Symbol s : x) ++c[s];
    return c;
  };

  Engine eng(derive_seed(seed, 0));
  std::vector<Symbol> x(n);
  std::vector<std::size_t> positions(n);
  if (k >= 2) {
    for (std::size_t p = 0; p < pairs; ++p) {
      for (auto& s : x) s = static_cast<Symbol>(uniform_below(eng, k));
      std::vector<Symbol> y = x;
      const std::size_t dist = 1 + uniform_below(eng, n);
      std::iota(positions.begin(), positions.end(), std::size_t{0});
      for (std::size_t i = 0; i < dist; ++i) {
        const std::size_t pick = i + uniform_below(eng, n - i);
        std::swap(positions[i], positions[pick]);
        const auto shift = static_cast<Symbol>(1 + uniform_below(eng, k - 1));
        y[positions[i]] = static_cast<Symbol>((x[positions[i]] + shift) % k);
      }
      compare(count(x), count(y), dist);
    }

    // Every single-coordinate change of one draw.
    for (auto& s : x) s = static_cast<Symbol>(uniform_below(eng, k));
    const auto cx = count(x);
    for (std::size_t i = 0; i < n; ++i)
      for (Symbol b = 0; b < k; ++b) {
        if (b == x[i]) continue;
        auto cy = cx;
        --cy[x[i]];
        ++cy[b];
        compare(cx, cy, 1);
      }
  }
  audit.max_g_ratio = static_cast<double>(best_g);
  audit.max_h_ratio = static_cast<double>(best_h);
  audit.g_within_bound = best_g <= 1;
  audit.h_within_bound = best_h <= 2;
  return audit;
}

}  // namespace mixconc
