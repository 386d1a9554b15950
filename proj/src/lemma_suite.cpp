#include <algorithm>
#include <cmath>
#include <limits>

#include "mixconc/empirics.hpp"
#include "mixconc/error.hpp"
#include "mixconc/rng.hpp"

namespace mixconc {

namespace {

constexpr double kInequalityTol = 1e-10;
constexpr double kEqualityTol = 1e-12;

enum CheckId {
  kMarkovContraction,
  kErgodicContraction,
  kEtaTau,
  kTauGeometric,
  kHmmDomination,
  kNearlyStationary,
  kInitialLawEquality,
  kEventSupremum,
  kMeanDrift,
  kCheckCount,
};

// Positive weights; Dirichlet(1) after normalization.
std::vector<double> random_weights(Engine& eng, std::size_t size) {
  std::vector<double> w(size);
  for (double& v : w) v = 1e-3 - std::log1p(-uniform01(eng));
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return w;
}

StochasticVector random_vector(Engine& eng, std::size_t size) { return StochasticVector(random_weights(eng, size)); }

// Strictly positive kernel; `lazy` in (0,1] blends toward the identity so
// that slowly mixing chains show up too.
StochasticMatrix random_kernel(Engine& eng, std::size_t rows, std::size_t cols, double lazy) {
  std::vector<double> data;
  data.reserve(rows * cols);
  for (std::size_t c = 0; c < cols; ++c) {
    auto col = random_weights(eng, rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const double stay = (rows == cols && r == c) ? 1.0 : 0.0;
      data.push_back(lazy * col[r] + (1.0 - lazy) * stay);
    }
  }
  return StochasticMatrix(rows, cols, std::move(data));
}

struct Instance {
  std::uint64_t seed;
  ChainSpec hmm;                   // (p1, A, B), B nontrivial
  StochasticVector other_initial;  // second start for the two-start checks
  bool ergodic;
};

class Recorder {
 public:
  explicit Recorder(LemmaReport& report) : report_(report) {
    const char* names[kCheckCount] = {
        "markov_contraction",      // TV(A(p-q)) <= kappa TV(p-q)
        "ergodic_contraction",     // kappa(A^m) <= 2 G theta^m
        "eta_tau",                 // eta_bar_ij <= 2 tau_(j-i+1)
        "tau_geometric",           // 2 tau_(j-i+1) <= 2 G theta^(j-i)
        "hmm_domination",          // eta_bar_ij(Y) <= eta_bar_ij(X)
        "nearly_stationary",       // TV(L(Y), L(Y')) <= TV(pi, pi')
        "initial_law_equality",    // TV(L(X), L(X')) = TV(xi, xi')
        "event_supremum_equality", // TV(phi, psi) = sup_E |phi(E) - psi(E)|
        "mean_drift",              // TV(E rho_hat - rho) <= G / ((1-theta) n)
    };
    for (int id = 0; id < kCheckCount; ++id) {
      LemmaCheck c;
      c.name = names[id];
      c.equality = id == kInitialLawEquality || id == kEventSupremum;
      c.tolerance = c.equality ? kEqualityTol : kInequalityTol;
      c.worst_gap = -std::numeric_limits<double>::infinity();
      report_.checks.push_back(c);
    }
  }

  void less_equal(CheckId id, double lhs, double rhs, std::uint64_t seed) { record(id, lhs - rhs, seed); }
  void equal(CheckId id, double lhs, double rhs, std::uint64_t seed) { record(id, std::abs(lhs - rhs), seed); }

 private:
  void record(CheckId id, double gap, std::uint64_t seed) {
    LemmaCheck& c = report_.checks[id];
    ++c.checks;
    c.worst_gap = std::max(c.worst_gap, gap);
    if (!(gap <= c.tolerance) &&
        std::find(c.failing_seeds.begin(), c.failing_seeds.end(), seed) == c.failing_seeds.end())
      c.failing_seeds.push_back(seed);
  }

  LemmaReport& report_;
};

double sup_over_events(std::span<const double> p, std::span<const double> q) {
  const std::size_t k = p.size();
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    double diff = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask >> i & 1u) diff += p[i] - q[i];
    best = std::max(best, std::abs(diff));
  }
  return best;
}

void check_instance(const Instance& inst, const LemmaSuiteOptions& opt, Recorder& rec, LemmaReport& report,
                    Engine& eng) {
  const ChainSpec& hmm = inst.hmm;
  const StochasticMatrix& a = hmm.transition();
  const std::size_t k = hmm.state_count();
  const std::size_t n = 2 + static_cast<std::size_t>(uniform_below(eng, opt.max_length - 1));
  const std::uint64_t seed = inst.seed;

  // Markov contraction on random and point-mass pairs.
  const double kappa = contraction_coefficient(a);
  for (int rep = 0; rep < 3; ++rep) {
    const StochasticVector p = rep == 0 ? StochasticVector::point_mass(k, 0) : random_vector(eng, k);
    const StochasticVector q = rep == 0 ? StochasticVector::point_mass(k, k - 1) : random_vector(eng, k);
    const ContractionCheck cc = verify_contraction(a, p, q);
    rec.less_equal(kMarkovContraction, cc.lhs, cc.rhs, seed);
  }
  // Consequence for powers: kappa(A^(m+1)) <= kappa(A) kappa(A^m).
  for (unsigned m = 1; m <= 6; ++m)
    rec.less_equal(kMarkovContraction, contraction_coefficient(a.power(m + 1)),
                   kappa * contraction_coefficient(a.power(m)), seed);

  // Markov chains from two starts have joint laws exactly TV(xi, xi') apart.
  {
    const ChainSpec x1 = hmm.underlying_markov();
    const ChainSpec x2 = x1.with_initial(inst.other_initial);
    rec.equal(kInitialLawEquality, tv_distance(exact_joint_law(x1, n).probs, exact_joint_law(x2, n).probs),
              tv_distance(x1.initial(), x2.initial()), seed);
  }

  // TV equals the event supremum; alphabet sizes cycle through 2..12.
  {
    const std::size_t size = 2 + static_cast<std::size_t>(uniform_below(eng, 11));
    const auto p = random_vector(eng, size);
    const auto q = random_vector(eng, size);
    rec.equal(kEventSupremum, tv_distance(p, q), sup_over_events(p.probs(), q.probs()), seed);
  }

  if (!inst.ergodic) return;

  const ErgodicityConstants c = fit_ergodicity(a, opt.horizon);
  const auto& tau = c.tau_table;

  StochasticMatrix step = a;
  for (std::size_t m = 1; m + 1 <= c.horizon; ++m) {
    if (m > 1) step = a.compose(step);
    rec.less_equal(kErgodicContraction, contraction_coefficient(step), 2.0 * c.G * std::pow(c.theta, double(m)),
                   seed);
  }

  const JointLaw y_law = exact_joint_law(hmm, n);
  const JointLaw x_law = exact_joint_law(hmm.underlying_markov(), n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) {
      const double eta_y = eta_bar_exact(y_law, i, j);
      const double eta_x = eta_bar_exact(x_law, i, j);
      const double two_tau = 2.0 * tau[j - i];  // tau_(j-i+1)
      rec.less_equal(kEtaTau, eta_y, two_tau, seed);
      rec.less_equal(kEtaTau, eta_x, two_tau, seed);
      rec.less_equal(kTauGeometric, two_tau, 2.0 * c.G * std::pow(c.theta, double(j - i)), seed);
      rec.less_equal(kHmmDomination, eta_y, eta_x, seed);

      const double kappa_power = contraction_coefficient(a.power(static_cast<unsigned>(j - i)));
      ++report.eta_kappa_comparisons;
      if (std::abs(eta_x - kappa_power) <= kEqualityTol) ++report.eta_kappa_equalities;
    }

  // Started at pi' versus at pi.
  {
    const StochasticVector pi = stationary_distribution(a);
    const ChainSpec moved = hmm.with_initial(inst.other_initial);
    const ChainSpec settled = hmm.with_initial(pi);
    rec.less_equal(kNearlyStationary,
                   tv_distance(exact_joint_law(moved, n).probs, exact_joint_law(settled, n).probs),
                   tv_distance(pi, inst.other_initial), seed);
  }

  for (std::size_t len : {n, std::size_t{1}, std::size_t{10}, std::size_t{100}})
    rec.less_equal(kMeanDrift, exact_mean_drift(hmm, len), empirical_mean_drift_bound(c, len), seed);
}

std::vector<Instance> corner_cases(std::uint64_t base) {
  const StochasticMatrix two_state = StochasticMatrix::from_source_rows({{0.9, 0.1}, {0.2, 0.8}});
  const StochasticMatrix rank_one = StochasticMatrix::rank_one(StochasticVector({0.5, 0.3, 0.2}), 3);
  const StochasticMatrix swap = StochasticMatrix::from_source_rows({{0.0, 1.0}, {1.0, 0.0}});
  const StochasticMatrix noisy = StochasticMatrix::from_source_rows({{0.7, 0.3}, {0.1, 0.9}});
  const StochasticMatrix emit3 = StochasticMatrix::from_source_rows({{0.6, 0.3, 0.1}, {0.2, 0.2, 0.6}, {0.3, 0.4, 0.3}});

  std::vector<Instance> out;
  auto add = [&](ChainSpec spec, StochasticVector other, bool ergodic) {
    out.push_back({derive_seed(base, 1'000'000 + out.size()), std::move(spec), std::move(other), ergodic});
  };
  add(ChainSpec(StochasticVector({2.0 / 3, 1.0 / 3}), two_state, noisy), StochasticVector::point_mass(2, 0), true);
  add(ChainSpec(StochasticVector::point_mass(2, 1), two_state), StochasticVector::point_mass(2, 0), true);
  add(ChainSpec(StochasticVector::point_mass(3, 0), rank_one, emit3), StochasticVector::uniform(3), true);
  add(ChainSpec(StochasticVector::uniform(3), rank_one), StochasticVector::uniform(3), true);
  add(ChainSpec(StochasticVector::uniform(2), StochasticMatrix::identity(2)), StochasticVector::point_mass(2, 0),
      false);
  add(ChainSpec(StochasticVector({0.25, 0.75}), swap, noisy), StochasticVector::point_mass(2, 1), false);
  return out;
}

}  // namespace

bool LemmaReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.passed(); });
}

LemmaReport exact_lemma_suite(const LemmaSuiteOptions& opt) {
  require(opt.max_states >= 2, ErrorCode::InvalidArgument, "max_states must be >= 2");
  require(opt.max_length >= 2, ErrorCode::InvalidArgument, "max_length must be >= 2");
  require(opt.horizon >= 8, ErrorCode::InvalidArgument, "horizon must be >= 8");
  require(std::pow(double(opt.max_states), double(opt.max_length)) <= kEnumerationLimit,
          ErrorCode::EnumerationLimit,
          "enumeration guard: " + std::to_string(opt.max_states) + "^" + std::to_string(opt.max_length) +
              " sequences exceeds the limit of 1e7");

  LemmaReport report;
  report.seed = opt.seed;
  report.max_states = opt.max_states;
  report.max_length = opt.max_length;
  Recorder rec(report);

  std::vector<Instance> instances = corner_cases(opt.seed);
  for (std::size_t idx = 0; idx < opt.instances; ++idx) {
    const std::uint64_t s = derive_seed(opt.seed, idx);
    Engine eng(s);
    const std::size_t k = 2 + uniform_below(eng, opt.max_states - 1);
    const std::size_t m = 2 + uniform_below(eng, opt.max_states - 1);
    const double lazy = 0.1 + 0.9 * uniform01(eng);
    StochasticMatrix a = random_kernel(eng, k, k, lazy);
    StochasticMatrix b = random_kernel(eng, m, k, 1.0);
    StochasticVector p1 = random_vector(eng, k);
    StochasticVector other = uniform_below(eng, 4) == 0 ? StochasticVector::point_mass(k, uniform_below(eng, k))
                                                        : random_vector(eng, k);
    instances.push_back({s, ChainSpec(std::move(p1), std::move(a), std::move(b)), std::move(other), true});
  }

  for (const Instance& inst : instances) {
    Engine eng(mix64(inst.seed));
    check_instance(inst, opt, rec, report, eng);
  }
  report.instances = instances.size();
  return report;
}

}  // namespace mixconc
