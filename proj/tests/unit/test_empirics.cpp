#include <cmath>
#include <vector>

#include "doctest.h"
#include "mixconc/empirics.hpp"
#include "mixconc/error.hpp"
#include "mixconc/rng.hpp"

using namespace mixconc;

namespace {

StochasticMatrix two_state() { return StochasticMatrix::from_source_rows({{0.9, 0.1}, {0.2, 0.8}}); }

ChainSpec stationary_two_state() { return ChainSpec(stationary_distribution(two_state()), two_state(), {}, "two"); }

ChainSpec iid(std::vector<double> p) {
  const StochasticVector v(p);
  return ChainSpec(v, StochasticMatrix::rank_one(v, v.size()));
}

}  // namespace

TEST_CASE("empirical_distribution") {
  const std::vector<Symbol> constant(9, 2);
  const EmpiricalDistribution c = empirical_distribution(constant, 3);
  CHECK(c.probs() == std::vector<double>{0.0, 0.0, 1.0});
  CHECK(c.n() == 9);

  const std::vector<Symbol> alt{0, 1, 0, 1};
  CHECK(empirical_distribution(alt, 2).probs() == std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(empirical_distribution(alt, 1), Error);

  SUBCASE("long stationary run is close to pi") {
    const Trajectory t = sample_trajectory(stationary_two_state(), 1000000, 5);
    const EmpiricalDistribution e = empirical_distribution(t);
    CHECK(std::abs(e.prob(0) - 2.0 / 3.0) < 0.01);
    CHECK(e.n() == 1000000);
  }
}

TEST_CASE("sup_norm_stat and tv_stat") {
  const StochasticVector rho({2.0 / 3.0, 1.0 / 3.0});
  const EmpiricalDistribution half(std::vector<std::uint64_t>{5, 5});
  CHECK(sup_norm_stat(half, rho) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(tv_stat(half, rho) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  const EmpiricalDistribution exact(std::vector<std::uint64_t>{1, 1, 2});
  CHECK(sup_norm_stat(exact, StochasticVector({0.25, 0.25, 0.5})) == 0.0);
  CHECK(tv_stat(exact, StochasticVector({0.25, 0.25, 0.5})) == 0.0);
  CHECK_THROWS_AS(tv_stat(exact, rho), Error);
}

TEST_CASE("statistic names") {
  for (Statistic s : {Statistic::SupNorm, Statistic::TotalVariation, Statistic::CustomLipschitz})
    CHECK(parse_statistic(to_string(s)) == s);
  CHECK(parse_statistic("sup") == Statistic::SupNorm);
  CHECK(parse_statistic("tv") == Statistic::TotalVariation);
  CHECK(parse_statistic("lip") == Statistic::CustomLipschitz);
  CHECK_THROWS_AS(parse_statistic("median"), Error);
}

TEST_CASE("hoeffding_halfwidth") {
  CHECK(hoeffding_halfwidth(1, 1e-3) == doctest::Approx(std::sqrt(std::log(2000.0) / 2)).epsilon(1e-15));
  CHECK(hoeffding_halfwidth(1, 1e-3) == doctest::Approx(1.95).epsilon(0.001));
  CHECK(hoeffding_halfwidth(10000, 1e-3) == doctest::Approx(0.019495).epsilon(1e-4));
  CHECK_THROWS_AS(hoeffding_halfwidth(0, 1e-3), Error);
  CHECK_THROWS_AS(hoeffding_halfwidth(10, 1.0), Error);
}

TEST_CASE("deviation_experiment") {
  SUBCASE("iid uniform two-state chain") {
    const DeviationReport r = deviation_experiment(iid({0.5, 0.5}), 1000, 10000, 0, Statistic::SupNorm, {0.05});
    REQUIRE(r.rows.size() == 1);
    CHECK(r.theta == 0.0);
    CHECK(r.rows[0].bound == doctest::Approx(std::exp(-1000 * 0.0025 / 2)).epsilon(1e-12));
    CHECK(r.rows[0].empirical_frequency <= r.rows[0].bound + r.rows[0].mc_halfwidth);
    CHECK(r.rows[0].satisfied);
  }

  SUBCASE("theta = 0.7 chain satisfies every row for all statistics") {
    for (Statistic s : {Statistic::SupNorm, Statistic::TotalVariation, Statistic::CustomLipschitz}) {
      const DeviationReport r =
          deviation_experiment(stationary_two_state(), 1000, 2000, 3, s, {0.02, 0.05, 0.1, 0.2});
      CHECK(r.all_satisfied());
      CHECK(r.theta == doctest::Approx(0.7).epsilon(1e-6));
      CHECK(r.statistic == s);
      CHECK(r.spec_id == "two");
    }
  }

  SUBCASE("a single trial is trivially satisfied") {
    const DeviationReport r = deviation_experiment(stationary_two_state(), 100, 1, 0, Statistic::SupNorm, {0.01, 0.5});
    for (const auto& row : r.rows) {
      CHECK(row.mc_halfwidth == doctest::Approx(1.95).epsilon(0.001));
      CHECK(row.satisfied);
    }
  }

  SUBCASE("results do not depend on the worker count") {
    ExperimentOptions one;
    ExperimentOptions four;
    four.workers = 4;
    const auto a = deviation_experiment(stationary_two_state(), 300, 777, 9, Statistic::TotalVariation, {0.01, 0.1}, one);
    const auto b = deviation_experiment(stationary_two_state(), 300, 777, 9, Statistic::TotalVariation, {0.01, 0.1}, four);
    CHECK(a == b);
    const auto c = deviation_experiment(stationary_two_state(), 300, 777, 10, Statistic::TotalVariation, {0.01, 0.1}, one);
    CHECK(a.rows != c.rows);
  }

  SUBCASE("nonstationary runs carry the correction") {
    const ChainSpec start0 = stationary_two_state().with_initial(StochasticVector::point_mass(2, 0));
    ExperimentOptions opt;
    opt.stationary = false;
    const DeviationReport r = deviation_experiment(start0, 500, 500, 1, Statistic::SupNorm, {0.05}, opt);
    CHECK(r.correction == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r.rows[0].bound_raw ==
          doctest::Approx(dkw_bound(ErgodicityConstants::from_values(r.G, r.theta), 500, 0.05).tail.raw + 1.0 / 3.0));
    CHECK_FALSE(r.stationary);
  }

  SUBCASE("given constants override the fit") {
    ExperimentOptions opt;
    opt.constants = ErgodicityConstants::from_values(2.0, 0.9);
    const DeviationReport r = deviation_experiment(stationary_two_state(), 100, 10, 0, Statistic::SupNorm, {0.1}, opt);
    CHECK(r.G == 2.0);
    CHECK(r.theta == 0.9);
  }

  CHECK_THROWS_AS(deviation_experiment(stationary_two_state(), 100, 10, 0, Statistic::SupNorm, {}), Error);
  CHECK_THROWS_AS(deviation_experiment(stationary_two_state(), 100, 10, 0, Statistic::SupNorm, {-0.1}), Error);
  CHECK_THROWS_AS(deviation_experiment(stationary_two_state(), 100, 0, 0, Statistic::SupNorm, {0.1}), Error);
  CHECK_THROWS_AS(deviation_experiment(ChainSpec(StochasticVector::uniform(2), StochasticMatrix::identity(2)), 100, 10,
                                       0, Statistic::SupNorm, {0.1}),
                  Error);
}

TEST_CASE("expectation_experiment") {
  SUBCASE("iid Bernoulli(0.5) lies in the sandwich") {
    const ExpectationEstimate e = expectation_experiment(iid({0.5, 0.5}), 100, 20000, 2, Statistic::SupNorm);
    CHECK(e.estimate + e.halfwidth >= std::sqrt(0.25 / 200));
    CHECK(e.estimate - e.halfwidth <= std::sqrt(0.25 / 100));
    CHECK(e.bound == doctest::Approx(0.1).epsilon(1e-14));
  }

  SUBCASE("total variation is at least Lambda_n / 4 - 1/(8 sqrt n)") {
    const ExpectationEstimate e = expectation_experiment(iid({0.25, 0.25, 0.25, 0.25}), 100, 5000, 4,
                                                         Statistic::TotalVariation);
    CHECK(e.bound == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(e.estimate + e.halfwidth >= e.bound / 4 - 1.0 / (8 * std::sqrt(100.0)));
    CHECK(e.estimate - e.halfwidth <= e.bound);
  }

  SUBCASE("a constant observation process has zero deviation") {
    const ChainSpec constant(stationary_distribution(two_state()), two_state(),
                             StochasticMatrix::rank_one(StochasticVector::point_mass(2, 0), 2));
    const ExpectationEstimate e = expectation_experiment(constant, 50, 200, 0, Statistic::SupNorm);
    CHECK(e.estimate == 0.0);
    CHECK(e.halfwidth == 0.0);
    CHECK(e.estimate <= e.bound);
  }

  CHECK_THROWS_AS(expectation_experiment(iid({0.5, 0.5}), 10, 10, 0, Statistic::CustomLipschitz), Error);
}

TEST_CASE("exact_mean_drift") {
  CHECK(exact_mean_drift(stationary_two_state(), 37) < 1e-15);
  const ChainSpec start0 = stationary_two_state().with_initial(StochasticVector::point_mass(2, 0));
  for (std::size_t n : {1u, 10u, 100u}) {
    const double drift = exact_mean_drift(start0, n);
    CHECK(drift <= empirical_mean_drift_bound(ErgodicityConstants::from_values(1.0, 0.7), n));
    // Closed form: (1/3) (1 - 0.7^n) / (0.3 n).
    CHECK(drift == doctest::Approx((1.0 / 3.0) * (1 - std::pow(0.7, n)) / (0.3 * n)).epsilon(1e-12));
  }
}

TEST_CASE("lipschitz_audit") {
  const LipschitzAudit a = lipschitz_audit(StochasticVector::uniform(5), 50, 20000, 1);
  CHECK(a.max_g_ratio <= 1.0);
  CHECK(a.max_h_ratio <= 2.0);
  CHECK(a.max_g_ratio > 0.0);
  CHECK(a.g_within_bound);
  CHECK(a.h_within_bound);
  CHECK(a.comparisons >= 20000 + 50 * 4);

  const LipschitzAudit skewed = lipschitz_audit(StochasticVector({0.013, 0.2, 0.3, 0.487}), 31, 5000, 2);
  CHECK(skewed.max_g_ratio <= 1.0);
  CHECK(skewed.max_h_ratio <= 2.0);

  SUBCASE("single flips on two symbols change h by 0 or 2") {
    const StochasticVector rho({0.5, 0.5});
    const std::size_t n = 10;
    Engine eng(3);
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<Symbol> x(n);
      for (auto& s : x) s = static_cast<Symbol>(uniform_below(eng, 2));
      std::vector<Symbol> y = x;
      y[uniform_below(eng, n)] ^= 1;
      const double hx = 2.0 * n * tv_stat(empirical_distribution(x, 2), rho);
      const double hy = 2.0 * n * tv_stat(empirical_distribution(y, 2), rho);
      const double diff = std::abs(hx - hy);
      CHECK((std::abs(diff) < 1e-12 || std::abs(diff - 2.0) < 1e-12));
    }
  }

  CHECK_THROWS_AS(lipschitz_audit(StochasticVector::uniform(3), 10, 0, 0), Error);
}

TEST_CASE("exact_lemma_suite") {
  const LemmaReport r = exact_lemma_suite();
  CHECK(r.all_passed());
  CHECK(r.instances >= 200);
  for (const auto& c : r.checks) {
    INFO(c.name);
    CHECK(c.passed());
    CHECK(c.checks > 0);
    CHECK(c.tolerance == (c.equality ? 1e-12 : 1e-10));
  }

  SUBCASE("fixed seed reproduces the report") {
    LemmaSuiteOptions o;
    o.seed = 17;
    o.instances = 30;
    const LemmaReport a = exact_lemma_suite(o);
    const LemmaReport b = exact_lemma_suite(o);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
      CHECK(a.checks[i].worst_gap == b.checks[i].worst_gap);
      CHECK(a.checks[i].checks == b.checks[i].checks);
    }
  }

  SUBCASE("the enumeration guard refuses large limits") {
    LemmaSuiteOptions o;
    o.max_length = 40;
    CHECK_THROWS_AS(exact_lemma_suite(o), Error);
  }
}
