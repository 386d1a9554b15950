#include "mixconc/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "mixconc/error.hpp"

namespace mixconc {

namespace {

void check_n(std::size_t n) { require(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1"); }

void check_constants(const ErgodicityConstants& c) {
  require(c.G >= 1.0 && std::isfinite(c.G), ErrorCode::InvalidArgument, "G must be >= 1");
  require(c.theta >= 0.0 && c.theta < 1.0, ErrorCode::InvalidArgument, "theta must lie in [0, 1)");
}

// (1 + 2 G theta) / (n (1 - theta))
double variance_factor(const ErgodicityConstants& c, std::size_t n) {
  check_n(n);
  check_constants(c);
  return (1.0 + 2.0 * c.G * c.theta) / (static_cast<double>(n) * (1.0 - c.theta));
}

double tail_exponent_value(const ErgodicityConstants& c, std::size_t n, double epsilon) {
  check_n(n);
  check_constants(c);
  require(epsilon >= 0.0, ErrorCode::InvalidArgument, "epsilon must be >= 0");
  const double gap = 1.0 - c.theta;
  return std::exp(-static_cast<double>(n) * gap * gap * epsilon * epsilon / (2.0 * c.G * c.G));
}

}  // namespace

BoundValue BoundValue::of(double raw) { return {raw, std::min(1.0, raw)}; }

BoundValue master_bound(double delta_inf, double delta_2, std::size_t n, double epsilon) {
  check_n(n);
  require(delta_inf >= 1.0 && delta_2 >= 1.0, ErrorCode::InvalidArgument, "Delta norms must be >= 1");
  require(epsilon >= 0.0, ErrorCode::InvalidArgument, "epsilon must be >= 0");
  const double norm = std::min(delta_2, delta_inf);
  return BoundValue::of(2.0 * std::exp(-2.0 * static_cast<double>(n) * epsilon * epsilon / (norm * norm)));
}

BoundValue hmm_concentration_bound(const BoundQuery& q) {
  require(q.lipschitz_constant > 0.0, ErrorCode::InvalidArgument, "Lipschitz constant must be > 0");
  return BoundValue::of(tail_exponent_value(q.constants, q.n, q.epsilon / q.lipschitz_constant));
}

BoundValue hmm_concentration_bound_two_tailed(const BoundQuery& q) {
  return BoundValue::of(2.0 * hmm_concentration_bound(q).raw);
}

double gamma_n(const ErgodicityConstants& c, std::size_t n) { return 0.5 * std::sqrt(variance_factor(c, n)); }

ThresholdBound dkw_bound(const ErgodicityConstants& c, std::size_t n, double epsilon) {
  return {expectation_sup_bound(c, n), BoundValue::of(tail_exponent_value(c, n, epsilon))};
}

LambdaBreakdown lambda_n(const StochasticVector& rho, const ErgodicityConstants& c, std::size_t n) {
  LambdaBreakdown out{};
  out.gamma_n = gamma_n(c, n);
  const double cut = 1.0 / static_cast<double>(n);
  for (double r : rho.probs()) {
    if (r >= cut) {
      out.heavy_sqrt_sum += std::sqrt(r);
    } else {
      out.light_sqrt_sum += std::sqrt(r);
      out.light_mass_sum += r;
    }
  }
  out.heavy_term = out.gamma_n * out.heavy_sqrt_sum;
  out.light_term = std::min(out.gamma_n * out.light_sqrt_sum, out.light_mass_sum);
  out.lambda = out.heavy_term + out.light_term;
  return out;
}

ThresholdBound uniform_chernoff_bound(const StochasticVector& rho, const ErgodicityConstants& c, std::size_t n,
                                      double epsilon) {
  return {lambda_n(rho, c, n).lambda, BoundValue::of(tail_exponent_value(c, n, epsilon))};
}

double variance_bound(double rho_y, const ErgodicityConstants& c, std::size_t n) {
  require(rho_y >= 0.0 && rho_y <= 1.0, ErrorCode::InvalidArgument, "rho_y must lie in [0,1]");
  return rho_y * variance_factor(c, n);
}

double expectation_sup_bound(const ErgodicityConstants& c, std::size_t n) { return std::sqrt(variance_factor(c, n)); }

double empirical_mean_drift_bound(const ErgodicityConstants& c, std::size_t n) {
  check_n(n);
  check_constants(c);
  return c.G / ((1.0 - c.theta) * static_cast<double>(n));
}

double nonstationary_correction(const StochasticVector& pi, const StochasticVector& pi_prime) {
  return tv_distance(pi, pi_prime);
}

std::size_t burn_in_steps(const ErgodicityConstants& c, double target) {
  check_constants(c);
  require(target > 0.0, ErrorCode::InvalidArgument, "burn-in target must be > 0");
  if (c.G <= target) return 0;
  if (c.theta == 0.0) return 1;
  // Start from the closed form and settle rounding by direct evaluation.
  auto s = static_cast<std::size_t>(std::max(0.0, std::floor(std::log(target / c.G) / std::log(c.theta)) - 1.0));
  while (c.G * std::pow(c.theta, static_cast<double>(s)) > target) ++s;
  while (s > 0 && c.G * std::pow(c.theta, static_cast<double>(s - 1)) <= target) --s;
  return s;
}

}  // namespace mixconc
