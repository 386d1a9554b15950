#pragma once

#include <cstddef>

#include "mixconc/chain.hpp"
#include "mixconc/mixing.hpp"

namespace mixconc {

/// A probability bound. `raw` is the formula value, `capped` is min(1, raw).
struct BoundValue {
  double raw;
  double capped;

  static BoundValue of(double raw);
};

/// Deviation query for the concentration bound. `epsilon` is per
/// coordinate: the event is f - E f > n * epsilon.
struct BoundQuery {
  std::size_t n = 1;
  double epsilon = 0.0;
  ErgodicityConstants constants;
  double lipschitz_constant = 1.0;
};

/// Threshold/tail pair: P(statistic > threshold + epsilon) <= tail.
struct ThresholdBound {
  double threshold;
  BoundValue tail;
};

struct LambdaBreakdown {
  double gamma_n;
  double heavy_sqrt_sum;  // sum of sqrt(rho_y) over rho_y >= 1/n
  double heavy_term;      // gamma_n * heavy_sqrt_sum
  double light_sqrt_sum;  // sum of sqrt(rho_y) over rho_y < 1/n
  double light_mass_sum;  // sum of rho_y over rho_y < 1/n
  double light_term;      // min(gamma_n * light_sqrt_sum, light_mass_sum)
  double lambda;          // heavy_term + light_term
};

/// 2 exp(-2 n eps^2 / min(||D||_2, ||D||_inf)^2).
BoundValue master_bound(double delta_inf, double delta_2, std::size_t n, double epsilon);

/// One tail of the HMM concentration inequality for an L-Lipschitz f:
/// exp(-n (1-theta)^2 (eps/L)^2 / (2 G^2)). The other tail is identical.
BoundValue hmm_concentration_bound(const BoundQuery& q);
/// Both tails together: twice the one-tailed value.
BoundValue hmm_concentration_bound_two_tailed(const BoundQuery& q);

/// 1/2 sqrt((1 + 2 G theta) / (n (1 - theta))).
double gamma_n(const ErgodicityConstants& c, std::size_t n);

/// P(||rho - rho_hat||_inf > threshold + eps) <= tail, threshold = 2 gamma_n.
ThresholdBound dkw_bound(const ErgodicityConstants& c, std::size_t n, double epsilon);

LambdaBreakdown lambda_n(const StochasticVector& rho, const ErgodicityConstants& c, std::size_t n);

/// P(sup_E |rho(E) - rho_hat(E)| > Lambda_n + eps) <= tail.
ThresholdBound uniform_chernoff_bound(const StochasticVector& rho, const ErgodicityConstants& c, std::size_t n,
                                      double epsilon);

/// Var[rho_hat_y] <= rho_y (1 + 2 G theta) / (n (1 - theta)).
double variance_bound(double rho_y, const ErgodicityConstants& c, std::size_t n);

/// E ||rho - rho_hat||_inf <= sqrt((1 + 2 G theta) / (n (1 - theta))).
double expectation_sup_bound(const ErgodicityConstants& c, std::size_t n);

/// TV(E rho_hat - rho) <= G / ((1 - theta) n) for an arbitrary start.
double empirical_mean_drift_bound(const ErgodicityConstants& c, std::size_t n);

/// Additive correction TV(pi, pi') for a chain started at pi' instead of pi.
double nonstationary_correction(const StochasticVector& pi, const StochasticVector& pi_prime);

/// Smallest s >= 0 with G theta^s <= target (target > 0).
std::size_t burn_in_steps(const ErgodicityConstants& c, double target);

}  // namespace mixconc
