#pragma once

#include <cstddef>
#include <vector>

#include "mixconc/chain.hpp"

namespace mixconc {

constexpr std::size_t kDefaultHorizon = 64;
/// tau values at or below this are round-off and are reported as exactly 0.
constexpr double kTauFloor = 1e-13;

/// Geometric-ergodicity constants: tau_s <= G * theta^(s-1) with G >= 1 and
/// 0 <= theta < 1. When produced by fit_ergodicity, `tau_table[s-1]` holds
/// the tau_s values the fit was made against.
struct ErgodicityConstants {
  double G = 1.0;
  double theta = 0.0;
  std::vector<double> tau_table;
  std::size_t horizon = 0;
  // tau at the horizon did not drop below half of tau_1.
  bool horizon_too_short = false;

  /// Bare (G, theta) pair with no evidence attached; validates the ranges.
  static ErgodicityConstants from_values(double G, double theta);
};

/// Upper-triangular n x n matrix with unit diagonal holding eta-mixing
/// coefficients (or upper bounds on them). Indices are 0-based.
class DeltaMatrix {
 public:
  /// `row_major` must have n*n entries, unit diagonal, zeros below it and
  /// values in [0,1] above it.
  DeltaMatrix(std::size_t n, std::vector<double> row_major);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  const double* row(std::size_t i) const { return entries_.data() + i * n_; }

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

/// max over column pairs of the TV distance between the columns.
double contraction_coefficient(const StochasticMatrix& a);

struct ContractionCheck {
  double lhs;  // TV(Ap, Aq)
  double rhs;  // kappa(A) * TV(p, q)
};
ContractionCheck verify_contraction(const StochasticMatrix& a, const StochasticVector& p,
                                    const StochasticVector& q);

/// tau_s = max_x TV(A^(s-1) delta_x, pi).
double inverse_mixing_time(const StochasticMatrix& a, std::size_t s);
/// tau_1..tau_horizon in one sweep.
std::vector<double> inverse_mixing_times(const StochasticMatrix& a, std::size_t horizon);

/// Fits (G, theta) to the tau table up to `horizon` (>= 2).
ErgodicityConstants fit_ergodicity(const StochasticMatrix& a, std::size_t horizon = kDefaultHorizon);
/// Same fit against an already computed tau_1..tau_H table.
ErgodicityConstants fit_ergodicity_from_table(std::vector<double> tau_table);

/// Exact eta-bar_ij of the observation process by enumeration. i and j are
/// 1-based with 1 <= i < j <= n. Prefixes of probability zero are skipped;
/// returns 0 when no realizable pair exists.
double eta_bar_exact(const ChainSpec& spec, std::size_t n, std::size_t i, std::size_t j);
double eta_bar_exact(const JointLaw& law, std::size_t i, std::size_t j);
/// All eta-bar_ij for 1 <= i < j <= n from one enumeration.
DeltaMatrix exact_delta_matrix(const ChainSpec& spec, std::size_t n);

/// Entry (i,j), i<j, is min(1, 2 G theta^(j-i)).
DeltaMatrix delta_matrix(const ErgodicityConstants& constants, std::size_t n);

double delta_inf_norm(const DeltaMatrix& d);
double delta_one_norm(const DeltaMatrix& d);
/// Largest singular value by power iteration on D^T D from the all-ones
/// vector. Throws NoConvergence when `max_iterations` is reached.
double delta_2_norm(const DeltaMatrix& d, double rel_tol = 1e-10, std::size_t max_iterations = 100000);

}  // namespace mixconc
