#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixconc {

using Symbol = std::uint32_t;

/// Probability vector over states 0..k-1. Entries are nonnegative and the
/// input must sum to 1 within 1e-9; the stored copy is renormalized.
class StochasticVector {
 public:
  explicit StochasticVector(std::vector<double> probs);

  static StochasticVector point_mass(std::size_t size, std::size_t at);
  static StochasticVector uniform(std::size_t size);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }

  friend bool operator==(const StochasticVector&, const StochasticVector&) = default;

 private:
  std::vector<double> probs_;
};

/// Column-stochastic kernel. Entry (to, from) is the probability of landing
/// on `to` given `from`, so column `from` is a distribution over `rows()`
/// targets. Transition kernels are square; emission kernels are m x k.
class StochasticMatrix {
 public:
  /// `column_major` holds rows*cols entries, column after column.
  StochasticMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major);

  /// Builds from the row-per-source layout used in spec files: sources[x]
  /// is the distribution of the target given source x.
  static StochasticMatrix from_source_rows(const std::vector<std::vector<double>>& sources);
  static StochasticMatrix identity(std::size_t size);
  /// Every column equal to `column`.
  static StochasticMatrix rank_one(const StochasticVector& column, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double operator()(std::size_t to, std::size_t from) const { return data_[from * rows_ + to]; }
  std::span<const double> column(std::size_t from) const {
    return {data_.data() + from * rows_, rows_};
  }

  /// Matrix-vector product; requires p.size() == cols().
  StochasticVector apply(const StochasticVector& p) const;
  /// (*this) * rhs, i.e. first rhs then *this.
  StochasticMatrix compose(const StochasticMatrix& rhs) const;
  /// m-step kernel by repeated squaring; power(0) is the identity.
  StochasticMatrix power(unsigned m) const;

  friend bool operator==(const StochasticMatrix&, const StochasticMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A Markov chain (initial, transition) or an HMM (initial, transition,
/// emission). Without an emission kernel the states are observed directly.
class ChainSpec {
 public:
  ChainSpec(StochasticVector initial, StochasticMatrix transition,
            std::optional<StochasticMatrix> emission = std::nullopt, std::string name = {});

  std::size_t state_count() const noexcept { return transition_.cols(); }
  std::size_t symbol_count() const noexcept {
    return emission_ ? emission_->rows() : transition_.cols();
  }
  bool has_emission() const noexcept { return emission_.has_value(); }

  const StochasticVector& initial() const noexcept { return initial_; }
  const StochasticMatrix& transition() const noexcept { return transition_; }
  const std::optional<StochasticMatrix>& emission() const noexcept { return emission_; }
  StochasticMatrix emission_or_identity() const;
  const std::string& name() const noexcept { return name_; }

  ChainSpec with_initial(StochasticVector initial) const;
  ChainSpec with_emission(std::optional<StochasticMatrix> emission) const;
  /// The same kernel, observed directly.
  ChainSpec underlying_markov() const { return with_emission(std::nullopt); }

 private:
  StochasticVector initial_;
  StochasticMatrix transition_;
  std::optional<StochasticMatrix> emission_;
  std::string name_;
};

struct Trajectory {
  std::vector<Symbol> observations;
  std::vector<Symbol> hidden;  // empty unless requested
  std::size_t alphabet = 0;    // observation alphabet size
};

/// Law of a length-n sequence over `alphabet` symbols, indexed
/// lexicographically with coordinate 0 most significant.
struct JointLaw {
  std::size_t alphabet = 0;
  std::size_t length = 0;
  std::vector<double> probs;

  double at(std::span<const Symbol> seq) const;
  std::vector<Symbol> decode(std::size_t index) const;
};

constexpr double kEnumerationLimit = 1e7;

double tv_distance(std::span<const double> p, std::span<const double> q);
double tv_distance(const StochasticVector& p, const StochasticVector& q);

/// Primitivity test: some power A^m with m <= (k-1)^2 + 1 is entrywise
/// positive. Non-square kernels are never ergodic.
bool check_ergodic(const StochasticMatrix& a);

/// Unique pi with A pi = pi. Throws NotErgodic for reducible or periodic A.
StochasticVector stationary_distribution(const StochasticMatrix& a);

/// Law of X_s given X_1 ~ p, i.e. A^(s-1) p, by repeated application.
StochasticVector step_law(const StochasticMatrix& a, const StochasticVector& p, std::size_t s);

/// B p.
StochasticVector emit_law(const StochasticMatrix& b, const StochasticVector& p);

/// Stationary law of the observations, B pi.
StochasticVector observation_stationary(const ChainSpec& spec);

/// Precomputed inverse-CDF tables for repeated sampling from one spec.
/// Immutable after construction; share freely across threads.
class TrajectorySampler {
 public:
  explicit TrajectorySampler(const ChainSpec& spec);

  /// Fills `observations` (and `hidden` when non-null) with a length-n draw
  /// from the stream seeded by `seed`. Output vectors are resized.
  void sample(std::size_t n, std::uint64_t seed, std::vector<Symbol>& observations,
              std::vector<Symbol>* hidden = nullptr) const;

  std::size_t alphabet() const noexcept { return symbols_; }

 private:
  std::size_t states_;
  std::size_t symbols_;
  bool emits_;
  std::vector<double> initial_cdf_;
  std::vector<double> transition_cdf_;  // column-major, one cdf per source
  std::vector<double> emission_cdf_;
};

Trajectory sample_trajectory(const ChainSpec& spec, std::size_t n, std::uint64_t seed,
                             bool keep_hidden = false);

/// Exact law of (Y_1..Y_n). Throws EnumerationLimit above 1e7 sequences.
JointLaw exact_joint_law(const ChainSpec& spec, std::size_t n);
/// Exact law of the underlying (X_1..X_n).
JointLaw exact_hidden_law(const ChainSpec& spec, std::size_t n);

}  // namespace mixconc
