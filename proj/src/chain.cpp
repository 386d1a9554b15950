#include "mixconc/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <Eigen/Dense>

#include "mixconc/error.hpp"
#include "mixconc/rng.hpp"

namespace mixconc {

namespace {

constexpr double kSumTolerance = 1e-9;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Validates entries of one distribution and returns its sum.
double checked_sum(std::span<const double> p, const std::string& what) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(std::isfinite(p[i]), ErrorCode::InvalidArgument,
            what + " entry " + std::to_string(i) + " is not finite");
    require(p[i] >= 0.0, ErrorCode::InvalidArgument,
            what + " entry " + std::to_string(i) + " is negative (" + fmt_double(p[i]) + ")");
    sum += p[i];
  }
  require(std::abs(sum - 1.0) <= kSumTolerance, ErrorCode::InvalidArgument,
          what + " sums to " + fmt_double(sum) + " (deviation " + fmt_double(sum - 1.0) + ")");
  return sum;
}

void build_cdf(std::span<const double> p, double* out) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    out[i] = acc;
  }
  // Guards against u landing past a cdf that rounds below 1.
  out[p.size() - 1] = 2.0;
}

Symbol draw(const double* cdf, std::size_t size, Engine& eng) {
  const double u = uniform01(eng);
  const double* hit = std::upper_bound(cdf, cdf + size, u);
  return static_cast<Symbol>(std::min<std::size_t>(hit - cdf, size - 1));
}

// Dense boolean matrix with bit-packed rows.
struct BoolMatrix {
  std::size_t n;
  std::size_t words;
  std::vector<std::uint64_t> bits;

  explicit BoolMatrix(std::size_t size)
      : n(size), words((size + 63) / 64), bits(size * ((size + 63) / 64), 0) {}

  bool get(std::size_t r, std::size_t c) const {
    return (bits[r * words + c / 64] >> (c % 64)) & 1u;
  }
  void set(std::size_t r, std::size_t c) { bits[r * words + c / 64] |= std::uint64_t{1} << (c % 64); }

  BoolMatrix times(const BoolMatrix& rhs) const {
    BoolMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t* dst = &out.bits[i * words];
      for (std::size_t l = 0; l < n; ++l) {
        if (!get(i, l)) continue;
        const std::uint64_t* src = &rhs.bits[l * words];
        for (std::size_t w = 0; w < words; ++w) dst[w] |= src[w];
      }
    }
    return out;
  }

  bool all_set() const {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (!get(r, c)) return false;
    return true;
  }
};

double enumeration_size(std::size_t alphabet, std::size_t n) {
  return std::pow(static_cast<double>(alphabet), static_cast<double>(n));
}

JointLaw forward_law(const StochasticVector& initial, const StochasticMatrix& a,
                     const StochasticMatrix& b, std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "sequence length must be >= 1");
  const std::size_t k = a.cols();
  const std::size_t m = b.rows();
  const double total = enumeration_size(m, n);
  require(total <= kEnumerationLimit && total * static_cast<double>(k) <= 4.0 * kEnumerationLimit,
          ErrorCode::EnumerationLimit,
          "enumeration of " + std::to_string(m) + "^" + std::to_string(n) +
              " sequences exceeds the limit of 1e7");

  // alpha[y * k + x] = P(Y_1..t = y, X_t = x)
  std::vector<double> alpha(m * k);
  for (std::size_t y = 0; y < m; ++y)
    for (std::size_t x = 0; x < k; ++x) alpha[y * k + x] = initial[x] * b(y, x);

  std::size_t prefixes = m;
  std::vector<double> pred(k);
  for (std::size_t t = 1; t < n; ++t) {
    std::vector<double> next(prefixes * m * k);
    for (std::size_t y = 0; y < prefixes; ++y) {
      std::fill(pred.begin(), pred.end(), 0.0);
      for (std::size_t x = 0; x < k; ++x) {
        const double w = alpha[y * k + x];
        if (w == 0.0) continue;
        const auto col = a.column(x);
        for (std::size_t x2 = 0; x2 < k; ++x2) pred[x2] += w * col[x2];
      }
      for (std::size_t y2 = 0; y2 < m; ++y2)
        for (std::size_t x2 = 0; x2 < k; ++x2)
          next[(y * m + y2) * k + x2] = pred[x2] * b(y2, x2);
    }
    alpha = std::move(next);
    prefixes *= m;
  }

  JointLaw law{m, n, std::vector<double>(prefixes, 0.0)};
  for (std::size_t y = 0; y < prefixes; ++y) {
    double s = 0.0;
    for (std::size_t x = 0; x < k; ++x) s += alpha[y * k + x];
    law.probs[y] = s;
  }
  return law;
}

}  // namespace

// ---------------------------------------------------------------------------

StochasticVector::StochasticVector(std::vector<double> probs) : probs_(std::move(probs)) {
  require(!probs_.empty(), ErrorCode::InvalidArgument, "distribution must be nonempty");
  const double sum = checked_sum(probs_, "distribution");
  for (double& v : probs_) v /= sum;
}

StochasticVector StochasticVector::point_mass(std::size_t size, std::size_t at) {
  require(at < size, ErrorCode::InvalidArgument, "point mass index out of range");
  std::vector<double> p(size, 0.0);
  p[at] = 1.0;
  return StochasticVector(std::move(p));
}

StochasticVector StochasticVector::uniform(std::size_t size) {
  require(size > 0, ErrorCode::InvalidArgument, "distribution must be nonempty");
  return StochasticVector(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

StochasticMatrix::StochasticMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major)
    : rows_(rows), cols_(cols), data_(std::move(column_major)) {
  require(rows_ > 0 && cols_ > 0, ErrorCode::InvalidArgument, "kernel must be nonempty");
  require(data_.size() == rows_ * cols_, ErrorCode::DimensionMismatch,
          "kernel data has " + std::to_string(data_.size()) + " entries, expected " +
              std::to_string(rows_ * cols_));
  for (std::size_t c = 0; c < cols_; ++c) {
    std::span<double> col{data_.data() + c * rows_, rows_};
    const double sum = checked_sum(col, "kernel column " + std::to_string(c));
    for (double& v : col) v /= sum;
  }
}

StochasticMatrix StochasticMatrix::from_source_rows(const std::vector<std::vector<double>>& sources) {
  require(!sources.empty(), ErrorCode::InvalidArgument, "kernel must have at least one row");
  const std::size_t targets = sources.front().size();
  std::vector<double> data;
  data.reserve(sources.size() * targets);
  for (std::size_t x = 0; x < sources.size(); ++x) {
    require(sources[x].size() == targets, ErrorCode::DimensionMismatch,
            "row " + std::to_string(x) + " has " + std::to_string(sources[x].size()) +
                " entries, expected " + std::to_string(targets));
    data.insert(data.end(), sources[x].begin(), sources[x].end());
  }
  return StochasticMatrix(targets, sources.size(), std::move(data));
}

StochasticMatrix StochasticMatrix::identity(std::size_t size) {
  std::vector<double> data(size * size, 0.0);
  for (std::size_t i = 0; i < size; ++i) data[i * size + i] = 1.0;
  return StochasticMatrix(size, size, std::move(data));
}

StochasticMatrix StochasticMatrix::rank_one(const StochasticVector& column, std::size_t cols) {
  std::vector<double> data;
  data.reserve(column.size() * cols);
  for (std::size_t c = 0; c < cols; ++c) data.insert(data.end(), column.probs().begin(), column.probs().end());
  return StochasticMatrix(column.size(), cols, std::move(data));
}

StochasticVector StochasticMatrix::apply(const StochasticVector& p) const {
  require(p.size() == cols_, ErrorCode::DimensionMismatch,
          "kernel has " + std::to_string(cols_) + " columns but vector has " + std::to_string(p.size()) +
              " entries");
  std::vector<double> out(rows_, 0.0);
  for (std::size_t c = 0; c < cols_; ++c) {
    const double w = p[c];
    if (w == 0.0) continue;
    const double* col = data_.data() + c * rows_;
    for (std::size_t r = 0; r < rows_; ++r) out[r] += w * col[r];
  }
  return StochasticVector(std::move(out));
}

StochasticMatrix StochasticMatrix::compose(const StochasticMatrix& rhs) const {
  require(cols_ == rhs.rows_, ErrorCode::DimensionMismatch, "kernel shapes do not compose");
  std::vector<double> out(rows_ * rhs.cols_, 0.0);
  for (std::size_t c = 0; c < rhs.cols_; ++c) {
    double* dst = out.data() + c * rows_;
    for (std::size_t l = 0; l < cols_; ++l) {
      const double w = rhs(l, c);
      if (w == 0.0) continue;
      const double* col = data_.data() + l * rows_;
      for (std::size_t r = 0; r < rows_; ++r) dst[r] += w * col[r];
    }
  }
  return StochasticMatrix(rows_, rhs.cols_, std::move(out));
}

StochasticMatrix StochasticMatrix::power(unsigned m) const {
  require(square(), ErrorCode::DimensionMismatch, "only square kernels have powers");
  StochasticMatrix result = identity(rows_);
  StochasticMatrix base = *this;
  while (m > 0) {
    if (m & 1u) result = base.compose(result);
    m >>= 1;
    if (m > 0) base = base.compose(base);
  }
  return result;
}

ChainSpec::ChainSpec(StochasticVector initial, StochasticMatrix transition,
                     std::optional<StochasticMatrix> emission, std::string name)
    : initial_(std::move(initial)),
      transition_(std::move(transition)),
      emission_(std::move(emission)),
      name_(std::move(name)) {
  require(transition_.square(), ErrorCode::DimensionMismatch,
          "transition kernel must be square, got " + std::to_string(transition_.rows()) + "x" +
              std::to_string(transition_.cols()));
  require(initial_.size() == transition_.cols(), ErrorCode::DimensionMismatch,
          "initial distribution has " + std::to_string(initial_.size()) + " entries but the chain has " +
              std::to_string(transition_.cols()) + " states");
  if (emission_)
    require(emission_->cols() == transition_.cols(), ErrorCode::DimensionMismatch,
            "emission kernel has " + std::to_string(emission_->cols()) + " source states, expected " +
                std::to_string(transition_.cols()));
}

StochasticMatrix ChainSpec::emission_or_identity() const {
  return emission_ ? *emission_ : StochasticMatrix::identity(state_count());
}

ChainSpec ChainSpec::with_initial(StochasticVector initial) const {
  return ChainSpec(std::move(initial), transition_, emission_, name_);
}

ChainSpec ChainSpec::with_emission(std::optional<StochasticMatrix> emission) const {
  return ChainSpec(initial_, transition_, std::move(emission), name_);
}

double JointLaw::at(std::span<const Symbol> seq) const {
  require(seq.size() == length, ErrorCode::DimensionMismatch, "sequence length mismatch");
  std::size_t idx = 0;
  for (Symbol s : seq) {
    require(s < alphabet, ErrorCode::InvalidArgument, "symbol out of range");
    idx = idx * alphabet + s;
  }
  return probs[idx];
}

std::vector<Symbol> JointLaw::decode(std::size_t index) const {
  std::vector<Symbol> seq(length);
  for (std::size_t t = length; t-- > 0;) {
    seq[t] = static_cast<Symbol>(index % alphabet);
    index /= alphabet;
  }
  return seq;
}

// ---------------------------------------------------------------------------

double tv_distance(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), ErrorCode::DimensionMismatch,
          "tv_distance: sizes " + std::to_string(p.size()) + " and " + std::to_string(q.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return std::min(1.0, 0.5 * s);
}

double tv_distance(const StochasticVector& p, const StochasticVector& q) {
  return tv_distance(p.probs(), q.probs());
}

bool check_ergodic(const StochasticMatrix& a) {
  if (!a.square()) return false;
  const std::size_t k = a.rows();
  BoolMatrix pattern(k);
  for (std::size_t to = 0; to < k; ++to)
    for (std::size_t from = 0; from < k; ++from)
      if (a(to, from) > 0.0) pattern.set(to, from);

  // A^m > 0 implies A^m' > 0 for all m' >= m, so testing the Wielandt
  // exponent (k-1)^2 + 1 by repeated squaring suffices.
  std::uint64_t exponent = static_cast<std::uint64_t>(k - 1) * (k - 1) + 1;
  std::optional<BoolMatrix> result;
  BoolMatrix base = pattern;
  while (exponent > 0) {
    if (exponent & 1u) result = result ? result->times(base) : base;
    exponent >>= 1;
    if (exponent > 0) base = base.times(base);
  }
  return result->all_set();
}

StochasticVector stationary_distribution(const StochasticMatrix& a) {
  require(check_ergodic(a), ErrorCode::NotErgodic,
          "transition kernel is not ergodic (reducible or periodic); no unique stationary distribution");
  const auto k = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXd m(k, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c) m(r, c) = a(r, c) - (r == c ? 1.0 : 0.0);
  // (A - I) has rank k-1; swap its last equation for normalization.
  m.row(k - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(k - 1) = 1.0;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  Eigen::VectorXd pi = lu.solve(rhs);
  for (int round = 0; round < 3; ++round) pi += lu.solve(rhs - m * pi);

  std::vector<double> probs(pi.data(), pi.data() + k);
  for (double& v : probs) v = std::max(v, 0.0);
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& v : probs) v /= sum;
  return StochasticVector(std::move(probs));
}

StochasticVector step_law(const StochasticMatrix& a, const StochasticVector& p, std::size_t s) {
  require(s >= 1, ErrorCode::InvalidArgument, "step index s must be >= 1");
  StochasticVector cur = p;
  for (std::size_t i = 1; i < s; ++i) cur = a.apply(cur);
  return cur;
}

StochasticVector emit_law(const StochasticMatrix& b, const StochasticVector& p) { return b.apply(p); }

StochasticVector observation_stationary(const ChainSpec& spec) {
  const StochasticVector pi = stationary_distribution(spec.transition());
  return spec.emission() ? spec.emission()->apply(pi) : pi;
}

TrajectorySampler::TrajectorySampler(const ChainSpec& spec)
    : states_(spec.state_count()),
      symbols_(spec.symbol_count()),
      emits_(spec.has_emission()),
      initial_cdf_(states_),
      transition_cdf_(states_ * states_) {
  build_cdf(spec.initial().probs(), initial_cdf_.data());
  for (std::size_t x = 0; x < states_; ++x)
    build_cdf(spec.transition().column(x), transition_cdf_.data() + x * states_);
  if (emits_) {
    emission_cdf_.resize(symbols_ * states_);
    for (std::size_t x = 0; x < states_; ++x)
      build_cdf(spec.emission()->column(x), emission_cdf_.data() + x * symbols_);
  }
}

void TrajectorySampler::sample(std::size_t n, std::uint64_t seed, std::vector<Symbol>& observations,
                               std::vector<Symbol>* hidden) const {
  require(n >= 1, ErrorCode::InvalidArgument, "trajectory length must be >= 1");
  Engine eng(seed);
  observations.resize(n);
  if (hidden) hidden->resize(n);
  Symbol x = draw(initial_cdf_.data(), states_, eng);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) x = draw(transition_cdf_.data() + x * states_, states_, eng);
    if (hidden) (*hidden)[i] = x;
    observations[i] = emits_ ? draw(emission_cdf_.data() + x * symbols_, symbols_, eng) : x;
  }
}

Trajectory sample_trajectory(const ChainSpec& spec, std::size_t n, std::uint64_t seed, bool keep_hidden) {
  Trajectory t;
  t.alphabet = spec.symbol_count();
  TrajectorySampler(spec).sample(n, seed, t.observations, keep_hidden ? &t.hidden : nullptr);
  return t;
}

JointLaw exact_joint_law(const ChainSpec& spec, std::size_t n) {
  return forward_law(spec.initial(), spec.transition(), spec.emission_or_identity(), n);
}

JointLaw exact_hidden_law(const ChainSpec& spec, std::size_t n) {
  return forward_law(spec.initial(), spec.transition(), StochasticMatrix::identity(spec.state_count()), n);
}

}  // namespace mixconc
