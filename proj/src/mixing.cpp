#include "mixconc/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixconc/error.hpp"

namespace mixconc {

namespace {

double pow0(double base, std::size_t e) { return e == 0 ? 1.0 : std::pow(base, static_cast<double>(e)); }

// max_s tau_s / theta^(s-1); infinite when theta = 0 and some later tau is
// above the floor.
double g_for_theta(const std::vector<double>& tau, double theta, std::size_t first, std::size_t last) {
  double g = 0.0;
  for (std::size_t s = first; s < last; ++s) {
    if (s > 0 && tau[s] <= kTauFloor) continue;
    const double denom = pow0(theta, s);
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    g = std::max(g, tau[s] / denom);
  }
  return g;
}

// Four independent partial sums, so the loop vectorizes without reassociation.
double dot(const double* a, const double* b, std::size_t len) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4)
    for (std::size_t k = 0; k < 4; ++k) acc[k] += a[i + k] * b[i + k];
  for (; i < len; ++i) acc[0] += a[i] * b[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double max_ratio(const std::vector<double>& tau, std::size_t from) {
  double best = -1.0;
  for (std::size_t s = from; s + 1 < tau.size(); ++s) {
    if (tau[s] <= kTauFloor) continue;
    const double r = tau[s + 1] <= kTauFloor ? 0.0 : tau[s + 1] / tau[s];
    best = std::max(best, r);
  }
  return best;
}

}  // namespace

ErgodicityConstants ErgodicityConstants::from_values(double G, double theta) {
  require(std::isfinite(G) && G >= 1.0, ErrorCode::InvalidArgument, "G must be >= 1");
  require(theta >= 0.0 && theta < 1.0, ErrorCode::InvalidArgument, "theta must lie in [0, 1)");
  ErgodicityConstants c;
  c.G = G;
  c.theta = theta;
  return c;
}

DeltaMatrix::DeltaMatrix(std::size_t n, std::vector<double> row_major) : n_(n), entries_(std::move(row_major)) {
  require(n_ >= 1, ErrorCode::InvalidArgument, "Delta must be at least 1x1");
  require(entries_.size() == n_ * n_, ErrorCode::DimensionMismatch, "Delta entry count mismatch");
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = entries_[i * n_ + j];
      if (i == j)
        require(v == 1.0, ErrorCode::InvalidArgument, "Delta diagonal must be 1");
      else if (j < i)
        require(v == 0.0, ErrorCode::InvalidArgument, "Delta must be zero below the diagonal");
      else
        require(v >= 0.0 && v <= 1.0, ErrorCode::InvalidArgument, "Delta entries must lie in [0,1]");
    }
}

double contraction_coefficient(const StochasticMatrix& a) {
  double kappa = 0.0;
  for (std::size_t x = 0; x < a.cols(); ++x)
    for (std::size_t y = x + 1; y < a.cols(); ++y) kappa = std::max(kappa, tv_distance(a.column(x), a.column(y)));
  return kappa;
}

ContractionCheck verify_contraction(const StochasticMatrix& a, const StochasticVector& p,
                                    const StochasticVector& q) {
  return {tv_distance(a.apply(p), a.apply(q)), contraction_coefficient(a) * tv_distance(p, q)};
}

std::vector<double> inverse_mixing_times(const StochasticMatrix& a, std::size_t horizon) {
  require(horizon >= 1, ErrorCode::InvalidArgument, "horizon must be >= 1");
  const StochasticVector pi = stationary_distribution(a);
  const std::size_t k = a.cols();
  std::vector<StochasticVector> laws;
  laws.reserve(k);
  for (std::size_t x = 0; x < k; ++x) laws.push_back(StochasticVector::point_mass(k, x));

  std::vector<double> tau(horizon, 0.0);
  for (std::size_t s = 0; s < horizon; ++s) {
    if (s > 0)
      for (auto& law : laws) law = a.apply(law);
    for (const auto& law : laws) tau[s] = std::max(tau[s], tv_distance(law, pi));
    if (tau[s] <= kTauFloor) tau[s] = 0.0;
  }
  return tau;
}

double inverse_mixing_time(const StochasticMatrix& a, std::size_t s) {
  require(s >= 1, ErrorCode::InvalidArgument, "s must be >= 1");
  const StochasticVector pi = stationary_distribution(a);
  double tau = 0.0;
  for (std::size_t x = 0; x < a.cols(); ++x)
    tau = std::max(tau, tv_distance(step_law(a, StochasticVector::point_mass(a.cols(), x), s), pi));
  return tau <= kTauFloor ? 0.0 : tau;
}

ErgodicityConstants fit_ergodicity_from_table(std::vector<double> tau) {
  const std::size_t horizon = tau.size();
  require(horizon >= 2, ErrorCode::InvalidArgument, "horizon must be >= 2");
  for (double& t : tau) {
    require(t >= 0.0 && t <= 1.0, ErrorCode::InvalidArgument, "tau values must lie in [0,1]");
    if (t <= kTauFloor) t = 0.0;
  }

  // Candidate rates: the worst one-step ratio over the whole table and over
  // its second half (the asymptotic rate), each refined on c * (1 + 2^-t).
  std::vector<double> grid;
  for (double c : {max_ratio(tau, 0), max_ratio(tau, horizon / 2)}) {
    if (c < 0.0) continue;
    grid.push_back(c);
    for (int t = 0; t <= 20; ++t) grid.push_back(c * (1.0 + std::ldexp(1.0, -t)));
  }
  if (grid.empty()) grid.push_back(0.0);  // every tau at the floor
  std::sort(grid.begin(), grid.end());

  // Stable: the supremum is not still growing at the end of the table.
  const std::size_t tail = horizon - std::max<std::size_t>(1, horizon / 4);
  for (double theta : grid) {
    if (theta >= 1.0) break;
    const double head_g = g_for_theta(tau, theta, 0, tail);
    const double tail_g = g_for_theta(tau, theta, tail, horizon);
    if (!std::isfinite(head_g) || !std::isfinite(tail_g)) continue;
    if (tail_g > head_g * (1.0 + 1e-9) && tail_g > kTauFloor) continue;

    ErgodicityConstants c;
    c.theta = theta;
    c.G = std::max(1.0, std::max(head_g, tail_g));
    c.horizon = horizon;
    c.horizon_too_short = !(tau.back() < 0.5 * tau.front());
    c.tau_table = std::move(tau);
    return c;
  }
  throw Error(ErrorCode::NoConvergence,
              "could not fit geometric-ergodicity constants within horizon " + std::to_string(horizon) +
                  "; increase the horizon");
}

ErgodicityConstants fit_ergodicity(const StochasticMatrix& a, std::size_t horizon) {
  require(horizon >= 2, ErrorCode::InvalidArgument, "horizon must be >= 2");
  return fit_ergodicity_from_table(inverse_mixing_times(a, horizon));
}

double eta_bar_exact(const JointLaw& law, std::size_t i, std::size_t j) {
  const std::size_t n = law.length;
  require(1 <= i && i < j && j <= n, ErrorCode::InvalidArgument,
          "eta_bar indices must satisfy 1 <= i < j <= n");
  const std::size_t m = law.alphabet;
  auto ipow = [m](std::size_t e) {
    std::size_t r = 1;
    while (e-- > 0) r *= m;
    return r;
  };
  const std::size_t suffix = ipow(n - j + 1);
  const std::size_t middle = ipow(j - i - 1);
  const std::size_t prefix = ipow(i);  // includes the conditioning coordinate i

  // marginal[p * suffix + s] = P(Y_1..i = p, Y_j..n = s)
  std::vector<double> marginal(prefix * suffix, 0.0);
  for (std::size_t p = 0; p < prefix; ++p)
    for (std::size_t mid = 0; mid < middle; ++mid) {
      const double* src = law.probs.data() + (p * middle + mid) * suffix;
      double* dst = marginal.data() + p * suffix;
      for (std::size_t s = 0; s < suffix; ++s) dst[s] += src[s];
    }

  std::vector<double> mass(prefix, 0.0);
  for (std::size_t p = 0; p < prefix; ++p)
    for (std::size_t s = 0; s < suffix; ++s) mass[p] += marginal[p * suffix + s];

  double best = 0.0;
  for (std::size_t y = 0; y < prefix / m; ++y)
    for (std::size_t w = 0; w < m; ++w) {
      const std::size_t pw = y * m + w;
      if (mass[pw] <= 0.0) continue;
      for (std::size_t w2 = w + 1; w2 < m; ++w2) {
        const std::size_t pw2 = y * m + w2;
        if (mass[pw2] <= 0.0) continue;
        double acc = 0.0;
        for (std::size_t s = 0; s < suffix; ++s)
          acc += std::abs(marginal[pw * suffix + s] / mass[pw] - marginal[pw2 * suffix + s] / mass[pw2]);
        best = std::max(best, 0.5 * acc);
      }
    }
  return std::min(best, 1.0);
}

double eta_bar_exact(const ChainSpec& spec, std::size_t n, std::size_t i, std::size_t j) {
  require(1 <= i && i < j && j <= n, ErrorCode::InvalidArgument,
          "eta_bar indices must satisfy 1 <= i < j <= n");
  return eta_bar_exact(exact_joint_law(spec, n), i, j);
}

DeltaMatrix exact_delta_matrix(const ChainSpec& spec, std::size_t n) {
  const JointLaw law = exact_joint_law(spec, n);
  std::vector<double> entries(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    entries[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) entries[i * n + j] = eta_bar_exact(law, i + 1, j + 1);
  }
  return DeltaMatrix(n, std::move(entries));
}

DeltaMatrix delta_matrix(const ErgodicityConstants& constants, std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "n must be >= 1");
  // Toeplitz: precompute each diagonal once.
  std::vector<double> band(n, 0.0);
  band[0] = 1.0;
  for (std::size_t d = 1; d < n; ++d) band[d] = std::min(1.0, 2.0 * constants.G * pow0(constants.theta, d));
  std::vector<double> entries(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) entries[i * n + j] = band[j - i];
  return DeltaMatrix(n, std::move(entries));
}

double delta_inf_norm(const DeltaMatrix& d) {
  double best = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = i; j < d.size(); ++j) row += d(i, j);
    best = std::max(best, row);
  }
  return best;
}

double delta_one_norm(const DeltaMatrix& d) {
  double best = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i <= j; ++i) col += d(i, j);
    best = std::max(best, col);
  }
  return best;
}

double delta_2_norm(const DeltaMatrix& d, double rel_tol, std::size_t max_iterations) {
  const std::size_t n = d.size();
  // D^T D is entrywise nonnegative, so for a positive iterate v the
  // Collatz-Wielandt ratios min_i (D^T D v)_i / v_i and max_i (...) bracket
  // its largest eigenvalue. Iteration stops once the bracket is tight.
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> u(n);
  std::vector<double> w(n);
  double previous = 0.0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = d.row(i);
      u[i] = dot(row + i, v.data() + i, n - i);
      for (std::size_t j = i; j < n; ++j) w[j] += row[j] * u[i];
    }
    double rayleigh = 0.0;  // v^T D^T D v at unit v
    for (double x : u) rayleigh += x * x;

    double lower = std::numeric_limits<double>::infinity();
    double upper = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(v[i] > 0.0)) {
        positive = false;
        break;
      }
      lower = std::min(lower, w[i] / v[i]);
      upper = std::max(upper, w[i] / v[i]);
    }
    if (positive && upper - lower <= rel_tol * upper) return std::sqrt(rayleigh);
    // Reducible D^T D can leave zero components; the Rayleigh quotient then
    // settles without the bracket closing.
    if (!positive && it > 0 && std::abs(rayleigh - previous) <= rel_tol * rel_tol * rayleigh)
      return std::sqrt(rayleigh);
    previous = rayleigh;

    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  throw Error(ErrorCode::NoConvergence,
              "power iteration for the Delta 2-norm did not converge in " + std::to_string(max_iterations) +
                  " iterations");
}

}  // namespace mixconc
