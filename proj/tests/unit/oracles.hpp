#pragma once

// Independent reference computations used to check the library. They avoid
// the library's own algorithms: dense Eigen linear algebra and brute-force
// enumeration only.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mixconc/chain.hpp"
#include "mixconc/mixing.hpp"

namespace oracle {

inline Eigen::MatrixXd dense(const mixconc::StochasticMatrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m(r, c) = a(r, c);
  return m;
}

inline Eigen::MatrixXd dense(const mixconc::DeltaMatrix& d) {
  Eigen::MatrixXd m(d.size(), d.size());
  for (std::size_t r = 0; r < d.size(); ++r)
    for (std::size_t c = 0; c < d.size(); ++c) m(r, c) = d(r, c);
  return m;
}

// Stationary law as the eigenvector for the eigenvalue closest to 1.
inline std::vector<double> stationary(const mixconc::StochasticMatrix& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(dense(a));
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i) - 1.0) < std::abs(es.eigenvalues()(best) - 1.0)) best = i;
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  v /= v.sum();
  return {v.data(), v.data() + v.size()};
}

inline double tv(const Eigen::VectorXd& p, const Eigen::VectorXd& q) { return 0.5 * (p - q).cwiseAbs().sum(); }

// Total variation as a supremum over all events, by subset enumeration.
inline double tv_by_events(const std::vector<double>& p, const std::vector<double>& q) {
  double best = 0.0;
  const std::size_t k = p.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    double diff = 0.0;
    for (std::size_t y = 0; y < k; ++y)
      if (mask >> y & 1) diff += p[y] - q[y];
    best = std::max(best, std::abs(diff));
  }
  return best;
}

// Largest singular value by a full SVD.
inline double spectral_norm(const mixconc::DeltaMatrix& d) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense(d));
  return svd.singularValues()(0);
}

// sigma_max of [[1, a], [0, 1]].
inline double two_by_two_norm(double a) { return std::sqrt(1.0 + a * a / 2.0 + a * std::sqrt(1.0 + a * a / 4.0)); }

}  // namespace oracle
