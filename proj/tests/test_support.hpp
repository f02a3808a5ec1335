#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

namespace esnlr::testing {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

struct RandomProblem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

/// Random linear problem y = X b + noise with a few relevant columns.
inline RandomProblem random_problem(std::uint64_t seed, Eigen::Index n, Eigen::Index m,
                                    double noise = 0.3) {
  std::mt19937_64 rng(seed);
  RandomProblem p;
  p.x = gaussian_matrix(n, m, rng);
  Eigen::VectorXd b = gaussian_vector(m, rng);
  std::bernoulli_distribution keep(0.5);
  for (Eigen::Index j = 0; j < m; ++j)
    if (!keep(rng)) b[j] = 0.0;
  b[0] += 1.0;
  p.y = p.x * b + gaussian_vector(n, rng, noise);
  return p;
}

/// Explained-variance fraction of each single column fitted alone to centered y.
inline Eigen::Index brute_force_best_single(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd yc = y.array() - y.mean();
  Eigen::Index best = 0;
  double best_value = -1.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double xy = x.col(j).dot(yc);
    const double value = xy * xy / (x.col(j).squaredNorm() * yc.squaredNorm());
    if (value > best_value) {
      best_value = value;
      best = j;
    }
  }
  return best;
}

}  // namespace esnlr::testing

namespace esnlr::testing {

/// Log marginal likelihood of y under y ~ N(0, s2 (I + sum_i q_i q_i' / lambda_i)),
/// with the noise variance s2 profiled out. Dense N x N evaluation.
inline double profiled_log_evidence(const Eigen::MatrixXd& q, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& lambdas) {
  const Eigen::Index n = y.size();
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < q.cols(); ++i) b += q.col(i) * q.col(i).transpose() / lambdas[i];
  const Eigen::LLT<Eigen::MatrixXd> llt(b);
  const Eigen::MatrixXd l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const double quad = y.dot(llt.solve(y));
  return -0.5 * static_cast<double>(n) * std::log(quad / static_cast<double>(n)) - 0.5 * log_det;
}

/// Matrix whose columns are mutually orthogonal with the given norms.
inline Eigen::MatrixXd orthogonal_columns(Eigen::Index n, const Eigen::VectorXd& norms,
                                          std::mt19937_64& rng) {
  const Eigen::MatrixXd a = gaussian_matrix(n, norms.size(), rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, norms.size());
  for (Eigen::Index j = 0; j < norms.size(); ++j) q.col(j) *= norms[j];
  return q;
}

}  // namespace esnlr::testing
