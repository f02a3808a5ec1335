#pragma once

// Orthogonal forward regression (OFR) and its locally regularized variants.
//
// Candidates are orthogonalized incrementally with modified Gram-Schmidt: every
// unselected column is kept orthogonal to the selected q's, so evaluating a
// candidate's criterion is a pair of dot products. Each newly selected column
// gets one extra re-orthogonalization pass against Q before it is committed.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "esnlr/csv.hpp"
#include "esnlr/error.hpp"

namespace esnlr {

inline constexpr double kLambdaFloor = 1e-12;
inline constexpr double kLambdaCeiling = 1e12;
// A candidate whose orthogonalized energy drops below this fraction of its
// original energy is collinear with the selected set.
inline constexpr double kDegeneracyFloor = 1e-10;
// g_i^2 below this is treated as an exactly zero weight by the evidence update.
inline constexpr double kWeightFloor = 1e-300;

enum class Criterion { Err, Rerr, Crerr };
enum class Termination { AllSelected, Tolerance, NonpositiveCrerr };

inline const char* to_string(Criterion c) {
  switch (c) {
    case Criterion::Err: return "ERR";
    case Criterion::Rerr: return "RERR";
    case Criterion::Crerr: return "CRERR";
  }
  return "?";
}

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::AllSelected: return "ALL_SELECTED";
    case Termination::Tolerance: return "TOLERANCE";
    case Termination::NonpositiveCrerr: return "NONPOSITIVE_CRERR";
  }
  return "?";
}

/// Design matrix plus a zero-mean response. The removed mean is kept as the
/// offset that predictions add back.
class RegressionProblem {
 public:
  RegressionProblem(Eigen::MatrixXd design, const Eigen::VectorXd& response)
      : design_(std::move(design)) {
    require(design_.rows() >= 2, ErrorKind::InvalidArgument, "regression needs at least 2 samples");
    require(design_.cols() >= 1, ErrorKind::InvalidArgument, "regression needs at least 1 candidate");
    require(response.size() == design_.rows(), ErrorKind::DimensionMismatch,
            "response length does not match design rows");
    require(design_.allFinite() && response.allFinite(), ErrorKind::NonFinite,
            "design or response has non-finite entries");
    offset_ = response.mean();
    response_ = response.array() - offset_;
    energy_ = response_.squaredNorm();
    require(energy_ > 0.0, ErrorKind::InvalidArgument, "response has zero variance");
  }

  const Eigen::MatrixXd& design() const { return design_; }
  const Eigen::VectorXd& response() const { return response_; }
  double response_offset() const { return offset_; }
  /// y'y of the centered response.
  double energy() const { return energy_; }
  Eigen::Index samples() const { return design_.rows(); }
  Eigen::Index candidates() const { return design_.cols(); }

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd response_;
  double offset_ = 0.0;
  double energy_ = 0.0;
};

struct SelectionStep {
  int candidate = -1;
  double criterion = 0.0;
  double unexplained_ratio = 1.0;
};

struct SelectionTrace {
  std::vector<SelectionStep> steps;
  Criterion criterion = Criterion::Err;
  Termination terminated_by = Termination::AllSelected;
  /// Candidates skipped permanently because they became collinear.
  std::vector<int> degenerate;
};

/// Orthogonal decomposition of the selected columns: X_sel = Q R.
struct OrthogonalState {
  std::vector<int> selected;  // original column indices, selection order
  Eigen::MatrixXd q;          // N x k
  Eigen::MatrixXd r;          // k x k, unit upper triangular
  Eigen::VectorXd g;          // orthogonal-space weights
  Eigen::VectorXd lambdas;    // regularization used for each g_i (0 for plain OFR)
  Eigen::VectorXd residual;   // e = y - Q g
  double response_energy = 0.0;

  std::size_t size() const { return selected.size(); }

  Eigen::VectorXd q_energy() const { return q.colwise().squaredNorm().transpose(); }

  /// Weights for the selected columns of X, by back-substitution R beta = g.
  Eigen::VectorXd weights() const {
    if (selected.empty()) return {};
    return r.triangularView<Eigen::UnitUpper>().solve(g);
  }
};

struct RegularizationVector {
  Eigen::VectorXd lambdas;
  int iteration_count = 0;
  bool converged = false;
  /// Positions whose weight vanished and were pushed to the ceiling.
  std::vector<int> zero_weight;
};

struct PassOptions {
  Criterion criterion = Criterion::Err;
  std::optional<double> tolerance;
  double dopt_beta = 0.0;
};

/// One forward-selection pass over a candidate pool.
struct SelectionPass {
  SelectionTrace trace;
  OrthogonalState state;
  std::vector<int> pool;         // ascending original indices
  Eigen::VectorXd pool_lambdas;  // aligned with pool
};

namespace detail {

inline double criterion_value(Criterion kind, double qq, double qe, double lambda, double beta,
                              double yy) {
  switch (kind) {
    case Criterion::Err:
      return qe * qe / (qq * yy);
    case Criterion::Rerr:
      return qe * qe / ((qq + lambda) * yy);
    case Criterion::Crerr: {
      const double g = qe / (qq + lambda);
      return (g * g * (qq + lambda) + beta * std::log(qq)) / yy;
    }
  }
  return 0.0;
}

inline void check_tolerance(const std::optional<double>& tolerance) {
  if (tolerance) {
    require(*tolerance > 0.0 && *tolerance < 1.0, ErrorKind::InvalidArgument,
            "tolerance must lie in (0, 1)");
  }
}

}  // namespace detail

/// Greedy forward selection over `pool` (any order; lambdas aligned with it).
/// Ties go to the lowest original column index.
inline SelectionPass forward_pass(const RegressionProblem& problem, std::span<const int> pool_in,
                                  const Eigen::VectorXd& lambdas_in, const PassOptions& options) {
  detail::check_tolerance(options.tolerance);
  require(!pool_in.empty(), ErrorKind::InvalidArgument, "empty candidate pool");
  require(static_cast<Eigen::Index>(pool_in.size()) == lambdas_in.size(),
          ErrorKind::DimensionMismatch, "pool and lambda vector differ in length");
  if (options.criterion == Criterion::Crerr) {
    require(options.dopt_beta > 0.0, ErrorKind::InvalidArgument, "D-optimality beta must be > 0");
  }

  const auto& X = problem.design();
  const Eigen::Index n = problem.samples();
  const auto c = static_cast<Eigen::Index>(pool_in.size());

  std::vector<Eigen::Index> order(pool_in.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return pool_in[a] < pool_in[b]; });

  SelectionPass pass;
  pass.pool.resize(pool_in.size());
  pass.pool_lambdas.resize(c);
  for (Eigen::Index j = 0; j < c; ++j) {
    const int col = pool_in[order[j]];
    require(col >= 0 && col < X.cols(), ErrorKind::InvalidArgument, "candidate index out of range");
    require(j == 0 || col != pass.pool[j - 1], ErrorKind::InvalidArgument,
            "duplicate candidate index");
    pass.pool[j] = col;
    pass.pool_lambdas[j] = lambdas_in[order[j]];
    if (options.criterion != Criterion::Err) {
      require(pass.pool_lambdas[j] >= 0.0, ErrorKind::InvalidArgument, "negative lambda");
    }
  }

  Eigen::MatrixXd work(n, c);
  for (Eigen::Index j = 0; j < c; ++j) work.col(j) = X.col(pass.pool[j]);
  const Eigen::VectorXd base_energy = work.colwise().squaredNorm().transpose();

  enum : char { kActive = 0, kSelected = 1, kDegenerate = 2 };
  std::vector<char> status(pool_in.size(), kActive);
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(c, c);  // (step, column) MGS coefficients
  Eigen::MatrixXd q(n, c);
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(c, c);
  Eigen::VectorXd g(c), lam(c), q_energy(c);
  Eigen::VectorXd e = problem.response();
  const double yy = problem.energy();

  pass.trace.criterion = options.criterion;
  pass.trace.terminated_by = Termination::AllSelected;
  double unexplained = 1.0;
  Eigen::Index k = 0;

  while (k < c) {
    const Eigen::VectorXd qq = work.colwise().squaredNorm().transpose();
    const Eigen::VectorXd qe = work.transpose() * e;

    Eigen::Index best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < c; ++j) {
      if (status[j] != kActive) continue;
      if (!(base_energy[j] > 0.0) || !(qq[j] >= kDegeneracyFloor * base_energy[j])) {
        status[j] = kDegenerate;
        pass.trace.degenerate.push_back(pass.pool[j]);
        continue;
      }
      const double lambda = options.criterion == Criterion::Err ? 0.0 : pass.pool_lambdas[j];
      const double value =
          detail::criterion_value(options.criterion, qq[j], qe[j], lambda, options.dopt_beta, yy);
      if (best < 0 || value > best_value) {
        best = j;
        best_value = value;
      }
    }
    if (best < 0) break;
    if (options.criterion == Criterion::Crerr && !(best_value > 0.0)) {
      pass.trace.terminated_by = Termination::NonpositiveCrerr;
      break;
    }

    Eigen::VectorXd qk = work.col(best);
    if (k > 0) {
      const Eigen::VectorXd corr =
          (q.leftCols(k).transpose() * qk).cwiseQuotient(q_energy.head(k));
      qk.noalias() -= q.leftCols(k) * corr;
      coeff.col(best).head(k) += corr;
    }
    const double qqk = qk.squaredNorm();
    const double qek = qk.dot(e);
    const double lambda = options.criterion == Criterion::Err ? 0.0 : pass.pool_lambdas[best];
    const double gk = qek / (qqk + lambda);
    const double value =
        detail::criterion_value(options.criterion, qqk, qek, lambda, options.dopt_beta, yy);

    e.noalias() -= gk * qk;
    q.col(k) = qk;
    r.col(k).head(k) = coeff.col(best).head(k);
    g[k] = gk;
    lam[k] = lambda;
    q_energy[k] = qqk;
    status[best] = kSelected;
    pass.state.selected.push_back(pass.pool[best]);

    unexplained -= value;
    pass.trace.steps.push_back({pass.pool[best], value, unexplained});

    const Eigen::RowVectorXd a = (qk.transpose() * work) / qqk;
    coeff.row(k) = a;
    work.noalias() -= qk * a;
    ++k;

    if (options.tolerance && unexplained < *options.tolerance) {
      pass.trace.terminated_by = Termination::Tolerance;
      break;
    }
  }

  if (k == 0 && pass.trace.degenerate.size() == pool_in.size()) {
    throw Error(ErrorKind::AllCandidatesDegenerate, "every candidate column is degenerate");
  }

  pass.state.q = q.leftCols(k);
  pass.state.r = r.topLeftCorner(k, k);
  pass.state.g = g.head(k);
  pass.state.lambdas = lam.head(k);
  pass.state.residual = std::move(e);
  pass.state.response_energy = yy;
  return pass;
}

/// Plain OFR with the error reduction ratio. Without a tolerance every usable
/// column is selected (analysis mode).
inline std::pair<SelectionTrace, OrthogonalState> ofr_select(
    const RegressionProblem& problem, std::optional<double> tolerance = std::nullopt) {
  std::vector<int> pool(static_cast<std::size_t>(problem.candidates()));
  std::iota(pool.begin(), pool.end(), 0);
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(problem.candidates());
  auto pass = forward_pass(problem, pool, zeros, {Criterion::Err, tolerance, 0.0});
  return {std::move(pass.trace), std::move(pass.state)};
}

/// Evidence re-estimation of the per-regressor regularization of a fitted
/// sub-model: lambda_i = gamma_i sigma^2 / g_i^2 with
/// gamma_i = q_i'q_i / (q_i'q_i + lambda_i) and sigma^2 = e'e / (N - sum gamma).
inline RegularizationVector evidence_update(const OrthogonalState& state,
                                            const RegularizationVector& lambdas, int n_samples) {
  const auto k = static_cast<Eigen::Index>(state.size());
  require(lambdas.lambdas.size() == k, ErrorKind::DimensionMismatch,
          "lambda vector does not match the sub-model");
  require(n_samples > k, ErrorKind::InvalidArgument, "need more samples than selected regressors");

  const Eigen::VectorXd qq = state.q_energy();
  Eigen::VectorXd gamma(k);
  for (Eigen::Index i = 0; i < k; ++i) gamma[i] = qq[i] / (qq[i] + lambdas.lambdas[i]);
  const double sigma2 = state.residual.squaredNorm() / (n_samples - gamma.sum());

  RegularizationVector out;
  out.lambdas.resize(k);
  out.iteration_count = lambdas.iteration_count + 1;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double g2 = state.g[i] * state.g[i];
    if (!(g2 >= kWeightFloor)) {
      out.lambdas[i] = kLambdaCeiling;
      out.zero_weight.push_back(static_cast<int>(i));
      continue;
    }
    out.lambdas[i] = std::clamp(gamma[i] * sigma2 / g2, kLambdaFloor, kLambdaCeiling);
  }
  return out;
}

struct LrofrOptions {
  double initial_lambda = 0.01;
  int max_outer_iters = 10;
  double lambda_rel_tol = 1e-3;
  std::optional<double> tolerance;  // ignored by the D-optimality variant
};

struct LrofrResult {
  std::vector<SelectionPass> passes;  // one per outer iteration
  RegularizationVector lambdas;       // lambdas used by the final pass, selection order
  Eigen::VectorXd weights;            // original-space weights, selection order
  std::vector<int> selected;          // original column indices, selection order

  const OrthogonalState& final_state() const { return passes.back().state; }
  const SelectionTrace& analysis_trace() const { return passes.front().trace; }

  /// Weights scattered back to original column order; unselected columns get 0.
  Eigen::VectorXd weights_in_original_order(Eigen::Index columns) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(columns);
    for (std::size_t i = 0; i < selected.size(); ++i) full[selected[i]] = weights[static_cast<Eigen::Index>(i)];
    return full;
  }
};

namespace detail {

inline LrofrResult run_lrofr(const RegressionProblem& problem, const LrofrOptions& options,
                             const PassOptions& pass_options) {
  require(options.initial_lambda > 0.0, ErrorKind::InvalidArgument, "initial lambda must be > 0");
  require(options.max_outer_iters >= 1, ErrorKind::InvalidArgument, "need at least one iteration");
  require(options.lambda_rel_tol > 0.0, ErrorKind::InvalidArgument, "lambda tolerance must be > 0");

  const auto n = static_cast<int>(problem.samples());
  std::vector<int> pool(static_cast<std::size_t>(problem.candidates()));
  std::iota(pool.begin(), pool.end(), 0);
  Eigen::VectorXd pool_lambdas = Eigen::VectorXd::Constant(problem.candidates(), options.initial_lambda);

  LrofrResult result;
  for (int it = 1; it <= options.max_outer_iters; ++it) {
    SelectionPass pass = forward_pass(problem, pool, pool_lambdas, pass_options);
    if (pass.state.size() == 0) {
      if (it == 1) {
        throw Error(ErrorKind::BetaTooLarge, "no candidate has positive crerr in the first pass");
      }
      break;
    }

    RegularizationVector used;
    used.lambdas = pass.state.lambdas;
    used.iteration_count = it - 1;
    RegularizationVector updated = evidence_update(pass.state, used, n);

    double change = 0.0;
    for (Eigen::Index i = 0; i < used.lambdas.size(); ++i) {
      change = std::max(change, std::abs(updated.lambdas[i] - used.lambdas[i]) / used.lambdas[i]);
    }

    result.selected = pass.state.selected;
    result.weights = pass.state.weights();
    result.lambdas = used;
    result.lambdas.iteration_count = it;
    result.lambdas.zero_weight = updated.zero_weight;
    result.lambdas.converged = change <= options.lambda_rel_tol;

    pool = pass.state.selected;
    pool_lambdas = updated.lambdas;
    result.passes.push_back(std::move(pass));
    if (result.lambdas.converged) break;
  }
  return result;
}

}  // namespace detail

/// Locally regularized OFR: rerr-driven passes, each over the previous
/// sub-model, with evidence updates of lambda in between.
inline LrofrResult lrofr_fit(const RegressionProblem& problem, const LrofrOptions& options = {}) {
  detail::check_tolerance(options.tolerance);
  return detail::run_lrofr(problem, options, {Criterion::Rerr, options.tolerance, 0.0});
}

/// LROFR with the D-optimality cost; each pass stops on its own once no
/// remaining candidate has positive crerr.
inline LrofrResult lrofr_dopt_fit(const RegressionProblem& problem, double beta,
                                  const LrofrOptions& options = {}) {
  require(beta > 0.0, ErrorKind::InvalidArgument, "D-optimality beta must be > 0");
  return detail::run_lrofr(problem, options, {Criterion::Crerr, std::nullopt, beta});
}

/// (step, 1 - cumulative criterion) for each recorded step, step counted from 1.
inline std::vector<std::pair<int, double>> unexplained_variance_curve(const SelectionTrace& trace) {
  require(!trace.steps.empty(), ErrorKind::InvalidArgument, "empty selection trace");
  std::vector<std::pair<int, double>> curve;
  curve.reserve(trace.steps.size());
  double ratio = 1.0;
  int step = 0;
  for (const auto& s : trace.steps) {
    ratio -= s.criterion;
    curve.emplace_back(++step, ratio);
  }
  return curve;
}

inline void write_trace_csv(std::ostream& out, const SelectionTrace& trace) {
  out << "step,candidate_index,criterion,cumulative_unexplained_ratio\n";
  int step = 0;
  for (const auto& s : trace.steps) {
    out << ++step << ',' << s.candidate << ',' << format_double(s.criterion) << ','
        << format_double(s.unexplained_ratio) << '\n';
  }
}

/// Rows (regressor_index, lambda, weight) in ascending regressor order.
inline void write_lambda_csv(std::ostream& out, std::span<const int> indices,
                             const Eigen::VectorXd& lambdas, const Eigen::VectorXd& weights) {
  require(static_cast<Eigen::Index>(indices.size()) == lambdas.size() &&
              lambdas.size() == weights.size(),
          ErrorKind::DimensionMismatch, "lambda export columns differ in length");
  std::vector<std::size_t> order(indices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return indices[a] < indices[b]; });
  out << "regressor_index,lambda,weight\n";
  for (auto i : order) {
    const auto row = static_cast<Eigen::Index>(i);
    out << indices[i] << ',' << format_double(lambdas[row]) << ',' << format_double(weights[row])
        << '\n';
  }
}

}  // namespace esnlr
