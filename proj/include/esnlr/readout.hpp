#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <variant>
#include <vector>

#include "esnlr/error.hpp"
#include "esnlr/rbf.hpp"
#include "esnlr/selection.hpp"

namespace esnlr {

/// Ordinary least-squares readout over every feature.
struct LinearReadout {
  Eigen::VectorXd weights;  // feature order
  double offset = 0.0;
};

/// LROFR readout. Weights are stored in original feature order for the
/// retained features; `selection_order` remembers the order LROFR chose them.
struct RegularizedLinearReadout {
  Eigen::Index feature_count = 0;
  std::vector<int> retained;   // ascending feature indices
  Eigen::VectorXd weights;     // aligned with retained
  Eigen::VectorXd lambdas;     // aligned with retained
  std::vector<int> selection_order;
  double offset = 0.0;
};

using ReadoutModel = std::variant<LinearReadout, RegularizedLinearReadout, RbfReadout>;

/// One readout per output component.
using ReadoutSet = std::vector<ReadoutModel>;

inline const char* readout_kind(const ReadoutModel& model) {
  switch (model.index()) {
    case 0: return "linear";
    case 1: return "lrofr-linear";
    default: return "rbf-dopt";
  }
}

inline Eigen::Index readout_input_dim(const ReadoutModel& model) {
  return std::visit(
      [](const auto& m) -> Eigen::Index {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearReadout>) return m.weights.size();
        else if constexpr (std::is_same_v<T, RegularizedLinearReadout>) return m.feature_count;
        else return m.input_dim();
      },
      model);
}

// Plain loops: the sum order is part of the contract (zero weights and
// dropped features give bit-identical outputs).
inline double predict(const ReadoutModel& model, const Eigen::Ref<const Eigen::VectorXd>& features) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearReadout>) {
          require(features.size() == m.weights.size(), ErrorKind::DimensionMismatch,
                  "feature vector does not match linear readout");
          double sum = 0.0;
          for (Eigen::Index i = 0; i < m.weights.size(); ++i) sum += m.weights[i] * features[i];
          return sum + m.offset;
        } else if constexpr (std::is_same_v<T, RegularizedLinearReadout>) {
          require(features.size() == m.feature_count, ErrorKind::DimensionMismatch,
                  "feature vector does not match regularized readout");
          double sum = 0.0;
          for (std::size_t i = 0; i < m.retained.size(); ++i)
            sum += m.weights[static_cast<Eigen::Index>(i)] * features[m.retained[i]];
          return sum + m.offset;
        } else {
          return predict_rbf(m, features);
        }
      },
      model);
}

inline Eigen::VectorXd predict_rows(const ReadoutModel& model, const Eigen::MatrixXd& features) {
  Eigen::VectorXd out(features.rows());
  for (Eigen::Index k = 0; k < features.rows(); ++k) out[k] = predict(model, features.row(k).transpose());
  return out;
}

inline double training_mse(const ReadoutModel& model, const Eigen::MatrixXd& features,
                           const Eigen::VectorXd& response) {
  return (predict_rows(model, features) - response).squaredNorm() / static_cast<double>(response.size());
}

/// Plain least squares with no intercept; any bias has to come in through the
/// features (e.g. a constant reservoir input).
inline LinearReadout fit_linear_readout(const Eigen::MatrixXd& features, const Eigen::VectorXd& response) {
  require(features.rows() == response.size(), ErrorKind::DimensionMismatch,
          "features and response are not aligned");
  require(features.rows() > 0 && features.cols() > 0, ErrorKind::InvalidArgument, "empty design");
  require(features.allFinite() && response.allFinite(), ErrorKind::NonFinite, "non-finite training data");
  LinearReadout out;
  out.weights = features.colPivHouseholderQr().solve(response);
  return out;
}

struct RegularizedLinearFit {
  RegularizedLinearReadout readout;
  LrofrResult selection;
};

inline RegularizedLinearFit fit_regularized_linear_readout(const Eigen::MatrixXd& features,
                                                           const Eigen::VectorXd& response,
                                                           const LrofrOptions& options = {}) {
  const RegressionProblem problem(features, response);
  RegularizedLinearFit fit;
  fit.selection = lrofr_fit(problem, options);
  auto& r = fit.readout;
  r.feature_count = features.cols();
  r.offset = problem.response_offset();
  r.selection_order = fit.selection.selected;

  std::vector<std::size_t> order(r.selection_order.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return r.selection_order[a] < r.selection_order[b]; });
  r.retained.resize(order.size());
  r.weights.resize(static_cast<Eigen::Index>(order.size()));
  r.lambdas.resize(static_cast<Eigen::Index>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    r.retained[i] = r.selection_order[order[i]];
    r.weights[row] = fit.selection.weights[static_cast<Eigen::Index>(order[i])];
    r.lambdas[row] = fit.selection.lambdas.lambdas[static_cast<Eigen::Index>(order[i])];
  }
  return fit;
}

/// Dense weights in original feature order (zeros for unselected features).
inline Eigen::VectorXd dense_weights(const RegularizedLinearReadout& r) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(r.feature_count);
  for (std::size_t i = 0; i < r.retained.size(); ++i) full[r.retained[i]] = r.weights[static_cast<Eigen::Index>(i)];
  return full;
}

/// Weights permuted into LROFR selection order.
inline Eigen::VectorXd to_selection_order(const RegularizedLinearReadout& r, const Eigen::VectorXd& dense) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(r.selection_order.size()));
  for (std::size_t i = 0; i < r.selection_order.size(); ++i) out[static_cast<Eigen::Index>(i)] = dense[r.selection_order[i]];
  return out;
}

/// Inverse of to_selection_order.
inline Eigen::VectorXd to_original_order(const RegularizedLinearReadout& r, const Eigen::VectorXd& ordered) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(r.feature_count);
  for (std::size_t i = 0; i < r.selection_order.size(); ++i) out[r.selection_order[i]] = ordered[static_cast<Eigen::Index>(i)];
  return out;
}

/// Lambdas at or above this are treated as switched off: the weight has
/// shrunk by many orders of magnitude relative to its unregularized value.
inline constexpr double kAttenuationThreshold = 1e-2 * kLambdaCeiling;

/// Count of retained features whose lambda reached `threshold`.
inline std::size_t count_attenuated(const RegularizedLinearReadout& r, double threshold = kAttenuationThreshold) {
  return static_cast<std::size_t>((r.lambdas.array() >= threshold).count());
}

/// Removes features whose lambda reached `threshold`. The result skips them
/// entirely instead of multiplying them by near-zero weights.
inline RegularizedLinearReadout drop_attenuated(const RegularizedLinearReadout& r, double threshold) {
  RegularizedLinearReadout out;
  out.feature_count = r.feature_count;
  out.offset = r.offset;
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < r.retained.size(); ++i)
    if (r.lambdas[static_cast<Eigen::Index>(i)] < threshold) keep.push_back(static_cast<Eigen::Index>(i));
  out.weights.resize(static_cast<Eigen::Index>(keep.size()));
  out.lambdas.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.retained.push_back(r.retained[static_cast<std::size_t>(keep[i])]);
    out.weights[static_cast<Eigen::Index>(i)] = r.weights[keep[i]];
    out.lambdas[static_cast<Eigen::Index>(i)] = r.lambdas[keep[i]];
  }
  for (int c : r.selection_order)
    if (std::find(out.retained.begin(), out.retained.end(), c) != out.retained.end()) out.selection_order.push_back(c);
  return out;
}

}  // namespace esnlr
