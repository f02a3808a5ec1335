#pragma once

// Locally regularized RBF readouts: every (strided) training state is a
// candidate centre; LROFR with the D-optimality cost prunes the candidate set.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "esnlr/error.hpp"
#include "esnlr/selection.hpp"

namespace esnlr {

enum class Kernel { Gaussian, ThinPlateSpline };

inline const char* to_string(Kernel k) {
  return k == Kernel::Gaussian ? "gaussian" : "thin_plate_spline";
}

struct RbfSpec {
  Kernel kernel = Kernel::Gaussian;
  double variance = 1.0;      // shared width: distances are scaled by 1/variance
  double dopt_beta = 1e-4;
  std::size_t center_stride = 1;  // 1 = every training point is a candidate
  LrofrOptions lrofr{};

  void validate() const {
    require(variance > 0.0 && std::isfinite(variance), ErrorKind::InvalidSpec, "RBF variance must be > 0");
    require(dopt_beta > 0.0, ErrorKind::InvalidSpec, "dopt_beta must be > 0");
    require(center_stride >= 1, ErrorKind::InvalidSpec, "center stride must be >= 1");
  }
};

/// phi(chi) with chi = distance / variance. The thin plate spline takes its
/// limit value 0 at chi = 0.
inline double kernel_value(Kernel kernel, double variance, double distance) {
  const double chi = distance / variance;
  if (kernel == Kernel::Gaussian) return std::exp(-chi * chi);
  if (chi == 0.0) return 0.0;
  return chi * chi * std::log(chi);
}

template <typename A, typename B>
double euclidean_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

/// Rows of `states` that act as candidate centres.
inline std::vector<Eigen::Index> candidate_center_rows(Eigen::Index n, const RbfSpec& spec) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index k = 0; k < n; k += static_cast<Eigen::Index>(spec.center_stride)) rows.push_back(k);
  return rows;
}

/// Phi[k][i] = phi(||x(k) - c_i||) with c_i drawn from the training states.
inline Eigen::MatrixXd build_candidate_matrix(const Eigen::MatrixXd& states, const RbfSpec& spec) {
  spec.validate();
  require(states.rows() >= 2, ErrorKind::InvalidArgument, "need at least 2 states");
  const auto centers = candidate_center_rows(states.rows(), spec);
  Eigen::MatrixXd phi(states.rows(), static_cast<Eigen::Index>(centers.size()));
  for (Eigen::Index i = 0; i < phi.cols(); ++i) {
    const auto c = states.row(centers[static_cast<std::size_t>(i)]);
    for (Eigen::Index k = 0; k < states.rows(); ++k)
      phi(k, i) = kernel_value(spec.kernel, spec.variance, euclidean_distance(states.row(k), c));
  }
  return phi;
}

struct RbfReadout {
  Eigen::MatrixXd centers;  // M_final x d
  Kernel kernel = Kernel::Gaussian;
  double variance = 1.0;
  Eigen::VectorXd weights;
  double output_offset = 0.0;

  Eigen::Index size() const { return centers.rows(); }
  Eigen::Index input_dim() const { return centers.cols(); }
};

inline double predict_rbf(const RbfReadout& readout, const Eigen::Ref<const Eigen::VectorXd>& state) {
  require(state.size() == readout.input_dim(), ErrorKind::DimensionMismatch,
          "state dimension does not match RBF centres");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < readout.size(); ++i) {
    sum += readout.weights[i] *
           kernel_value(readout.kernel, readout.variance, euclidean_distance(state, readout.centers.row(i).transpose()));
  }
  return sum + readout.output_offset;
}

struct RbfFit {
  RbfReadout readout;
  LrofrResult selection;  // column indices refer to candidate_center_rows()
};

inline RbfFit fit_rbf_readout(const Eigen::MatrixXd& states, const Eigen::VectorXd& response,
                              const RbfSpec& spec) {
  require(states.rows() == response.size(), ErrorKind::DimensionMismatch,
          "states and response are not aligned");
  const Eigen::MatrixXd phi = build_candidate_matrix(states, spec);
  const auto center_rows = candidate_center_rows(states.rows(), spec);
  const RegressionProblem problem(phi, response);

  RbfFit fit;
  fit.selection = lrofr_dopt_fit(problem, spec.dopt_beta, spec.lrofr);
  const auto m = static_cast<Eigen::Index>(fit.selection.selected.size());
  require(m > 0, ErrorKind::EmptyModel, "no RBF centre survived selection");

  fit.readout.kernel = spec.kernel;
  fit.readout.variance = spec.variance;
  fit.readout.output_offset = problem.response_offset();
  fit.readout.centers.resize(m, states.cols());
  fit.readout.weights = fit.selection.weights;
  for (Eigen::Index i = 0; i < m; ++i)
    fit.readout.centers.row(i) = states.row(center_rows[static_cast<std::size_t>(fit.selection.selected[static_cast<std::size_t>(i)])]);
  return fit;
}

}  // namespace esnlr
