#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "esnlr/csv.hpp"
#include "esnlr/error.hpp"
#include "esnlr/esn.hpp"

namespace esnlr {

/// Mackey-Glass delay system sampled at unit time. The delay equation is
/// integrated with Euler steps of 1/stepsize and every stepsize-th value is
/// kept, so tau * stepsize must be integral.
struct MgParams {
  double alpha = 0.2;
  double beta_exp = 10.0;
  double gamma = 0.1;
  double tau = 30.0;
  int stepsize = 10;
  int length = 3000;
  int burn_in = 1000;          // unit-time samples discarded before output
  double history_init = 1.2;
  double history_jitter = 0.05;  // history = history_init + U(-jitter, jitter)

  int delay_steps() const { return static_cast<int>(std::lround(tau * stepsize)); }

  void validate() const {
    require(stepsize >= 1, ErrorKind::InvalidArgument, "stepsize must be >= 1");
    require(tau > 0.0 && std::abs(tau * stepsize - delay_steps()) < 1e-9, ErrorKind::InvalidArgument,
            "tau * stepsize must be a positive integer");
    require(length >= 1 && burn_in >= 0, ErrorKind::InvalidArgument, "invalid length or burn-in");
    require(history_jitter >= 0.0, ErrorKind::InvalidArgument, "history jitter must be >= 0");
  }
};

/// One Euler step of the discretized delay equation.
inline double mg_step(const MgParams& p, double current, double delayed) {
  const double h = 1.0 / p.stepsize;
  return current + h * (p.alpha * delayed / (1.0 + std::pow(delayed, p.beta_exp)) - p.gamma * current);
}

/// Full fine-grained trajectory: delay_steps()+1 history values followed by
/// (burn_in + length) * stepsize integration steps.
inline std::vector<double> mg_fine_trajectory(const MgParams& p, std::uint64_t seed) {
  p.validate();
  const int delay = p.delay_steps();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-p.history_jitter, p.history_jitter);
  std::vector<double> z;
  const std::size_t total = static_cast<std::size_t>(p.burn_in + p.length) * static_cast<std::size_t>(p.stepsize);
  z.reserve(static_cast<std::size_t>(delay) + 1 + total);
  for (int i = 0; i <= delay; ++i) z.push_back(p.history_init + (p.history_jitter > 0 ? jitter(rng) : 0.0));
  for (std::size_t n = 0; n < total; ++n) {
    const std::size_t k = z.size() - 1;
    const double next = mg_step(p, z[k], z[k - static_cast<std::size_t>(delay)]);
    if (!std::isfinite(next)) throw Error(ErrorKind::NonFinite, "Mackey-Glass integration diverged");
    z.push_back(next);
  }
  return z;
}

/// Unit-time Mackey-Glass samples after the burn-in.
inline std::vector<double> generate_mg(const MgParams& p, std::uint64_t seed) {
  const auto z = mg_fine_trajectory(p, seed);
  const std::size_t first = static_cast<std::size_t>(p.delay_steps()) +
                            static_cast<std::size_t>(p.burn_in + 1) * static_cast<std::size_t>(p.stepsize);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p.length));
  for (int i = 0; i < p.length; ++i) out.push_back(z[first + static_cast<std::size_t>(i) * static_cast<std::size_t>(p.stepsize)]);
  return out;
}

/// y -> tanh(y - 1), squashing the series into (-1, 1).
inline std::vector<double> transform_sequence(std::span<const double> y) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = std::tanh(y[i] - 1.0);
  return out;
}

inline std::vector<double> inverse_transform(std::span<const double> v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(std::abs(v[i]) < 1.0)) throw Error(ErrorKind::InverseDomain, "value outside (-1, 1)");
    out[i] = std::atanh(v[i]) + 1.0;
  }
  return out;
}

inline double population_variance(std::span<const double> v) {
  require(!v.empty(), ErrorKind::InvalidArgument, "variance of an empty series");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size());
}

struct NrmseProtocol {
  int n_trials = 100;
  int warm_steps = 1000;
  std::vector<int> horizons{84, 120};
  /// Draw a fresh sequence per trial instead of segmenting one long attractor.
  bool independent_sequences = false;

  int free_steps() const {
    int m = 0;
    for (int h : horizons) m = std::max(m, h);
    return m;
  }

  void validate() const {
    require(n_trials >= 1 && warm_steps >= 0, ErrorKind::InvalidArgument, "invalid trial count or warm-up");
    require(!horizons.empty(), ErrorKind::InvalidArgument, "need at least one horizon");
    for (int h : horizons) require(h >= 1, ErrorKind::InvalidArgument, "horizons must be >= 1");
  }

  /// Length of the single attractor used by the segmented protocol.
  int attractor_length() const { return warm_steps + free_steps() * n_trials; }
};

struct BenchmarkReport {
  std::vector<int> horizons;
  std::vector<double> nrmse;          // per horizon
  Eigen::MatrixXd squared_errors;     // trials x horizons
  double signal_variance = 0.0;
  std::optional<double> training_mse;

  double nrmse_at(int horizon) const {
    for (std::size_t i = 0; i < horizons.size(); ++i)
      if (horizons[i] == horizon) return nrmse[i];
    throw Error(ErrorKind::InvalidArgument, "horizon not evaluated: " + std::to_string(horizon));
  }
};

/// Rows (trial, horizon, squared_error), followed by summary rows whose trial
/// column names the statistic: nrmse per horizon, signal variance, training MSE.
inline void write_report_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "trial,horizon,squared_error\n";
  for (Eigen::Index t = 0; t < report.squared_errors.rows(); ++t)
    for (std::size_t h = 0; h < report.horizons.size(); ++h)
      out << t + 1 << ',' << report.horizons[h] << ','
          << format_double(report.squared_errors(t, static_cast<Eigen::Index>(h))) << '\n';
  for (std::size_t h = 0; h < report.horizons.size(); ++h)
    out << "nrmse," << report.horizons[h] << ',' << format_double(report.nrmse[h]) << '\n';
  out << "signal_variance,0," << format_double(report.signal_variance) << '\n';
  if (report.training_mse) out << "training_mse,0," << format_double(*report.training_mse) << '\n';
}

/// Anything that can be teacher-forced along a scalar series and asked for a
/// closed-loop forecast from its current state without disturbing it.
template <typename F>
concept Forecaster = requires(F f, std::span<const double> segment, int steps) {
  f.teacher_force(segment);
  { f.forecast(steps) } -> std::convertible_to<std::vector<double>>;
};

namespace detail {

inline BenchmarkReport finish_report(const NrmseProtocol& protocol, Eigen::MatrixXd errors, double variance) {
  BenchmarkReport report;
  report.horizons = protocol.horizons;
  report.signal_variance = variance;
  report.nrmse.resize(protocol.horizons.size());
  for (std::size_t h = 0; h < protocol.horizons.size(); ++h)
    report.nrmse[h] = std::sqrt(errors.col(static_cast<Eigen::Index>(h)).sum() /
                                (static_cast<double>(protocol.n_trials) * variance));
  report.squared_errors = std::move(errors);
  return report;
}

}  // namespace detail

/// Segmented protocol on one long series: teacher-force the warm-up, then per
/// trial forecast free_steps ahead from the saved state, score each horizon,
/// and teacher-force the same free_steps to reach the next origin.
template <Forecaster F>
BenchmarkReport run_segmented_protocol(std::span<const double> signal, const NrmseProtocol& protocol,
                                       F& forecaster) {
  protocol.validate();
  require(signal.size() >= static_cast<std::size_t>(protocol.attractor_length()), ErrorKind::InvalidArgument,
          "signal shorter than warm_steps + free_steps * n_trials");
  const double variance = population_variance(signal);
  const auto free = static_cast<std::size_t>(protocol.free_steps());
  Eigen::MatrixXd errors(protocol.n_trials, static_cast<Eigen::Index>(protocol.horizons.size()));

  forecaster.teacher_force(signal.subspan(0, static_cast<std::size_t>(protocol.warm_steps)));
  std::size_t origin = static_cast<std::size_t>(protocol.warm_steps);
  for (int trial = 0; trial < protocol.n_trials; ++trial) {
    const std::vector<double> forecast = forecaster.forecast(protocol.free_steps());
    for (std::size_t h = 0; h < protocol.horizons.size(); ++h) {
      const auto step = static_cast<std::size_t>(protocol.horizons[h]);
      const double d = signal[origin + step - 1] - forecast[step - 1];
      errors(trial, static_cast<Eigen::Index>(h)) = d * d;
    }
    forecaster.teacher_force(signal.subspan(origin, free));
    origin += free;
  }
  return detail::finish_report(protocol, std::move(errors), variance);
}

/// Scalar-output ESN forecaster: teacher forcing and free runs are noise free.
class EsnForecaster {
 public:
  EsnForecaster(const EsnConfig& config, const EsnWeights& weights, const ReadoutSet& readouts)
      : config_(config), weights_(weights), readouts_(readouts), reservoir_(config, weights) {
    require(config.output_dim == 1, ErrorKind::InvalidArgument, "the NRMSE protocol needs a scalar output");
    require(readouts.size() == 1, ErrorKind::DimensionMismatch, "need exactly one readout");
    last_output_ = Eigen::VectorXd::Zero(1);
  }

  void teacher_force(std::span<const double> segment) {
    for (double v : segment) {
      reservoir_.advance(nullptr, last_output_, nullptr, ++steps_);
      last_output_[0] = v;
    }
  }

  std::vector<double> forecast(int steps) const {
    const Eigen::MatrixXd out =
        free_run(config_, weights_, readouts_, reservoir_.state(), last_output_, steps);
    return {out.data(), out.data() + out.rows()};
  }

 private:
  const EsnConfig& config_;
  const EsnWeights& weights_;
  const ReadoutSet& readouts_;
  Reservoir reservoir_;
  Eigen::VectorXd last_output_;
  long steps_ = 0;
};

/// NRMSE of a trained scalar ESN on freshly generated, transformed
/// Mackey-Glass data. `seed` selects the test attractor(s).
inline BenchmarkReport evaluate_nrmse(const EsnConfig& config, const EsnWeights& weights,
                                      const ReadoutSet& readouts, const NrmseProtocol& protocol,
                                      const MgParams& mg, std::uint64_t seed) {
  protocol.validate();
  if (!protocol.independent_sequences) {
    MgParams p = mg;
    p.length = protocol.attractor_length();
    const auto signal = transform_sequence(generate_mg(p, seed));
    EsnForecaster forecaster(config, weights, readouts);
    return run_segmented_protocol(std::span<const double>(signal), protocol, forecaster);
  }

  MgParams p = mg;
  p.length = protocol.warm_steps + protocol.free_steps();
  std::vector<double> pooled;
  Eigen::MatrixXd errors(protocol.n_trials, static_cast<Eigen::Index>(protocol.horizons.size()));
  for (int trial = 0; trial < protocol.n_trials; ++trial) {
    const auto signal = transform_sequence(generate_mg(p, seed + static_cast<std::uint64_t>(trial)));
    pooled.insert(pooled.end(), signal.begin(), signal.end());
    EsnForecaster forecaster(config, weights, readouts);
    forecaster.teacher_force(std::span<const double>(signal).subspan(0, static_cast<std::size_t>(protocol.warm_steps)));
    const auto forecast = forecaster.forecast(protocol.free_steps());
    for (std::size_t h = 0; h < protocol.horizons.size(); ++h) {
      const auto step = static_cast<std::size_t>(protocol.horizons[h]);
      const double d = signal[static_cast<std::size_t>(protocol.warm_steps) + step - 1] - forecast[step - 1];
      errors(trial, static_cast<Eigen::Index>(h)) = d * d;
    }
  }
  return detail::finish_report(protocol, std::move(errors), population_variance(pooled));
}

/// Synthetic stand-in for a 2-D -> 2-D stroke/displacement task: inputs are
/// short stroke vectors whose direction performs a random walk; responses are
/// a smooth random map of the current and previous input plus noise.
struct VectorFieldData {
  Eigen::MatrixXd inputs;     // n x 2
  Eigen::MatrixXd responses;  // n x 2
};

inline VectorFieldData surrogate_vector_field(int n_points = 2704, std::uint64_t seed = 1, double noise = 0.01) {
  require(n_points >= 2, ErrorKind::InvalidArgument, "need at least 2 points");
  require(noise >= 0.0, ErrorKind::InvalidArgument, "noise must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix2d a, b, c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      a(i, j) = 0.5 * normal(rng);
      b(i, j) = 2.0 * normal(rng);
      c(i, j) = 1.0 * normal(rng);
    }

  VectorFieldData d;
  d.inputs.resize(n_points, 2);
  d.responses.resize(n_points, 2);
  double angle = 0.0;
  Eigen::Vector2d previous = Eigen::Vector2d::Zero();
  for (int k = 0; k < n_points; ++k) {
    angle += 0.3 * normal(rng);
    const Eigen::Vector2d u(std::cos(angle), std::sin(angle));
    const Eigen::Vector2d v = a * (b * u + c * previous).array().tanh().matrix();
    d.inputs.row(k) = u.transpose();
    d.responses(k, 0) = v[0] + noise * normal(rng);
    d.responses(k, 1) = v[1] + noise * normal(rng);
    previous = u;
  }
  return d;
}

}  // namespace esnlr
