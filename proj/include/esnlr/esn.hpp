#pragma once

// Echo state network core: sparse random weight generation, the state-space
// update x(k+1) = f(W_in u(k+1) + W x(k) + W_fb y(k)) + noise, state harvesting
// under teacher forcing, and closed-loop free running through a readout.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "esnlr/error.hpp"
#include "esnlr/readout.hpp"

namespace esnlr {

enum class Activation { Tanh, Identity, GaussianRbf };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
    case Activation::GaussianRbf: return "gaussian_rbf";
  }
  return "?";
}

/// Entry distribution for a random weight matrix: either a finite value set
/// with probabilities, or U[low, high] with probability `density` (else 0).
struct SparseRandomSpec {
  enum class Kind { Discrete, Uniform };

  Kind kind = Kind::Discrete;
  std::vector<double> values{0.0};
  std::vector<double> probabilities{1.0};
  double low = 0.0;
  double high = 0.0;
  double density = 1.0;

  static SparseRandomSpec discrete(std::vector<double> values, std::vector<double> probabilities) {
    SparseRandomSpec s;
    s.kind = Kind::Discrete;
    s.values = std::move(values);
    s.probabilities = std::move(probabilities);
    return s;
  }

  static SparseRandomSpec uniform(double low, double high, double density = 1.0) {
    SparseRandomSpec s;
    s.kind = Kind::Uniform;
    s.values.clear();
    s.probabilities.clear();
    s.low = low;
    s.high = high;
    s.density = density;
    return s;
  }

  void validate() const {
    if (kind == Kind::Discrete) {
      require(!values.empty() && values.size() == probabilities.size(), ErrorKind::InvalidSpec,
              "value set and probabilities must be non-empty and equally long");
      double total = 0.0;
      for (double p : probabilities) {
        require(p >= 0.0 && std::isfinite(p), ErrorKind::InvalidSpec, "negative probability");
        total += p;
      }
      require(std::abs(total - 1.0) <= 1e-12, ErrorKind::InvalidSpec, "probabilities must sum to 1");
      for (double v : values) require(std::isfinite(v), ErrorKind::InvalidSpec, "non-finite value");
    } else {
      require(std::isfinite(low) && std::isfinite(high) && low <= high, ErrorKind::InvalidSpec,
              "uniform interval must satisfy low <= high");
      require(density >= 0.0 && density <= 1.0, ErrorKind::InvalidSpec, "density must lie in [0, 1]");
    }
  }

  double sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (kind == Kind::Discrete) {
      const double u = unit(rng);
      double cumulative = 0.0;
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        cumulative += probabilities[i];
        if (u < cumulative) return values[i];
      }
      return values.back();
    }
    if (!(unit(rng) < density)) return 0.0;
    return low + (high - low) * unit(rng);
  }
};

struct EsnConfig {
  int reservoir_size = 400;
  int input_dim = 1;
  int output_dim = 1;
  Activation activation = Activation::Tanh;
  double activation_mean = 0.0;      // Gaussian RBF activation only
  double activation_variance = 1.0;  // Gaussian RBF activation only
  SparseRandomSpec w_spec;
  SparseRandomSpec w_in_spec;
  SparseRandomSpec w_fb_spec;
  double state_noise_amplitude = 0.0;
  int washout = 0;
  std::uint64_t seed = 42;
  bool include_input_in_readout = false;
  /// Input used when no input sequence is supplied (e.g. a bias unit).
  std::optional<double> constant_input;
  /// Rescale W to this spectral radius after sampling; 0 keeps W as drawn.
  double target_spectral_radius = 0.0;

  void validate() const {
    require(reservoir_size >= 0 && washout >= 0, ErrorKind::InvalidSpec,
            "reservoir size and washout must be non-negative");
    require(input_dim >= 0 && output_dim >= 1, ErrorKind::InvalidSpec,
            "need output_dim >= 1 and input_dim >= 0");
    require(state_noise_amplitude >= 0.0, ErrorKind::InvalidSpec, "noise amplitude must be >= 0");
    require(activation != Activation::GaussianRbf || activation_variance > 0.0, ErrorKind::InvalidSpec,
            "activation variance must be > 0");
    require(target_spectral_radius >= 0.0, ErrorKind::InvalidSpec, "target radius must be >= 0");
    w_spec.validate();
    w_in_spec.validate();
    w_fb_spec.validate();
  }

  /// Feature count seen by the readout.
  int readout_features() const { return reservoir_size + (include_input_in_readout ? input_dim : 0); }

  /// 400 tanh units, W in {0, +-0.4}, bias input 0.2, dense uniform feedback.
  static EsnConfig mackey_glass() {
    EsnConfig c;
    c.reservoir_size = 400;
    c.input_dim = 1;
    c.output_dim = 1;
    c.activation = Activation::Tanh;
    c.w_spec = SparseRandomSpec::discrete({0.0, 0.4, -0.4}, {0.99, 0.005, 0.005});
    c.w_in_spec = SparseRandomSpec::discrete({0.0, 0.14, -0.14}, {0.5, 0.25, 0.25});
    c.w_fb_spec = SparseRandomSpec::uniform(-0.56, 0.56);
    c.state_noise_amplitude = 1e-5;
    c.washout = 1000;
    c.constant_input = 0.2;
    return c;
  }

  /// 300 Gaussian-RBF units driven by a 2-D input with 2-D feedback.
  static EsnConfig vector_field() {
    EsnConfig c;
    c.reservoir_size = 300;
    c.input_dim = 2;
    c.output_dim = 2;
    c.activation = Activation::GaussianRbf;
    c.activation_mean = 0.0;
    c.activation_variance = 1.0;
    c.w_spec = SparseRandomSpec::discrete({0.0, 0.2073, -0.2073}, {0.95, 0.025, 0.025});
    c.w_in_spec = SparseRandomSpec::uniform(-1.0, 1.0, 0.9);
    c.w_fb_spec = SparseRandomSpec::discrete({0.0, 0.1, -0.1}, {0.9, 0.05, 0.05});
    c.washout = 300;
    return c;
  }
};

struct EsnWeights {
  Eigen::MatrixXd w;     // M x M
  Eigen::MatrixXd w_in;  // M x L
  Eigen::MatrixXd w_fb;  // M x P
  double realized_spectral_radius = 0.0;
};

inline double spectral_radius(const Eigen::MatrixXd& w) {
  if (w.size() == 0 || w.isZero(0.0)) return 0.0;
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(w, false);
  require(solver.info() == Eigen::Success, ErrorKind::NonFinite, "eigenvalue solver failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

inline EsnWeights generate_weights(const EsnConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const int m = config.reservoir_size;
  EsnWeights out;
  auto fill = [&](Eigen::MatrixXd& target, int rows, int cols, const SparseRandomSpec& spec) {
    target.resize(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) target(i, j) = spec.sample(rng);
  };
  fill(out.w, m, m, config.w_spec);
  fill(out.w_in, m, config.input_dim, config.w_in_spec);
  fill(out.w_fb, m, config.output_dim, config.w_fb_spec);
  out.realized_spectral_radius = spectral_radius(out.w);
  if (config.target_spectral_radius > 0.0 && out.realized_spectral_radius > 0.0) {
    out.w *= config.target_spectral_radius / out.realized_spectral_radius;
    out.realized_spectral_radius = spectral_radius(out.w);
  }
  return out;
}

inline void check_weights(const EsnConfig& config, const EsnWeights& weights) {
  const Eigen::Index m = config.reservoir_size;
  require(weights.w.rows() == m && weights.w.cols() == m, ErrorKind::DimensionMismatch, "W is not M x M");
  require(weights.w_in.rows() == m && weights.w_in.cols() == config.input_dim, ErrorKind::DimensionMismatch,
          "W_in is not M x L");
  require(weights.w_fb.rows() == m && weights.w_fb.cols() == config.output_dim, ErrorKind::DimensionMismatch,
          "W_fb is not M x P");
}

/// Uniform state noise in (-a, a). Its stream is derived from the weight
/// seed but independent of the weight draws.
class StateNoise {
 public:
  StateNoise(std::uint64_t seed, double amplitude) : rng_(derive(seed)), amplitude_(amplitude) {}

  static StateNoise from_config(const EsnConfig& config) {
    return {config.seed, config.state_noise_amplitude};
  }

  void apply(Eigen::VectorXd& x) {
    if (amplitude_ == 0.0) return;
    std::uniform_real_distribution<double> dist(-amplitude_, amplitude_);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += dist(rng_);
  }

 private:
  static std::uint64_t derive(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      std::uint32_t{0x6e6f6973}};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (std::uint64_t{words[0]} << 32) | words[1];
  }

  std::mt19937_64 rng_;
  double amplitude_;
};

inline constexpr double kDivergenceBound = 1e6;

/// Runs the state-space update for one configuration. Holds references to
/// the (immutable) configuration and weights.
class Reservoir {
 public:
  Reservoir(const EsnConfig& config, const EsnWeights& weights) : config_(config), weights_(weights) {
    config.validate();
    check_weights(config, weights);
    state_ = Eigen::VectorXd::Zero(config.reservoir_size);
    pre_.resize(config.reservoir_size);
  }

  const Eigen::VectorXd& state() const { return state_; }
  void set_state(const Eigen::VectorXd& x) {
    require(x.size() == config_.reservoir_size, ErrorKind::DimensionMismatch, "state has wrong size");
    state_ = x;
  }

  /// x <- f(W_in u + W x + W_fb y_prev) (+ noise). `u` may be null.
  const Eigen::VectorXd& advance(const Eigen::VectorXd* u, const Eigen::Ref<const Eigen::VectorXd>& y_prev,
                                 StateNoise* noise, long step_index) {
    pre_.noalias() = weights_.w * state_;
    pre_.noalias() += weights_.w_fb * y_prev;
    if (config_.input_dim > 0) {
      if (u != nullptr) {
        pre_.noalias() += weights_.w_in * (*u);
      } else if (config_.constant_input) {
        pre_.noalias() += weights_.w_in * Eigen::VectorXd::Constant(config_.input_dim, *config_.constant_input);
      }
    }
    switch (config_.activation) {
      case Activation::Tanh: state_ = pre_.array().tanh(); break;
      case Activation::Identity: state_ = pre_; break;
      case Activation::GaussianRbf: {
        const double two_var = 2.0 * config_.activation_variance;
        state_ = (-(pre_.array() - config_.activation_mean).square() / two_var).exp();
        break;
      }
    }
    if (noise != nullptr) noise->apply(state_);
    if (!state_.allFinite() || state_.cwiseAbs().maxCoeff() > kDivergenceBound) {
      throw Error(ErrorKind::NonFiniteState, "state diverged at step " + std::to_string(step_index));
    }
    return state_;
  }

  /// Readout features [u, x] or x for the current state.
  Eigen::VectorXd features(const Eigen::VectorXd* u) const {
    if (!config_.include_input_in_readout || config_.input_dim == 0) return state_;
    Eigen::VectorXd f(config_.input_dim + config_.reservoir_size);
    if (u != nullptr) {
      f.head(config_.input_dim) = *u;
    } else {
      f.head(config_.input_dim).setConstant(config_.constant_input.value_or(0.0));
    }
    f.tail(config_.reservoir_size) = state_;
    return f;
  }

 private:
  const EsnConfig& config_;
  const EsnWeights& weights_;
  Eigen::VectorXd state_;
  Eigen::VectorXd pre_;
};

struct StateHarvest {
  Eigen::MatrixXd x;  // rows = readout features of x(k), k = washout+1 .. T
  Eigen::MatrixXd y;  // teacher rows aligned with x
  long first_k = 0;
  long last_k = 0;
};

namespace detail {

inline void check_sequences(const EsnConfig& config, const Eigen::MatrixXd& teacher,
                            const Eigen::MatrixXd* inputs) {
  require(teacher.cols() == config.output_dim, ErrorKind::DimensionMismatch,
          "teacher has wrong output dimension");
  if (inputs != nullptr) {
    require(inputs->rows() == teacher.rows(), ErrorKind::DimensionMismatch,
            "inputs and teacher differ in length");
    require(inputs->cols() == config.input_dim, ErrorKind::DimensionMismatch, "inputs have wrong dimension");
  }
}

}  // namespace detail

/// Teacher-forced harvest. Row t of `teacher` is y(t+1); y(0) = 0. x(0) is
/// zero unless `initial_state` is given.
inline StateHarvest harvest_states(const EsnConfig& config, const EsnWeights& weights,
                                   const Eigen::MatrixXd& teacher, const Eigen::MatrixXd* inputs = nullptr,
                                   const std::optional<Eigen::VectorXd>& initial_state = std::nullopt) {
  detail::check_sequences(config, teacher, inputs);
  const Eigen::Index steps = teacher.rows();
  require(steps > config.washout, ErrorKind::InvalidArgument, "sequence shorter than the washout");

  Reservoir reservoir(config, weights);
  if (initial_state) reservoir.set_state(*initial_state);
  StateNoise noise = StateNoise::from_config(config);

  StateHarvest h;
  h.x.resize(steps - config.washout, config.readout_features());
  h.y = teacher.bottomRows(steps - config.washout);
  h.first_k = config.washout + 1;
  h.last_k = steps;

  Eigen::VectorXd y_prev = Eigen::VectorXd::Zero(config.output_dim);
  Eigen::VectorXd u;
  for (Eigen::Index t = 0; t < steps; ++t) {
    const Eigen::VectorXd* up = nullptr;
    if (inputs != nullptr) {
      u = inputs->row(t).transpose();
      up = &u;
    }
    reservoir.advance(up, y_prev, &noise, static_cast<long>(t + 1));
    if (t >= config.washout) h.x.row(t - config.washout) = reservoir.features(up).transpose();
    y_prev = teacher.row(t).transpose();
  }
  return h;
}

struct ReservoirSnapshot {
  Eigen::VectorXd state;   // x(k)
  Eigen::VectorXd output;  // y(k), the last teacher value fed
};

/// Same update as harvest_states, returning only the terminal state. Starts
/// from `start` (zero state and output when absent).
inline ReservoirSnapshot teacher_forced_run(const EsnConfig& config, const EsnWeights& weights,
                                            const Eigen::MatrixXd& teacher, Eigen::Index steps,
                                            const std::optional<ReservoirSnapshot>& start = std::nullopt,
                                            const Eigen::MatrixXd* inputs = nullptr, StateNoise* noise = nullptr) {
  detail::check_sequences(config, teacher, inputs);
  require(steps >= 0 && steps <= teacher.rows(), ErrorKind::InvalidArgument, "not enough teacher rows");
  Reservoir reservoir(config, weights);
  Eigen::VectorXd y_prev = Eigen::VectorXd::Zero(config.output_dim);
  if (start) {
    reservoir.set_state(start->state);
    require(start->output.size() == config.output_dim, ErrorKind::DimensionMismatch, "output has wrong size");
    y_prev = start->output;
  }
  Eigen::VectorXd u;
  for (Eigen::Index t = 0; t < steps; ++t) {
    const Eigen::VectorXd* up = nullptr;
    if (inputs != nullptr) {
      u = inputs->row(t).transpose();
      up = &u;
    }
    reservoir.advance(up, y_prev, noise, static_cast<long>(t + 1));
    y_prev = teacher.row(t).transpose();
  }
  return {reservoir.state(), y_prev};
}

/// Closed loop: each prediction is fed back through W_fb. Returns steps x P.
inline Eigen::MatrixXd free_run(const EsnConfig& config, const EsnWeights& weights, const ReadoutSet& readouts,
                                const Eigen::VectorXd& x_init, const Eigen::VectorXd& y_init, Eigen::Index steps,
                                const Eigen::MatrixXd* inputs = nullptr) {
  require(static_cast<int>(readouts.size()) == config.output_dim, ErrorKind::DimensionMismatch,
          "need one readout per output");
  for (const auto& r : readouts)
    require(readout_input_dim(r) == config.readout_features(), ErrorKind::DimensionMismatch,
            "readout feature count does not match the configuration");
  require(y_init.size() == config.output_dim, ErrorKind::DimensionMismatch, "initial output has wrong size");
  if (inputs != nullptr) {
    require(inputs->rows() >= steps && inputs->cols() == config.input_dim, ErrorKind::DimensionMismatch,
            "inputs do not cover the free run");
  }

  Reservoir reservoir(config, weights);
  reservoir.set_state(x_init);
  Eigen::MatrixXd out(steps, config.output_dim);
  Eigen::VectorXd y = y_init;
  Eigen::VectorXd u;
  for (Eigen::Index t = 0; t < steps; ++t) {
    const Eigen::VectorXd* up = nullptr;
    if (inputs != nullptr) {
      u = inputs->row(t).transpose();
      up = &u;
    }
    reservoir.advance(up, y, nullptr, static_cast<long>(t + 1));
    const Eigen::VectorXd f = reservoir.features(up);
    for (int p = 0; p < config.output_dim; ++p) y[p] = predict(readouts[static_cast<std::size_t>(p)], f);
    require(y.allFinite(), ErrorKind::NonFiniteState, "readout output diverged at step " + std::to_string(t + 1));
    out.row(t) = y.transpose();
  }
  return out;
}

}  // namespace esnlr
