#pragma once

// Versioned text archives. Layout:
//
//   esnlr-archive <format_version> crc32=<8 hex digits>\n
//   <JSON body, sorted keys, one trailing newline>
//
// The checksum covers the body bytes. Matrices are stored row-major as
// {"rows": r, "cols": c, "data": [...]}. Doubles use the shortest decimal
// form that parses back to the same value, so load + save is byte-identical.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <zlib.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "esnlr/benchmarks.hpp"
#include "esnlr/error.hpp"
#include "esnlr/esn.hpp"
#include "esnlr/readout.hpp"
#include "esnlr/selection.hpp"
#include "esnlr/version.hpp"

namespace esnlr {

inline constexpr int kArchiveFormatVersion = 1;
inline constexpr const char* kArchiveMagic = "esnlr-archive";

using Json = nlohmann::json;

/// Per-output summary of how a regularized readout was selected.
struct SelectionMetadata {
  std::string method;                // "lrofr" or "lrofr-dopt"
  std::vector<int> selection_order;  // candidate indices, selection order
  Eigen::VectorXd lambdas;           // aligned with selection_order
  int iteration_count = 0;
  bool converged = false;
  std::vector<int> zero_weight;
  std::vector<int> degenerate;
  std::string terminated_by;
  std::vector<SelectionStep> trace;  // final pass
};

inline SelectionMetadata summarize_selection(const std::string& method, const LrofrResult& r) {
  SelectionMetadata m;
  m.method = method;
  m.selection_order = r.selected;
  m.lambdas = r.lambdas.lambdas;
  m.iteration_count = r.lambdas.iteration_count;
  m.converged = r.lambdas.converged;
  m.zero_weight = r.lambdas.zero_weight;
  m.degenerate = r.passes.back().trace.degenerate;
  m.terminated_by = to_string(r.passes.back().trace.terminated_by);
  m.trace = r.passes.back().trace.steps;
  return m;
}

struct Provenance {
  std::uint64_t seed = 0;
  std::string created;  // ISO-8601 UTC
  std::string library_version = kLibraryVersion;
  std::string command;
};

/// Everything needed to rerun a trained model. A harvest archive has a
/// harvest and no readouts; a model archive has readouts (and may keep the
/// harvest it was fitted on).
struct ModelArchive {
  int format_version = kArchiveFormatVersion;
  EsnConfig config;
  EsnWeights weights;
  std::optional<StateHarvest> harvest;
  ReadoutSet readouts;
  std::vector<SelectionMetadata> selection;
  std::optional<MgParams> mg;  // generator of the training series, if any
  std::optional<double> training_mse;
  Provenance provenance;
};

enum class ArchiveRole { Any, Harvest, Model };

namespace detail {

inline Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Json vector_to_json(const Eigen::VectorXd& v) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(v[i]);
  return data;
}

inline const Json& field(const Json& j, const char* key) {
  auto it = j.find(key);
  require(it != j.end(), ErrorKind::CorruptArchive, std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptArchive, std::string("bad field '") + key + "': " + e.what());
  }
}

inline Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what) {
  const auto rows = get<long long>(j, "rows");
  const auto cols = get<long long>(j, "cols");
  const Json& data = field(j, "data");
  require(rows >= 0 && cols >= 0 && data.is_array() &&
              data.size() == static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
          ErrorKind::DimensionMismatch, what + ": declared " + std::to_string(rows) + "x" + std::to_string(cols) +
                                            " but holds " + std::to_string(data.size()) + " values");
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index jj = 0; jj < cols; ++jj) {
      require(data[k].is_number(), ErrorKind::CorruptArchive, what + ": non-numeric entry");
      m(i, jj) = data[k++].get<double>();
    }
  return m;
}

inline Eigen::VectorXd vector_from_json(const Json& j, const std::string& what) {
  require(j.is_array(), ErrorKind::CorruptArchive, what + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), ErrorKind::CorruptArchive, what + ": non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "identity") return Activation::Identity;
  if (s == "gaussian_rbf") return Activation::GaussianRbf;
  throw Error(ErrorKind::InvalidSpec, "unknown activation '" + s + "'");
}

inline Kernel kernel_from_string(const std::string& s) {
  if (s == "gaussian") return Kernel::Gaussian;
  if (s == "thin_plate_spline") return Kernel::ThinPlateSpline;
  throw Error(ErrorKind::InvalidSpec, "unknown kernel '" + s + "'");
}

inline Json spec_to_json(const SparseRandomSpec& s) {
  if (s.kind == SparseRandomSpec::Kind::Discrete)
    return Json{{"kind", "discrete"}, {"values", s.values}, {"probabilities", s.probabilities}};
  return Json{{"kind", "uniform"}, {"low", s.low}, {"high", s.high}, {"density", s.density}};
}

inline SparseRandomSpec spec_from_json(const Json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "discrete")
    return SparseRandomSpec::discrete(get<std::vector<double>>(j, "values"),
                                      get<std::vector<double>>(j, "probabilities"));
  if (kind == "uniform") {
    const double density = j.contains("density") ? get<double>(j, "density") : 1.0;
    return SparseRandomSpec::uniform(get<double>(j, "low"), get<double>(j, "high"), density);
  }
  throw Error(ErrorKind::InvalidSpec, "unknown weight spec kind '" + kind + "'");
}

}  // namespace detail

inline Json config_to_json(const EsnConfig& c) {
  Json j{{"reservoir_size", c.reservoir_size},
         {"input_dim", c.input_dim},
         {"output_dim", c.output_dim},
         {"activation", to_string(c.activation)},
         {"activation_mean", c.activation_mean},
         {"activation_variance", c.activation_variance},
         {"w_spec", detail::spec_to_json(c.w_spec)},
         {"w_in_spec", detail::spec_to_json(c.w_in_spec)},
         {"w_fb_spec", detail::spec_to_json(c.w_fb_spec)},
         {"state_noise_amplitude", c.state_noise_amplitude},
         {"washout", c.washout},
         {"seed", c.seed},
         {"include_input_in_readout", c.include_input_in_readout},
         {"target_spectral_radius", c.target_spectral_radius}};
  j["constant_input"] = c.constant_input ? Json(*c.constant_input) : Json(nullptr);
  return j;
}

/// Missing keys keep the values already in `base`, so a partial config file
/// can override a preset.
inline EsnConfig config_from_json(const Json& j, EsnConfig base = {}) {
  using detail::get;
  require(j.is_object(), ErrorKind::InvalidSpec, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    static const char* known[] = {"reservoir_size", "input_dim", "output_dim", "activation", "activation_mean",
                                  "activation_variance", "w_spec", "w_in_spec", "w_fb_spec",
                                  "state_noise_amplitude", "washout", "seed", "include_input_in_readout",
                                  "target_spectral_radius", "constant_input"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    require(ok, ErrorKind::InvalidSpec, "unknown config key '" + key + "'");
  }
  if (j.contains("reservoir_size")) base.reservoir_size = get<int>(j, "reservoir_size");
  if (j.contains("input_dim")) base.input_dim = get<int>(j, "input_dim");
  if (j.contains("output_dim")) base.output_dim = get<int>(j, "output_dim");
  if (j.contains("activation")) base.activation = detail::activation_from_string(get<std::string>(j, "activation"));
  if (j.contains("activation_mean")) base.activation_mean = get<double>(j, "activation_mean");
  if (j.contains("activation_variance")) base.activation_variance = get<double>(j, "activation_variance");
  if (j.contains("w_spec")) base.w_spec = detail::spec_from_json(j["w_spec"]);
  if (j.contains("w_in_spec")) base.w_in_spec = detail::spec_from_json(j["w_in_spec"]);
  if (j.contains("w_fb_spec")) base.w_fb_spec = detail::spec_from_json(j["w_fb_spec"]);
  if (j.contains("state_noise_amplitude")) base.state_noise_amplitude = get<double>(j, "state_noise_amplitude");
  if (j.contains("washout")) base.washout = get<int>(j, "washout");
  if (j.contains("seed")) base.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("include_input_in_readout"))
    base.include_input_in_readout = get<bool>(j, "include_input_in_readout");
  if (j.contains("target_spectral_radius")) base.target_spectral_radius = get<double>(j, "target_spectral_radius");
  if (j.contains("constant_input")) {
    if (j["constant_input"].is_null()) base.constant_input.reset();
    else base.constant_input = get<double>(j, "constant_input");
  }
  return base;
}

inline Json mg_to_json(const MgParams& p) {
  return Json{{"alpha", p.alpha},     {"beta_exp", p.beta_exp}, {"gamma", p.gamma},
              {"tau", p.tau},         {"stepsize", p.stepsize}, {"length", p.length},
              {"burn_in", p.burn_in}, {"history_init", p.history_init}, {"history_jitter", p.history_jitter}};
}

inline MgParams mg_from_json(const Json& j, MgParams p = {}) {
  using detail::get;
  if (j.contains("alpha")) p.alpha = get<double>(j, "alpha");
  if (j.contains("beta_exp")) p.beta_exp = get<double>(j, "beta_exp");
  if (j.contains("gamma")) p.gamma = get<double>(j, "gamma");
  if (j.contains("tau")) p.tau = get<double>(j, "tau");
  if (j.contains("stepsize")) p.stepsize = get<int>(j, "stepsize");
  if (j.contains("length")) p.length = get<int>(j, "length");
  if (j.contains("burn_in")) p.burn_in = get<int>(j, "burn_in");
  if (j.contains("history_init")) p.history_init = get<double>(j, "history_init");
  if (j.contains("history_jitter")) p.history_jitter = get<double>(j, "history_jitter");
  return p;
}

inline Json readout_to_json(const ReadoutModel& model) {
  Json j = std::visit(
      [](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearReadout>) {
          return Json{{"weights", detail::vector_to_json(m.weights)}, {"offset", m.offset}};
        } else if constexpr (std::is_same_v<T, RegularizedLinearReadout>) {
          return Json{{"feature_count", m.feature_count},
                      {"retained", m.retained},
                      {"weights", detail::vector_to_json(m.weights)},
                      {"lambdas", detail::vector_to_json(m.lambdas)},
                      {"selection_order", m.selection_order},
                      {"offset", m.offset}};
        } else {
          return Json{{"kernel", to_string(m.kernel)},
                      {"variance", m.variance},
                      {"centers", detail::matrix_to_json(m.centers)},
                      {"weights", detail::vector_to_json(m.weights)},
                      {"output_offset", m.output_offset}};
        }
      },
      model);
  j["kind"] = readout_kind(model);
  return j;
}

inline ReadoutModel readout_from_json(const Json& j) {
  using detail::get;
  const auto kind = get<std::string>(j, "kind");
  if (kind == "linear") {
    LinearReadout r;
    r.weights = detail::vector_from_json(detail::field(j, "weights"), "linear weights");
    r.offset = get<double>(j, "offset");
    return r;
  }
  if (kind == "lrofr-linear") {
    RegularizedLinearReadout r;
    r.feature_count = get<Eigen::Index>(j, "feature_count");
    r.retained = get<std::vector<int>>(j, "retained");
    r.weights = detail::vector_from_json(detail::field(j, "weights"), "lrofr weights");
    r.lambdas = detail::vector_from_json(detail::field(j, "lambdas"), "lrofr lambdas");
    r.selection_order = get<std::vector<int>>(j, "selection_order");
    r.offset = get<double>(j, "offset");
    const auto k = static_cast<Eigen::Index>(r.retained.size());
    require(r.weights.size() == k && r.lambdas.size() == k && r.selection_order.size() == r.retained.size(),
            ErrorKind::DimensionMismatch, "lrofr readout arrays differ in length");
    for (int i : r.retained)
      require(i >= 0 && i < r.feature_count, ErrorKind::DimensionMismatch, "retained index out of range");
    return r;
  }
  if (kind == "rbf-dopt") {
    RbfReadout r;
    r.kernel = detail::kernel_from_string(get<std::string>(j, "kernel"));
    r.variance = get<double>(j, "variance");
    r.centers = detail::matrix_from_json(detail::field(j, "centers"), "rbf centers");
    r.weights = detail::vector_from_json(detail::field(j, "weights"), "rbf weights");
    r.output_offset = get<double>(j, "output_offset");
    require(r.weights.size() == r.centers.rows(), ErrorKind::DimensionMismatch,
            "rbf weights and centres differ in count");
    return r;
  }
  throw Error(ErrorKind::CorruptArchive, "unknown readout kind '" + kind + "'");
}

namespace detail {

inline Json selection_to_json(const SelectionMetadata& m) {
  Json steps = Json::array();
  for (const auto& s : m.trace)
    steps.push_back(Json{{"candidate", s.candidate}, {"criterion", s.criterion},
                         {"unexplained_ratio", s.unexplained_ratio}});
  return Json{{"method", m.method},
              {"selection_order", m.selection_order},
              {"lambdas", vector_to_json(m.lambdas)},
              {"iteration_count", m.iteration_count},
              {"converged", m.converged},
              {"zero_weight", m.zero_weight},
              {"degenerate", m.degenerate},
              {"terminated_by", m.terminated_by},
              {"trace", std::move(steps)}};
}

inline SelectionMetadata selection_from_json(const Json& j) {
  SelectionMetadata m;
  m.method = get<std::string>(j, "method");
  m.selection_order = get<std::vector<int>>(j, "selection_order");
  m.lambdas = vector_from_json(field(j, "lambdas"), "selection lambdas");
  m.iteration_count = get<int>(j, "iteration_count");
  m.converged = get<bool>(j, "converged");
  m.zero_weight = get<std::vector<int>>(j, "zero_weight");
  m.degenerate = get<std::vector<int>>(j, "degenerate");
  m.terminated_by = get<std::string>(j, "terminated_by");
  for (const auto& s : field(j, "trace"))
    m.trace.push_back({get<int>(s, "candidate"), get<double>(s, "criterion"), get<double>(s, "unexplained_ratio")});
  require(m.lambdas.size() == static_cast<Eigen::Index>(m.selection_order.size()), ErrorKind::DimensionMismatch,
          "selection lambdas and order differ in length");
  return m;
}

inline void check_finite(const ModelArchive& a) {
  const bool ok = a.weights.w.allFinite() && a.weights.w_in.allFinite() && a.weights.w_fb.allFinite() &&
                  (!a.harvest || (a.harvest->x.allFinite() && a.harvest->y.allFinite()));
  require(ok, ErrorKind::NonFinite, "archive holds non-finite values");
}

}  // namespace detail

/// Structural checks shared by save and load.
inline void validate_archive(const ModelArchive& a, ArchiveRole role) {
  a.config.validate();
  check_weights(a.config, a.weights);
  if (a.harvest) {
    require(a.harvest->x.cols() == a.config.readout_features(), ErrorKind::DimensionMismatch,
            "harvest width does not match the configuration");
    require(a.harvest->y.rows() == a.harvest->x.rows() && a.harvest->y.cols() == a.config.output_dim,
            ErrorKind::DimensionMismatch, "harvest response is not aligned with the design");
  }
  if (role == ArchiveRole::Harvest) require(a.harvest.has_value(), ErrorKind::InvalidArgument, "archive has no harvest");
  if (role == ArchiveRole::Model) {
    require(!a.readouts.empty(), ErrorKind::EmptyModel, "archive has no readout");
  }
  if (!a.readouts.empty()) {
    require(static_cast<int>(a.readouts.size()) == a.config.output_dim, ErrorKind::DimensionMismatch,
            "need one readout per output");
    for (const auto& r : a.readouts) {
      require(readout_input_dim(r) == a.config.readout_features(), ErrorKind::DimensionMismatch,
              "readout feature count does not match the configuration");
      if (const auto* rbf = std::get_if<RbfReadout>(&r))
        require(rbf->size() > 0, ErrorKind::EmptyModel, "RBF readout has no centres");
    }
  }
  require(a.selection.empty() || a.selection.size() == a.readouts.size(), ErrorKind::DimensionMismatch,
          "selection metadata does not match the readouts");
}

inline Json archive_to_json(const ModelArchive& a) {
  Json readouts = Json::array();
  for (const auto& r : a.readouts) readouts.push_back(readout_to_json(r));
  Json selection = Json::array();
  for (const auto& s : a.selection) selection.push_back(detail::selection_to_json(s));
  Json j{{"format_version", a.format_version},
         {"esn_config", config_to_json(a.config)},
         {"esn_weights",
          {{"w", detail::matrix_to_json(a.weights.w)},
           {"w_in", detail::matrix_to_json(a.weights.w_in)},
           {"w_fb", detail::matrix_to_json(a.weights.w_fb)},
           {"realized_spectral_radius", a.weights.realized_spectral_radius}}},
         {"readouts", std::move(readouts)},
         {"selection", std::move(selection)},
         {"provenance",
          {{"seed", a.provenance.seed},
           {"created", a.provenance.created},
           {"library_version", a.provenance.library_version},
           {"command", a.provenance.command}}}};
  j["harvest"] = a.harvest ? Json{{"x", detail::matrix_to_json(a.harvest->x)},
                                  {"y", detail::matrix_to_json(a.harvest->y)},
                                  {"first_k", a.harvest->first_k},
                                  {"last_k", a.harvest->last_k}}
                           : Json(nullptr);
  j["mg"] = a.mg ? mg_to_json(*a.mg) : Json(nullptr);
  j["training_mse"] = a.training_mse ? Json(*a.training_mse) : Json(nullptr);
  return j;
}

inline ModelArchive archive_from_json(const Json& j) {
  using detail::get;
  ModelArchive a;
  a.format_version = get<int>(j, "format_version");
  a.config = config_from_json(detail::field(j, "esn_config"));
  const Json& w = detail::field(j, "esn_weights");
  a.weights.w = detail::matrix_from_json(detail::field(w, "w"), "W");
  a.weights.w_in = detail::matrix_from_json(detail::field(w, "w_in"), "W_in");
  a.weights.w_fb = detail::matrix_from_json(detail::field(w, "w_fb"), "W_fb");
  a.weights.realized_spectral_radius = get<double>(w, "realized_spectral_radius");
  const Json& h = detail::field(j, "harvest");
  if (!h.is_null()) {
    StateHarvest sh;
    sh.x = detail::matrix_from_json(detail::field(h, "x"), "harvest X");
    sh.y = detail::matrix_from_json(detail::field(h, "y"), "harvest Y");
    sh.first_k = get<long>(h, "first_k");
    sh.last_k = get<long>(h, "last_k");
    a.harvest = std::move(sh);
  }
  for (const auto& r : detail::field(j, "readouts")) a.readouts.push_back(readout_from_json(r));
  for (const auto& s : detail::field(j, "selection")) a.selection.push_back(detail::selection_from_json(s));
  const Json& mg = detail::field(j, "mg");
  if (!mg.is_null()) a.mg = mg_from_json(mg);
  const Json& mse = detail::field(j, "training_mse");
  if (!mse.is_null()) a.training_mse = mse.get<double>();
  const Json& p = detail::field(j, "provenance");
  a.provenance.seed = get<std::uint64_t>(p, "seed");
  a.provenance.created = get<std::string>(p, "created");
  a.provenance.library_version = get<std::string>(p, "library_version");
  a.provenance.command = get<std::string>(p, "command");
  return a;
}

inline std::uint32_t crc32_of(const std::string& bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

/// Writes `text` to `path` via a temporary file in the same directory.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + tmp.string());
    out << text;
    out.flush();
    require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::Io, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::string serialize_archive(const ModelArchive& archive) {
  detail::check_finite(archive);
  validate_archive(archive, ArchiveRole::Any);
  const std::string body = archive_to_json(archive).dump() + "\n";
  char header[64];
  std::snprintf(header, sizeof(header), "%s %d crc32=%08x\n", kArchiveMagic, archive.format_version,
                static_cast<unsigned>(crc32_of(body)));
  return header + body;
}

inline ModelArchive deserialize_archive(const std::string& text, ArchiveRole role = ArchiveRole::Any) {
  const auto newline = text.find('\n');
  require(newline != std::string::npos, ErrorKind::CorruptArchive, "missing archive header");
  const std::string header = text.substr(0, newline);
  const std::string body = text.substr(newline + 1);

  char magic[32] = {};
  int version = 0;
  unsigned stored_crc = 0;
  const int fields = std::sscanf(header.c_str(), "%31s %d crc32=%8x", magic, &version, &stored_crc);
  require(fields >= 2 && std::string(magic) == kArchiveMagic, ErrorKind::CorruptArchive, "not an esnlr archive");
  require(version == kArchiveFormatVersion, ErrorKind::VersionMismatch,
          "archive format version " + std::to_string(version) + " is not supported (expected " +
              std::to_string(kArchiveFormatVersion) + ")");
  require(fields == 3, ErrorKind::CorruptArchive, "archive header has no checksum");

  Json j;
  try {
    j = Json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptArchive, std::string("archive body is not valid JSON: ") + e.what());
  }
  require(j.is_object(), ErrorKind::CorruptArchive, "archive body is not an object");
  require(detail::get<int>(j, "format_version") == version, ErrorKind::VersionMismatch,
          "header and body disagree on the format version");

  // Shape errors are reported before the checksum so that an edited
  // dimension gives a specific diagnostic.
  ModelArchive a = archive_from_json(j);
  validate_archive(a, role);
  require(crc32_of(body) == stored_crc, ErrorKind::CorruptArchive, "checksum mismatch");
  return a;
}

inline void save_archive(const ModelArchive& archive, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_archive(archive));
}

inline ModelArchive load_archive(const std::filesystem::path& path, ArchiveRole role = ArchiveRole::Any) {
  return deserialize_archive(read_file(path), role);
}

}  // namespace esnlr
