// esnlr: generate data, harvest echo states, analyse/fit readouts, evaluate.
//
// Every command writes its outputs under --output-dir together with
// <output>.manifest.json, which records the resolved parameters, seed, input
// checksums and the argv needed to rerun it.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "esnlr/esnlr.hpp"

namespace fs = std::filesystem;
using esnlr::ErrorKind;
using esnlr::Json;

namespace {

struct Globals {
  std::uint64_t seed = 42;
  bool seed_given = false;
  std::string output_dir = ".";
  bool verbose = false;
  std::string timestamp;
  std::vector<std::string> argv;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidSpec: return 3;
    case ErrorKind::Io: return 4;
    case ErrorKind::VersionMismatch:
    case ErrorKind::CorruptArchive:
    case ErrorKind::DimensionMismatch: return 5;
    case ErrorKind::NonFiniteState:
    case ErrorKind::NonFinite:
    case ErrorKind::InverseDomain: return 6;
    case ErrorKind::AllCandidatesDegenerate:
    case ErrorKind::BetaTooLarge:
    case ErrorKind::EmptyModel: return 7;
  }
  return 1;
}

std::string resolve_timestamp(const std::string& flag) {
  if (!flag.empty()) return flag;
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path out_path(const Globals& g, const std::string& name) { return fs::path(g.output_dir) / name; }

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08x", static_cast<unsigned>(v));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) { esnlr::write_file_atomic(path, text); }

void write_manifest(const Globals& g, const std::string& command, const fs::path& primary, Json resolved,
                    const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
  Json in = Json::object();
  for (const auto& p : inputs) in[p.string()] = hex32(esnlr::crc32_of(esnlr::read_file(p)));
  Json out = Json::object();
  for (const auto& p : outputs) out[p.string()] = hex32(esnlr::crc32_of(esnlr::read_file(p)));
  Json m{{"command", command},
         {"seed", g.seed},
         {"created", g.timestamp},
         {"library_version", esnlr::kLibraryVersion},
         {"parameters", std::move(resolved)},
         {"inputs", std::move(in)},
         {"outputs", std::move(out)},
         {"argv", g.argv}};
  write_text(fs::path(primary.string() + ".manifest.json"), m.dump(2) + "\n");
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(esnlr::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw esnlr::Error(ErrorKind::InvalidSpec, path + ": " + e.what());
  }
}

esnlr::CsvTable load_csv(const std::string& path) {
  std::ifstream in(path);
  esnlr::require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path);
  try {
    return esnlr::read_csv(in);
  } catch (const std::invalid_argument& e) {
    throw esnlr::Error(ErrorKind::InvalidArgument, path + ": " + e.what());
  }
}

Eigen::MatrixXd table_columns(const esnlr::CsvTable& t, const std::vector<std::string>& names) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t c = 0; c < names.size(); ++c) {
    esnlr::require(t.find(names[c]) >= 0, ErrorKind::InvalidArgument, "data has no column '" + names[c] + "'");
    const auto& col = t.column(names[c]);
    for (std::size_t r = 0; r < col.size(); ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
  }
  return m;
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
  esnlr::MgParams mg;
  int n_points = 2704;
  double noise = 0.01;
  std::string out;
};

void add_mg_flags(CLI::App* cmd, esnlr::MgParams& mg) {
  cmd->add_option("--alpha", mg.alpha, "Delayed feedback gain")->capture_default_str();
  cmd->add_option("--beta_exp", mg.beta_exp, "Nonlinearity exponent")->capture_default_str();
  cmd->add_option("--gamma", mg.gamma, "Decay rate")->capture_default_str();
  cmd->add_option("--tau", mg.tau, "Delay")->capture_default_str();
  cmd->add_option("--stepsize", mg.stepsize, "Integration substeps per unit time")->capture_default_str();
  cmd->add_option("--length", mg.length, "Samples to emit")->capture_default_str();
  cmd->add_option("--burn_in", mg.burn_in, "Samples discarded before output")->capture_default_str();
  cmd->add_option("--history_init", mg.history_init, "Initial history level")->capture_default_str();
  cmd->add_option("--history_jitter", mg.history_jitter, "Uniform jitter on the initial history")
      ->capture_default_str();
}

int run_generate_mg(const Globals& g, const GenerateOpts& o) {
  const auto raw = esnlr::generate_mg(o.mg, g.seed);
  const auto transformed = esnlr::transform_sequence(raw);
  const fs::path path = out_path(g, o.out.empty() ? "mg.csv" : o.out);
  std::ostringstream text;
  esnlr::write_csv(text, {"raw", "transformed"}, {raw, transformed});
  write_text(path, text.str());
  write_manifest(g, "generate mg", path, Json{{"mg", esnlr::mg_to_json(o.mg)}}, {}, {path});
  std::cout << "wrote " << raw.size() << " Mackey-Glass samples to " << path.string() << "\n";
  return 0;
}

int run_generate_surrogate(const Globals& g, const GenerateOpts& o) {
  const auto d = esnlr::surrogate_vector_field(o.n_points, g.seed, o.noise);
  const fs::path path = out_path(g, o.out.empty() ? "surrogate.csv" : o.out);
  auto col = [](const Eigen::MatrixXd& m, int c) {
    return std::vector<double>(m.col(c).data(), m.col(c).data() + m.rows());
  };
  std::ostringstream text;
  esnlr::write_csv(text, {"u0", "u1", "r0", "r1"},
                   {col(d.inputs, 0), col(d.inputs, 1), col(d.responses, 0), col(d.responses, 1)});
  write_text(path, text.str());
  write_manifest(g, "generate surrogate", path, Json{{"n_points", o.n_points}, {"noise", o.noise}}, {}, {path});
  std::cout << "wrote " << o.n_points << " surrogate vector-field rows to " << path.string() << "\n";
  return 0;
}

// ----------------------------------------------------------------- harvest

struct HarvestOpts {
  std::string config_file;
  std::string preset = "mackey_glass";
  std::string data;
  std::vector<std::string> teacher;
  std::vector<std::string> inputs;
  std::string out = "harvest.esnlr";
  // Flag overrides, named after the config fields.
  std::optional<int> reservoir_size, washout;
  std::optional<double> state_noise_amplitude, constant_input, target_spectral_radius;
  std::optional<bool> include_input_in_readout;
};

esnlr::EsnConfig resolve_config(const Globals& g, const HarvestOpts& o) {
  esnlr::EsnConfig c;
  if (o.preset == "mackey_glass") c = esnlr::EsnConfig::mackey_glass();
  else if (o.preset == "vector_field") c = esnlr::EsnConfig::vector_field();
  else if (o.preset != "none") throw esnlr::Error(ErrorKind::InvalidArgument, "--preset: unknown preset '" + o.preset + "'");
  if (!o.config_file.empty()) c = esnlr::config_from_json(read_json_file(o.config_file), c);
  if (o.reservoir_size) c.reservoir_size = *o.reservoir_size;
  if (o.washout) c.washout = *o.washout;
  if (o.state_noise_amplitude) c.state_noise_amplitude = *o.state_noise_amplitude;
  if (o.constant_input) c.constant_input = *o.constant_input;
  if (o.target_spectral_radius) c.target_spectral_radius = *o.target_spectral_radius;
  if (o.include_input_in_readout) c.include_input_in_readout = *o.include_input_in_readout;
  if (g.seed_given) c.seed = g.seed;
  c.validate();
  return c;
}

std::optional<esnlr::MgParams> mg_from_manifest(const std::string& data) {
  const fs::path manifest(data + ".manifest.json");
  if (!fs::exists(manifest)) return std::nullopt;
  const Json m = read_json_file(manifest.string());
  if (!m.contains("parameters") || !m["parameters"].contains("mg")) return std::nullopt;
  return esnlr::mg_from_json(m["parameters"]["mg"]);
}

int run_harvest(const Globals& g, HarvestOpts o) {
  const esnlr::EsnConfig config = resolve_config(g, o);
  const esnlr::CsvTable table = load_csv(o.data);
  if (o.teacher.empty()) {
    if (table.find("transformed") >= 0) o.teacher = {"transformed"};
    else if (table.find("r0") >= 0) o.teacher = {"r0", "r1"};
    else throw esnlr::Error(ErrorKind::InvalidArgument, "--teacher: cannot guess the teacher columns");
  }
  if (o.inputs.empty() && config.input_dim > 0 && !config.constant_input && table.find("u0") >= 0) {
    o.inputs = {"u0", "u1"};
  }
  const Eigen::MatrixXd teacher = table_columns(table, o.teacher);
  std::optional<Eigen::MatrixXd> inputs;
  if (!o.inputs.empty()) inputs = table_columns(table, o.inputs);

  esnlr::ModelArchive a;
  a.config = config;
  a.weights = esnlr::generate_weights(config);
  a.harvest = esnlr::harvest_states(config, a.weights, teacher, inputs ? &*inputs : nullptr);
  a.mg = mg_from_manifest(o.data);
  a.provenance = {config.seed, g.timestamp, esnlr::kLibraryVersion, "harvest"};

  const fs::path path = out_path(g, o.out);
  esnlr::save_archive(a, path);
  Json resolved{{"esn_config", esnlr::config_to_json(config)}, {"teacher", o.teacher}, {"inputs", o.inputs}};
  write_manifest(g, "harvest", path, resolved, {o.data}, {path});
  std::cout << "harvested " << a.harvest->x.rows() << "x" << a.harvest->x.cols() << " design (spectral radius "
            << esnlr::format_double(a.weights.realized_spectral_radius) << ") to " << path.string() << "\n";
  return 0;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeOpts {
  std::string harvest;
  std::string method = "ofr";
  int output = 0;
  std::optional<double> tolerance;
  esnlr::LrofrOptions lrofr;
  std::string prefix;
};

int run_analyze(const Globals& g, const AnalyzeOpts& o) {
  const esnlr::ModelArchive a = esnlr::load_archive(o.harvest, esnlr::ArchiveRole::Harvest);
  esnlr::require(o.output >= 0 && o.output < a.harvest->y.cols(), ErrorKind::InvalidArgument,
                 "--output: no such output component");
  const esnlr::RegressionProblem problem(a.harvest->x, a.harvest->y.col(o.output));
  const std::string prefix = o.prefix.empty() ? o.method : o.prefix;
  const fs::path trace_path = out_path(g, prefix + "_trace.csv");
  const fs::path lambda_path = out_path(g, prefix + "_lambda.csv");

  esnlr::SelectionTrace trace;
  std::vector<int> indices;
  Eigen::VectorXd lambdas, weights;
  if (o.method == "ofr") {
    auto [t, state] = esnlr::ofr_select(problem, o.tolerance);
    trace = std::move(t);
    indices = state.selected;
    lambdas = Eigen::VectorXd::Zero(state.size());
    weights = state.weights();
  } else if (o.method == "lrofr") {
    esnlr::LrofrOptions opts = o.lrofr;
    opts.tolerance = o.tolerance;
    const auto result = esnlr::lrofr_fit(problem, opts);
    trace = result.analysis_trace();
    indices = result.selected;
    lambdas = result.lambdas.lambdas;
    weights = result.weights;
    if (g.verbose)
      std::cerr << "lrofr: " << result.lambdas.iteration_count << " passes, converged="
                << (result.lambdas.converged ? "yes" : "no") << "\n";
  } else {
    throw esnlr::Error(ErrorKind::InvalidArgument, "--method must be ofr or lrofr");
  }

  std::ostringstream t_csv, l_csv;
  esnlr::write_trace_csv(t_csv, trace);
  esnlr::write_lambda_csv(l_csv, indices, lambdas, weights);
  write_text(trace_path, t_csv.str());
  write_text(lambda_path, l_csv.str());
  Json resolved{{"method", o.method}, {"output", o.output}};
  resolved["tolerance"] = o.tolerance ? Json(*o.tolerance) : Json(nullptr);
  write_manifest(g, "analyze", trace_path, resolved, {o.harvest}, {trace_path, lambda_path});

  std::cout << o.method << ": " << trace.steps.size() << " regressors selected";
  if (!trace.steps.empty())
    std::cout << ", unexplained ratio after step 1 = " << esnlr::format_double(trace.steps.front().unexplained_ratio)
              << ", final = " << esnlr::format_double(trace.steps.back().unexplained_ratio);
  std::cout << "\n";
  return 0;
}

// --------------------------------------------------------------------- fit

struct FitOpts {
  std::string harvest;
  std::string readout = "linear";
  esnlr::LrofrOptions lrofr;
  std::string kernel = "gaussian";
  double variance = 1.0;
  double dopt_beta = 1e-4;
  std::size_t center_stride = 1;
  bool keep_harvest = false;
  std::string out = "model.esnlr";
};

int run_fit(const Globals& g, const FitOpts& o) {
  esnlr::ModelArchive a = esnlr::load_archive(o.harvest, esnlr::ArchiveRole::Harvest);
  const Eigen::MatrixXd& x = a.harvest->x;
  const Eigen::MatrixXd& y = a.harvest->y;
  a.readouts.clear();
  a.selection.clear();

  double sse = 0.0;
  std::size_t attenuated = 0;
  for (Eigen::Index p = 0; p < y.cols(); ++p) {
    const Eigen::VectorXd target = y.col(p);
    if (o.readout == "linear") {
      a.readouts.emplace_back(esnlr::fit_linear_readout(x, target));
    } else if (o.readout == "lrofr-linear") {
      auto fit = esnlr::fit_regularized_linear_readout(x, target, o.lrofr);
      attenuated += esnlr::count_attenuated(fit.readout);
      a.selection.push_back(esnlr::summarize_selection("lrofr", fit.selection));
      a.readouts.emplace_back(std::move(fit.readout));
    } else if (o.readout == "rbf-dopt") {
      esnlr::RbfSpec spec;
      spec.kernel = o.kernel == "gaussian" ? esnlr::Kernel::Gaussian
                    : o.kernel == "thin_plate_spline"
                        ? esnlr::Kernel::ThinPlateSpline
                        : throw esnlr::Error(ErrorKind::InvalidArgument, "--kernel must be gaussian or thin_plate_spline");
      spec.variance = o.variance;
      spec.dopt_beta = o.dopt_beta;
      spec.center_stride = o.center_stride;
      spec.lrofr = o.lrofr;
      auto fit = esnlr::fit_rbf_readout(x, target, spec);
      a.selection.push_back(esnlr::summarize_selection("lrofr-dopt", fit.selection));
      a.readouts.emplace_back(std::move(fit.readout));
    } else {
      throw esnlr::Error(ErrorKind::InvalidArgument, "--readout must be linear, lrofr-linear or rbf-dopt");
    }
    sse += esnlr::training_mse(a.readouts.back(), x, target) * static_cast<double>(x.rows());
  }
  // A readout whose selection kept nothing cannot be run.
  if (o.readout == "lrofr-linear")
    for (const auto& r : a.readouts)
      esnlr::require(!std::get<esnlr::RegularizedLinearReadout>(r).retained.empty(), ErrorKind::EmptyModel,
                     "no regressor survived selection");

  a.training_mse = sse / static_cast<double>(x.rows() * y.cols());
  if (!o.keep_harvest) a.harvest.reset();
  a.provenance = {a.config.seed, g.timestamp, esnlr::kLibraryVersion, "fit " + o.readout};

  const fs::path path = out_path(g, o.out);
  esnlr::save_archive(a, path);
  Json resolved{{"readout", o.readout},
                {"initial_lambda", o.lrofr.initial_lambda},
                {"max_outer_iters", o.lrofr.max_outer_iters},
                {"lambda_rel_tol", o.lrofr.lambda_rel_tol}};
  if (o.readout == "rbf-dopt") {
    resolved["kernel"] = o.kernel;
    resolved["variance"] = o.variance;
    resolved["dopt_beta"] = o.dopt_beta;
    resolved["center_stride"] = o.center_stride;
  }
  write_manifest(g, "fit", path, resolved, {o.harvest}, {path});

  std::cout << o.readout << ": training MSE " << esnlr::format_double(*a.training_mse);
  if (o.readout == "lrofr-linear") {
    std::size_t kept = 0;
    for (const auto& r : a.readouts) kept += std::get<esnlr::RegularizedLinearReadout>(r).retained.size();
    std::cout << ", " << kept << " regressors kept, " << attenuated << " with lambda >= "
              << esnlr::format_double(esnlr::kAttenuationThreshold);
  } else if (o.readout == "rbf-dopt") {
    std::cout << ", centres per output:";
    for (const auto& r : a.readouts) std::cout << ' ' << std::get<esnlr::RbfReadout>(r).size();
  }
  std::cout << "\n";
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOpts {
  std::string model;
  esnlr::NrmseProtocol protocol;
  std::string out = "report.csv";
};

int run_evaluate(const Globals& g, const EvaluateOpts& o) {
  const esnlr::ModelArchive a = esnlr::load_archive(o.model, esnlr::ArchiveRole::Model);
  const esnlr::MgParams mg = a.mg.value_or(esnlr::MgParams{});
  esnlr::BenchmarkReport report = esnlr::evaluate_nrmse(a.config, a.weights, a.readouts, o.protocol, mg, g.seed);
  report.training_mse = a.training_mse;

  const fs::path path = out_path(g, o.out);
  std::ostringstream csv;
  esnlr::write_report_csv(csv, report);
  write_text(path, csv.str());
  Json resolved{{"n_trials", o.protocol.n_trials},
                {"warm_steps", o.protocol.warm_steps},
                {"horizons", o.protocol.horizons},
                {"independent_sequences", o.protocol.independent_sequences},
                {"mg", esnlr::mg_to_json(mg)}};
  write_manifest(g, "evaluate", path, resolved, {o.model}, {path});

  for (std::size_t h = 0; h < report.horizons.size(); ++h)
    std::cout << "NRMSE_" << report.horizons[h] << " = " << esnlr::format_double(report.nrmse[h]) << "\n";
  return 0;
}

// ----------------------------------------------------------------- inspect

int run_inspect(const std::string& path) {
  const esnlr::ModelArchive a = esnlr::load_archive(path);
  const auto& c = a.config;
  std::cout << "archive        " << path << " (format " << a.format_version << ")\n"
            << "created        " << a.provenance.created << " by " << a.provenance.command << ", library "
            << a.provenance.library_version << ", seed " << a.provenance.seed << "\n"
            << "reservoir      " << c.reservoir_size << " " << esnlr::to_string(c.activation) << " units, inputs "
            << c.input_dim << ", outputs " << c.output_dim << ", washout " << c.washout << ", noise "
            << esnlr::format_double(c.state_noise_amplitude) << "\n"
            << "spectral radius " << esnlr::format_double(a.weights.realized_spectral_radius) << "\n";
  if (a.harvest)
    std::cout << "harvest        " << a.harvest->x.rows() << "x" << a.harvest->x.cols() << ", k = " << a.harvest->first_k
              << ".." << a.harvest->last_k << "\n";
  for (std::size_t i = 0; i < a.readouts.size(); ++i) {
    const auto& r = a.readouts[i];
    std::cout << "readout[" << i << "]     " << esnlr::readout_kind(r);
    if (const auto* lr = std::get_if<esnlr::RegularizedLinearReadout>(&r))
      std::cout << ", " << lr->retained.size() << " of " << lr->feature_count << " regressors, "
                << esnlr::count_attenuated(*lr) << " attenuated";
    if (const auto* rbf = std::get_if<esnlr::RbfReadout>(&r))
      std::cout << ", " << rbf->size() << " " << esnlr::to_string(rbf->kernel) << " centres";
    std::cout << "\n";
  }
  for (std::size_t i = 0; i < a.selection.size(); ++i) {
    const auto& s = a.selection[i];
    std::cout << "selection[" << i << "]   " << s.method << ", " << s.iteration_count << " passes, converged "
              << (s.converged ? "yes" : "no") << ", stopped by " << s.terminated_by << "\n";
  }
  if (a.training_mse) std::cout << "training MSE   " << esnlr::format_double(*a.training_mse) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Echo state networks with locally regularized orthogonal forward regression readouts"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--output-dir", g.output_dir, "Directory for all outputs")->capture_default_str();
  app.add_flag("--verbose,-v", g.verbose, "Extra diagnostics on stderr");
  app.add_option("--timestamp", g.timestamp, "Creation time recorded in outputs (default: SOURCE_DATE_EPOCH or now)");

  // generate
  GenerateOpts gen;
  auto* generate = app.add_subcommand("generate", "Generate benchmark data");
  generate->require_subcommand(1);
  generate->fallthrough();
  auto* gen_mg = generate->add_subcommand("mg", "Mackey-Glass series (raw and tanh(y-1))");
  add_mg_flags(gen_mg, gen.mg);
  gen_mg->add_option("--out", gen.out, "Output CSV name");
  auto* gen_sur = generate->add_subcommand("surrogate", "Synthetic 2-D vector-field data");
  gen_sur->add_option("--n_points", gen.n_points, "Rows")->capture_default_str();
  gen_sur->add_option("--noise", gen.noise, "Response noise standard deviation")->capture_default_str();
  gen_sur->add_option("--out", gen.out, "Output CSV name");

  // harvest
  HarvestOpts hv;
  auto* harvest = app.add_subcommand("harvest", "Teacher-force a reservoir and store its states");
  harvest->add_option("--config", hv.config_file, "ESN config JSON (keys = config field names)")->check(CLI::ExistingFile);
  harvest->add_option("--preset", hv.preset, "mackey_glass, vector_field or none")->capture_default_str();
  harvest->add_option("--data", hv.data, "Data CSV")->required()->check(CLI::ExistingFile);
  harvest->add_option("--teacher", hv.teacher, "Teacher column names")->delimiter(',');
  harvest->add_option("--inputs", hv.inputs, "Input column names")->delimiter(',');
  harvest->add_option("--out", hv.out, "Archive name")->capture_default_str();
  harvest->add_option("--reservoir_size", hv.reservoir_size);
  harvest->add_option("--washout", hv.washout);
  harvest->add_option("--state_noise_amplitude", hv.state_noise_amplitude);
  harvest->add_option("--constant_input", hv.constant_input);
  harvest->add_option("--target_spectral_radius", hv.target_spectral_radius);
  harvest->add_option("--include_input_in_readout", hv.include_input_in_readout);

  // analyze
  AnalyzeOpts an;
  auto* analyze = app.add_subcommand("analyze", "Selection traces and lambda vectors as CSV");
  analyze->add_option("--harvest", an.harvest, "Harvest archive")->required()->check(CLI::ExistingFile);
  analyze->add_option("--method", an.method, "ofr or lrofr")->capture_default_str()->check(CLI::IsMember({"ofr", "lrofr"}));
  analyze->add_option("--output", an.output, "Output component")->capture_default_str();
  analyze->add_option("--tolerance", an.tolerance, "Stop once the unexplained ratio drops below this");
  analyze->add_option("--initial_lambda", an.lrofr.initial_lambda)->capture_default_str();
  analyze->add_option("--max_outer_iters", an.lrofr.max_outer_iters)->capture_default_str();
  analyze->add_option("--lambda_rel_tol", an.lrofr.lambda_rel_tol)->capture_default_str();
  analyze->add_option("--prefix", an.prefix, "Output file prefix (default: method)");

  // fit
  FitOpts ft;
  auto* fit = app.add_subcommand("fit", "Fit a readout on a harvest");
  fit->add_option("--harvest", ft.harvest, "Harvest archive")->required()->check(CLI::ExistingFile);
  fit->add_option("--readout", ft.readout, "linear, lrofr-linear or rbf-dopt")
      ->capture_default_str()
      ->check(CLI::IsMember({"linear", "lrofr-linear", "rbf-dopt"}));
  fit->add_option("--initial_lambda", ft.lrofr.initial_lambda)->capture_default_str();
  fit->add_option("--max_outer_iters", ft.lrofr.max_outer_iters)->capture_default_str();
  fit->add_option("--lambda_rel_tol", ft.lrofr.lambda_rel_tol)->capture_default_str();
  fit->add_option("--kernel", ft.kernel, "gaussian or thin_plate_spline")->capture_default_str();
  fit->add_option("--variance", ft.variance, "Gaussian width")->capture_default_str();
  fit->add_option("--dopt_beta", ft.dopt_beta, "D-optimality weight")->capture_default_str();
  fit->add_option("--center_stride", ft.center_stride, "Use every n-th state as a candidate centre")->capture_default_str();
  fit->add_flag("--keep_harvest", ft.keep_harvest, "Store the harvest in the model archive");
  fit->add_option("--out", ft.out, "Archive name")->capture_default_str();

  // evaluate
  EvaluateOpts ev;
  auto* evaluate = app.add_subcommand("evaluate", "Free-run NRMSE on fresh Mackey-Glass data");
  evaluate->add_option("--model", ev.model, "Model archive")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--n_trials", ev.protocol.n_trials)->capture_default_str();
  evaluate->add_option("--warm_steps", ev.protocol.warm_steps)->capture_default_str();
  evaluate->add_option("--horizons", ev.protocol.horizons)->delimiter(',')->capture_default_str();
  evaluate->add_flag("--independent_sequences", ev.protocol.independent_sequences,
                     "One fresh sequence per trial instead of one long attractor");
  evaluate->add_option("--out", ev.out, "Report CSV name")->capture_default_str();

  // inspect
  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Summarize an archive");
  inspect->add_option("archive", inspect_path, "Archive file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.seed_given = seed_opt->count() > 0;
  g.timestamp = resolve_timestamp(g.timestamp);

  try {
    if (*generate) return *gen_mg ? run_generate_mg(g, gen) : run_generate_surrogate(g, gen);
    if (*harvest) return run_harvest(g, hv);
    if (*analyze) return run_analyze(g, an);
    if (*fit) return run_fit(g, ft);
    if (*evaluate) return run_evaluate(g, ev);
    if (*inspect) return run_inspect(inspect_path);
  } catch (const esnlr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: Io: " << e.what() << "\n";
    return exit_code(ErrorKind::Io);
  }
  return 1;
}
