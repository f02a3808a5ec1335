#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "esnlr/persistence.hpp"

namespace esnlr {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "esnlr_persistence_test";
  fs::create_directories(dir);
  return dir / name;
}

Eigen::MatrixXd mg_teacher() {
  const auto s = transform_sequence(generate_mg(MgParams{}, 7));
  return Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
}

/// Small MG model (fast) carrying all three readout kinds across outputs is
/// not possible with P = 1, so each archive carries one kind.
ModelArchive small_archive(const std::string& kind) {
  ModelArchive a;
  a.config = EsnConfig::mackey_glass();
  a.config.reservoir_size = 40;
  a.config.washout = 100;
  a.weights = generate_weights(a.config);
  const Eigen::MatrixXd teacher = mg_teacher().topRows(400);
  a.harvest = harvest_states(a.config, a.weights, teacher);
  const auto& h = *a.harvest;
  if (kind == "linear") {
    a.readouts = {fit_linear_readout(h.x, h.y.col(0))};
  } else if (kind == "lrofr-linear") {
    auto fit = fit_regularized_linear_readout(h.x, h.y.col(0));
    a.selection = {summarize_selection("lrofr", fit.selection)};
    a.readouts = {fit.readout};
  } else {
    RbfSpec spec;
    spec.variance = 0.5;
    auto fit = fit_rbf_readout(h.x, h.y.col(0), spec);
    a.selection = {summarize_selection("lrofr-dopt", fit.selection)};
    a.readouts = {fit.readout};
  }
  a.mg = MgParams{};
  a.training_mse = training_mse(a.readouts[0], h.x, h.y.col(0));
  a.provenance = {a.config.seed, "2024-01-01T00:00:00Z", kLibraryVersion, "test"};
  return a;
}

Eigen::MatrixXd run(const ModelArchive& a) {
  const auto& h = *a.harvest;
  return free_run(a.config, a.weights, a.readouts, h.x.row(h.x.rows() - 1).transpose(),
                  h.y.row(h.y.rows() - 1).transpose(), 120);
}

class RoundTrip : public ::testing::TestWithParam<std::string> {};

TEST_P(RoundTrip, FreeRunBitIdenticalAndResaveByteIdentical) {
  const ModelArchive a = small_archive(GetParam());
  const fs::path path = temp_path(GetParam() + ".esnlr");
  save_archive(a, path);
  const ModelArchive b = load_archive(path, ArchiveRole::Model);
  EXPECT_TRUE(run(a) == run(b));
  EXPECT_TRUE(a.weights.w == b.weights.w);
  EXPECT_TRUE(a.harvest->x == b.harvest->x);
  EXPECT_EQ(a.training_mse, b.training_mse);
  EXPECT_EQ(serialize_archive(b), read_file(path));
  EXPECT_FALSE(fs::exists(path.string() + ".tmp"));
}

INSTANTIATE_TEST_SUITE_P(Kinds, RoundTrip, ::testing::Values("linear", "lrofr-linear", "rbf-dopt"),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (auto& c : s) c = (c == '-') ? '_' : c;
                           return s;
                         });

TEST(Archive, ExtremeDoublesRoundTrip) {
  ModelArchive a = small_archive("linear");
  auto& w = std::get<LinearReadout>(a.readouts[0]).weights;
  w[0] = 0.1;
  w[1] = 1e-300;
  w[2] = -5e-324;
  w[3] = 1.7976931348623157e308;
  w[4] = 1.0 / 3.0;
  w[5] = -0.0;
  const ModelArchive b = deserialize_archive(serialize_archive(a));
  const auto& v = std::get<LinearReadout>(b.readouts[0]).weights;
  for (Eigen::Index i = 0; i < w.size(); ++i) EXPECT_EQ(std::memcmp(&w[i], &v[i], sizeof(double)), 0) << i;
}

ErrorKind kind_of(const std::string& text, ArchiveRole role = ArchiveRole::Any) {
  try {
    deserialize_archive(text, role);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "archive unexpectedly loaded";
  return ErrorKind::Io;
}

TEST(Archive, VersionMismatchRejected) {
  std::string text = serialize_archive(small_archive("linear"));
  const auto pos = text.find(" 1 crc32");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 2, " 2");
  EXPECT_EQ(kind_of(text), ErrorKind::VersionMismatch);
}

TEST(Archive, EditedDimensionRejected) {
  std::string text = serialize_archive(small_archive("linear"));
  const std::string from = "\"cols\":40,";
  const auto pos = text.find(from);
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, from.size(), "\"cols\":39,");
  EXPECT_EQ(kind_of(text), ErrorKind::DimensionMismatch);
}

TEST(Archive, SingleByteCorruptionDetected) {
  const std::string text = serialize_archive(small_archive("lrofr-linear"));
  const auto body = text.find('\n') + 1;
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> pos(body, text.size() - 2);
  int corrupt = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::string bad = text;
    const std::size_t p = pos(rng);
    bad[p] = static_cast<char>(bad[p] == '7' ? '3' : '7');
    try {
      deserialize_archive(bad);
      ADD_FAILURE() << "corruption at byte " << p << " not detected";
    } catch (const Error& e) {
      corrupt += e.kind() == ErrorKind::CorruptArchive;
    }
  }
  EXPECT_GT(corrupt, 0);
}

TEST(Archive, DigitFlipInPayloadIsChecksumFailure) {
  std::string text = serialize_archive(small_archive("linear"));
  const auto fb = text.find("\"w_fb\"");
  const auto data = text.find("\"data\":[", fb);
  ASSERT_NE(data, std::string::npos);
  std::size_t p = data + 8;
  while (!std::isdigit(static_cast<unsigned char>(text[p])) || text[p] == '0') ++p;
  text[p] = text[p] == '9' ? '8' : static_cast<char>(text[p] + 1);
  EXPECT_EQ(kind_of(text), ErrorKind::CorruptArchive);
}

TEST(Archive, EmptyReadoutRejectedAsModel) {
  ModelArchive a = small_archive("linear");
  a.readouts.clear();
  const std::string text = serialize_archive(a);  // fine as a harvest archive
  EXPECT_NO_THROW(deserialize_archive(text, ArchiveRole::Harvest));
  EXPECT_EQ(kind_of(text, ArchiveRole::Model), ErrorKind::EmptyModel);

  ModelArchive rbf = small_archive("rbf-dopt");
  auto& r = std::get<RbfReadout>(rbf.readouts[0]);
  r.centers.resize(0, r.centers.cols());
  r.weights.resize(0);
  EXPECT_THROW(serialize_archive(rbf), Error);
}

TEST(Archive, HeaderAndGarbage) {
  EXPECT_EQ(kind_of("not an archive"), ErrorKind::CorruptArchive);
  EXPECT_EQ(kind_of("esnlr-archive 1 crc32=00000000\n{broken"), ErrorKind::CorruptArchive);
  const std::string text = serialize_archive(small_archive("linear"));
  EXPECT_EQ(text.rfind("esnlr-archive 1 crc32=", 0), 0u);
  EXPECT_EQ(text.back(), '\n');
  try {
    load_archive(temp_path("does_not_exist.esnlr"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(Config, JsonRoundTripAndOverrides) {
  EsnConfig c = EsnConfig::vector_field();
  c.constant_input = 0.3;
  c.seed = 18446744073709551615ull;
  const EsnConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back).dump(), config_to_json(c).dump());
  EXPECT_EQ(back.seed, c.seed);

  const EsnConfig mg = config_from_json(Json{{"washout", 50}, {"constant_input", nullptr}}, EsnConfig::mackey_glass());
  EXPECT_EQ(mg.washout, 50);
  EXPECT_FALSE(mg.constant_input.has_value());
  EXPECT_EQ(mg.reservoir_size, 400);
  EXPECT_THROW(config_from_json(Json{{"reservoir", 3}}), Error);
  EXPECT_THROW(config_from_json(Json{{"activation", "relu"}}), Error);
}

}  // namespace
}  // namespace esnlr
