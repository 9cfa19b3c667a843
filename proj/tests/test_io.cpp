#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "mhdlab/config.hpp"
#include "mhdlab/errors.hpp"
#include "mhdlab/evolution.hpp"
#include "mhdlab/io.hpp"
#include "oracles.hpp"

using namespace mhdlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mhdlab_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

void write_bytes(const fs::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  os << s;
}

SnapshotData sample_data() {
  SnapshotData d;
  d.n = 8;
  d.length = 2.0;
  d.time = 0.125;
  d.names = {"u_x", "p"};
  d.metadata = R"({"seed":3})";
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  for (int f = 0; f < 2; ++f) {
    std::vector<double> v(512);
    for (auto& x : v) x = N(rng);
    d.fields.push_back(v);
  }
  return d;
}

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& what) {
  for (const auto& s : v)
    if (s.find(what) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Snapshot, DataRoundTripIsBitIdentical) {
  const auto d = sample_data();
  const auto p = scratch("data.mhdw");
  write_snapshot_data(d, p.string());
  const auto r = read_snapshot_data(p.string());
  EXPECT_EQ(r.n, d.n);
  EXPECT_EQ(r.length, d.length);
  EXPECT_EQ(r.time, d.time);
  EXPECT_EQ(r.names, d.names);
  EXPECT_EQ(r.metadata, d.metadata);
  EXPECT_EQ(r.fields, d.fields);
  EXPECT_TRUE(r.warning.empty());
  const auto q = scratch("data2.mhdw");
  write_snapshot_data(r, q.string());
  EXPECT_EQ(read_bytes(p), read_bytes(q));
}

TEST(Snapshot, StateRoundTrip) {
  auto cfg = oracle::small_config();
  cfg.t_end = 0.002;
  const auto tr = solve_mhdg(cfg);
  const SimState& s = tr.states.back();
  const auto p = scratch("state.mhdw");
  write_snapshot(s, cfg.grid, p.string());
  const SimState r = read_snapshot(p.string());
  EXPECT_EQ(r.t, s.t);
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(r.u[a].physical(), s.u[a].physical());
    EXPECT_EQ(r.b[a].physical(), s.b[a].physical());
    EXPECT_EQ(r.v[a].physical(), s.v[a].physical());
  }
  EXPECT_EQ(r.p.physical(), s.p.physical());
  EXPECT_EQ(r.q.physical(), s.q.physical());
}

TEST(Snapshot, MalformedFilesAreRejected) {
  const auto good = scratch("good.mhdw");
  write_snapshot_data(sample_data(), good.string());
  const std::string bytes = read_bytes(good);

  const auto bad = scratch("bad.mhdw");
  write_bytes(bad, "XXXX" + bytes.substr(4));
  EXPECT_THROW(read_snapshot_data(bad.string()), FormatError);
  write_bytes(bad, bytes.substr(0, bytes.size() - 8));
  EXPECT_THROW(read_snapshot_data(bad.string()), FormatError);
  write_bytes(bad, bytes.substr(0, 10));
  EXPECT_THROW(read_snapshot_data(bad.string()), FormatError);
  write_bytes(bad, bytes + "x");
  EXPECT_THROW(read_snapshot_data(bad.string()), FormatError);
  EXPECT_THROW(read_snapshot_data(scratch("missing.mhdw").string()), Error);
}

TEST(Snapshot, VersionHandling) {
  auto d = sample_data();
  const auto p = scratch("minor.mhdw");
  d.minor = kSnapshotMinor + 1;
  write_snapshot_data(d, p.string());
  const auto r = read_snapshot_data(p.string());
  EXPECT_FALSE(r.warning.empty());
  EXPECT_EQ(r.fields, d.fields);
  d.minor = kSnapshotMinor;
  d.major = kSnapshotMajor + 1;
  write_snapshot_data(d, p.string());
  EXPECT_THROW(read_snapshot_data(p.string()), FormatError);
}

TEST(Snapshot, InconsistentDataIsNotWritten) {
  auto d = sample_data();
  d.names.pop_back();
  EXPECT_THROW(write_snapshot_data(d, scratch("x.mhdw").string()), FormatError);
  d = sample_data();
  d.fields[1].pop_back();
  EXPECT_THROW(write_snapshot_data(d, scratch("x.mhdw").string()), FormatError);
}

TEST(Ledgers, EmptyFileHasHeaderOnly) {
  const auto p = scratch("empty.csv");
  write_ledgers({}, p.string());
  const std::string text = read_bytes(p);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_NE(text.find("t_a,t_b"), std::string::npos);
  EXPECT_NE(text.find("slack"), std::string::npos);
  EXPECT_TRUE(read_ledgers(p.string()).empty());
}

TEST(Ledgers, RoundTripIsExact) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1e3, 1e3);
  std::vector<EnergyLedger> rows(5);
  for (auto& L : rows) {
    L.t_a = U(rng);
    L.t_b = U(rng);
    for (auto& t : L.terms) t = U(rng) * std::pow(10.0, U(rng) / 100.0);
    L.slack = L.rhs() - L.lhs();
  }
  rows[0].terms.fill(0.0);
  rows[0].slack = 0.0;
  const auto p = scratch("rows.csv");
  write_ledgers(rows, p.string());
  const auto back = read_ledgers(p.string());
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].t_a, rows[i].t_a);
    EXPECT_EQ(back[i].t_b, rows[i].t_b);
    EXPECT_EQ(back[i].terms, rows[i].terms);
    EXPECT_EQ(back[i].slack, rows[i].slack);
  }
}

TEST(Ledgers, MalformedRowRejected) {
  const auto p = scratch("badrow.csv");
  write_ledgers({}, p.string());
  std::ofstream(p, std::ios::app) << "1,2,3\n";
  EXPECT_THROW(read_ledgers(p.string()), FormatError);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 6.283185307179586, 1e-300, -2.5e17,
                   std::numeric_limits<double>::min(), std::numeric_limits<double>::max()})
    EXPECT_EQ(std::stod(format_double(v)), v) << format_double(v);
}

TEST(Config, MinimalParses) {
  const Config c = parse_config(MHDLAB_CONFIG_DIR "/minimal.json");
  EXPECT_EQ(c.sim.grid.n(), 16);
  EXPECT_DOUBLE_EQ(c.sim.grid.length(), 6.283185307179586);
  EXPECT_EQ(c.sim.dt, 0.001);
  EXPECT_EQ(c.sim.t_end, 0.01);
  EXPECT_NEAR(c.sim.epsilon, 0.2 * 6.283185307179586, 1e-15);
}

TEST(Config, AcceptanceConfigsParse) {
  for (const auto& e : fs::directory_iterator(MHDLAB_CONFIG_DIR "/acceptance"))
    EXPECT_NO_THROW(parse_config(e.path().string())) << e.path();
}

TEST(Config, ViolationsNameTheKey) {
  const std::string base = R"("N": 16, "L": 6.283185307179586, "t_end": 0.01, "epsilon": 0.2)";
  EXPECT_TRUE(mentions(violations_of("{" + base + R"(, "dt": 0})"), "dt"));
  EXPECT_TRUE(mentions(violations_of("{" + base + R"(, "dt": 0.001, "visocsity": 1})"), "visocsity"));
  const auto many = violations_of(R"({"N": 7, "L": -1, "dt": 0.001, "t_end": 0.01, "epsilon": 0.2, "bogus": 1})");
  EXPECT_GE(many.size(), 3u);
  EXPECT_TRUE(mentions(many, "N"));
  EXPECT_TRUE(mentions(many, "L"));
  EXPECT_TRUE(mentions(many, "bogus"));
}

TEST(Config, ScaleChecks) {
  const std::string grid = R"("N": 16, "L": 6.283185307179586, "dt": 0.001, "t_end": 0.01)";
  EXPECT_TRUE(mentions(violations_of("{" + grid + R"(, "epsilon": 0.05})"), "epsilon"));
  EXPECT_TRUE(mentions(violations_of("{" + grid + R"(, "epsilon": 0.2, "eps_list": [0.2, 0.3]})"),
                       "eps_list"));
  EXPECT_TRUE(violations_of("{" + grid + R"(, "epsilon": 0.2, "eps_list": [0.3, 0.2]})").empty());
}

TEST(Config, NestedKeysAreQualified) {
  const std::string grid = R"("N": 16, "L": 6.283185307179586, "dt": 0.001, "t_end": 0.01, "epsilon": 0.2)";
  const auto v = violations_of("{" + grid + R"(, "initial": {"type": "vortex"}, "picard": {"tol": "small"}})");
  EXPECT_TRUE(mentions(v, "initial.type"));
  EXPECT_TRUE(mentions(v, "picard.tol"));
}

TEST(Config, MissingFileAndBadJson) {
  EXPECT_THROW(parse_config("/nonexistent/config.json"), Error);
  EXPECT_THROW(parse_config_text("{ not json"), Error);
}
