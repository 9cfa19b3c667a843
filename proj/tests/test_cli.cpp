#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "mhdlab/commands.hpp"
#include "mhdlab/io.hpp"

using namespace mhdlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mhdlab_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json report(const fs::path& dir) {
  std::ifstream is(dir / "report.json");
  return nlohmann::json::parse(is);
}

int shell(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const std::string kMinimal = MHDLAB_CONFIG_DIR "/minimal.json";

}  // namespace

TEST(Run, SimulateWritesArtifacts) {
  const fs::path out = scratch("simulate");
  ASSERT_EQ(run({"simulate", kMinimal, out.string(), std::nullopt}), 0);
  std::size_t snaps = 0;
  for (const auto& e : fs::directory_iterator(out / "snapshots")) {
    EXPECT_EQ(e.path().extension(), ".mhdw");
    ++snaps;
  }
  EXPECT_GE(snaps, 1u);
  const auto rows = read_ledgers((out / "ledgers.csv").string());
  EXPECT_FALSE(rows.empty());
  const auto j = report(out);
  EXPECT_EQ(j["command"], "simulate");
  EXPECT_TRUE(j["pass"].get<bool>());
  ASSERT_FALSE(j["checks"].empty());
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("anchor"));
    EXPECT_TRUE(c.contains("measured"));
    EXPECT_TRUE(c.contains("tolerance"));
  }
  EXPECT_EQ(j["values"]["snapshots"].get<int>(), static_cast<int>(snaps));
}

TEST(Run, SeedOverrideIsRecorded) {
  const fs::path out = scratch("seed");
  ASSERT_EQ(run({"simulate", kMinimal, out.string(), 42}), 0);
  EXPECT_EQ(report(out)["seed"].get<int>(), 42);
}

TEST(Run, ErrorsGiveStatusTwo) {
  const fs::path out = scratch("errors");
  testing::internal::CaptureStderr();
  EXPECT_EQ(run({"simulate", "/nonexistent.json", out.string(), std::nullopt}), 2);
  EXPECT_EQ(run({"integrate", kMinimal, out.string(), std::nullopt}), 2);
  const std::string err = testing::internal::GetCapturedStderr();
  EXPECT_NE(err.find("unknown command"), std::string::npos);
}

TEST(Run, InvalidConfigNamesTheKey) {
  const fs::path out = scratch("invalid");
  const fs::path cfg = out / "bad.json";
  std::ofstream(cfg) << R"({"N": 16, "L": 6.283185307179586, "dt": 0, "t_end": 0.01, "epsilon": 0.2})";
  testing::internal::CaptureStderr();
  EXPECT_EQ(run({"simulate", cfg.string(), out.string(), std::nullopt}), 2);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("dt"), std::string::npos);
}

TEST(Run, VerifyEnergyReportsSlacks) {
  const fs::path out = scratch("energy");
  // the 16^3 minimal run under-resolves the weighted balance, so only the
  // exit status / report agreement and the global equality are asserted
  const int rc = run({"verify-energy", kMinimal, out.string(), std::nullopt});
  const auto j = report(out);
  EXPECT_EQ(rc, j["pass"].get<bool>() ? 0 : 1);
  bool global = false;
  for (const auto& c : j["checks"])
    if (c["anchor"] == "global-energy-equality") global = c["pass"].get<bool>();
  EXPECT_TRUE(global);
  EXPECT_TRUE(fs::exists(out / "ledgers.csv"));
}

TEST(Binary, SubcommandsAndExitCodes) {
  const std::string cli = MHDLAB_CLI;
  const fs::path out = scratch("binary");
  EXPECT_EQ(shell(cli + " simulate --config " + kMinimal + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "report.json"));
  EXPECT_EQ(shell(cli + " simulate --config /nonexistent.json --out " + out.string()), 2);
  EXPECT_NE(shell(cli + " simulate"), 0);
  EXPECT_NE(shell(cli + " frobnicate --config " + kMinimal), 0);
  EXPECT_EQ(shell(cli + " --help"), 0);
}

TEST(Binary, CommandListIsComplete) {
  const auto& names = command_names();
  for (const char* n : {"simulate", "verify-energy", "verify-weighted", "verify-pressure",
                        "verify-scaling", "dss-generate", "eps-study", "operator-ratios"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
}
