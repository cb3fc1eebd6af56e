#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

using namespace stratrt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stratrt_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_json(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json small_grey1d() { return {{"n_intervals", 50}, {"outer_iters", 40}}; }

}  // namespace

TEST(ConfigSchema, EmptyAtmosphereConfigResolvesDefaults) {
  json resolved;
  const auto cfg = cli::validate_config(json::object(), "atmosphere", &resolved);
  const auto& s = std::get<Scenario>(cfg);
  EXPECT_EQ(s.n_depth, Scenario{}.n_depth);
  EXPECT_DOUBLE_EQ(resolved.at("ground_albedo").get<double>(), 0.10);
  EXPECT_TRUE(resolved.contains("sun_temperature"));
}

TEST(ConfigSchema, EveryProblemIsItemized) {
  const json raw = {{"ground_albedo", 1.5}, {"n_depth", 1}, {"colour", "red"}, {"tol", "small"}};
  try {
    cli::validate_config(raw, "atmosphere");
    FAIL() << "expected ConfigError";
  } catch (const cli::ConfigError& e) {
    std::string all;
    for (const auto& i : e.items()) all += i + "\n";
    EXPECT_GE(e.items().size(), 4u) << all;
    EXPECT_NE(all.find("ground_albedo"), std::string::npos);
    EXPECT_NE(all.find("n_depth"), std::string::npos);
    EXPECT_NE(all.find("colour: unknown key"), std::string::npos);
    EXPECT_NE(all.find("tol: expected a number"), std::string::npos);
  }
  EXPECT_THROW(cli::validate_config(json::object(), "nope"), ArgumentError);
}

TEST(ConfigSchema, GreyBoundaryKeys) {
  const json raw = {{"bc_bottom", "neumann"}, {"bc_top", "dirichlet"}, {"bc_top_value", 2.0}};
  const auto o = std::get<cli::Grey1DOptions>(cli::validate_config(raw, "grey1d"));
  EXPECT_FALSE(o.config.bc_bottom.is_dirichlet());
  EXPECT_TRUE(o.config.bc_top.is_dirichlet());
  EXPECT_DOUBLE_EQ(o.config.bc_top.value, 2.0);
  EXPECT_THROW(cli::validate_config(json{{"bc_top", "robin"}}, "grey1d"), cli::ConfigError);
}

TEST(Cli, Grey1DWritesOutputsAndManifest) {
  const fs::path dir = scratch("grey1d");
  const auto r = run({"grey1d", "--config", write_json(dir, small_grey1d()).string(), "--out",
                      (dir / "out").string()});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "temperature.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "iterations.csv"));
  const json m = json::parse(slurp(dir / "out" / "manifest.json"));
  EXPECT_EQ(m.at("subcommand"), "grey1d");
  EXPECT_EQ(m.at("exit_code"), 0);
  EXPECT_TRUE(m.at("report").at("converged").get<bool>());
  EXPECT_EQ(m.at("config").at("n_intervals"), 50);
  EXPECT_EQ(m.at("outputs").size(), 2u);
  fs::remove_all(dir);
}

TEST(Cli, MissingConfigNamesThePath) {
  const auto r = run({"grey1d", "--config", "/nonexistent/lake.json"});
  EXPECT_EQ(r.code, cli::kInvalid);
  EXPECT_NE(r.err.find("/nonexistent/lake.json"), std::string::npos) << r.err;
}

TEST(Cli, UnknownSubcommandAndBadConfig) {
  EXPECT_EQ(run({"frobnicate"}).code, cli::kInvalid);
  const fs::path dir = scratch("bad");
  const auto r = run({"grey1d", "--config", write_json(dir, {{"kappa", -1}, {"extra", 1}}).string(),
                      "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, cli::kInvalid);
  EXPECT_NE(r.err.find("kappa"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("extra: unknown key"), std::string::npos) << r.err;
  fs::remove_all(dir);
}

TEST(Cli, IterationCapReportsNonConvergence) {
  const fs::path dir = scratch("cap");
  const auto r = run({"grey1d", "--config", write_json(dir, small_grey1d()).string(), "--out",
                      (dir / "out").string(), "--max-iters", "2"});
  EXPECT_EQ(r.code, cli::kNotConverged);
  const json m = json::parse(slurp(dir / "out" / "manifest.json"));
  EXPECT_FALSE(m.at("report").at("converged").get<bool>());
  EXPECT_EQ(m.at("exit_code"), 2);
  fs::remove_all(dir);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const fs::path dir = scratch("repeat");
  const auto cfg = write_json(dir, small_grey1d()).string();
  ASSERT_EQ(run({"grey1d", "--config", cfg, "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"grey1d", "--config", cfg, "--out", (dir / "b").string()}).code, 0);
  for (const char* f : {"temperature.csv", "iterations.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  fs::remove_all(dir);
}

TEST(Cli, SpecfunTable) {
  const fs::path dir = scratch("specfun");
  const auto cfg = write_json(dir, {{"samples", 5}}).string();
  ASSERT_EQ(run({"specfun-table", "--config", cfg, "--out", dir.string()}).code, 0);
  const std::string csv = slurp(dir / "specfun.csv");
  EXPECT_EQ(csv.rfind("x,E1,E2,E3,E5\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  fs::remove_all(dir);
}
