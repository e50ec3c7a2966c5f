#include "lyz/json_io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace lyz;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("lyz_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Invocation run(const std::string& args) {
  const fs::path dir = scratch();
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(LYZ_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Invocation r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string data(const std::string& name) { return std::string(LYZ_DATA_DIR) + "/" + name; }

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, EllipsoidOfGaussian) {
  const Invocation r = run("ellipsoid --input " + data("gaussian.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  const Mat A = matrix_from_json(j.at("result").at("A"), "A");
  EXPECT_LT(rel_frobenius(A, 0.5 * Mat::Identity(2, 2)), 1e-6);
  EXPECT_FALSE(j.contains("metadata"));
}

TEST(Cli, BodyLyzOfSquare) {
  const Invocation r = run("body-lyz --input " + data("square_gauge.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j.at("checks").at("functional_matches_half_Q").at("pass").get<bool>());
}

TEST(Cli, OutputFileAndPlot) {
  const fs::path out = scratch() / "report.json";
  fs::remove(out);
  fs::remove(scratch() / "report.svg");
  const Invocation r = run("slog --input " + data("hexagon.json") + " --output " + out.string() + " --plot");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(out));
  EXPECT_EQ(j.at("schema"), kSchemaVersion);
  const std::string svg = slurp(scratch() / "report.svg");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
}

TEST(Cli, MalformedJsonExitsTwo) {
  const fs::path bad = write_temp("bad.json", "{\"schema\": \"1\", \"function\": {\"dim\": 2,, }}");
  const Invocation r = run("ellipsoid --input " + bad.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("byte"), std::string::npos) << r.err;
  const json report = json::parse(r.out);
  EXPECT_EQ(report.at("error").at("kind"), "parse");
  EXPECT_EQ(report.at("error").at("exit_code"), 2);
}

TEST(Cli, UsageErrorExitsTwo) {
  EXPECT_EQ(run("ellipsoid --backend simpson --input " + data("gaussian.json")).code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
}

TEST(Cli, FailedCheckExitsOne) {
  // A few hundred Monte Carlo samples cannot meet a 1e-9 tolerance.
  const Invocation r = run("body-lyz --input " + data("hexagon.json") + " --backend mc --budget 640 --tolerance 1e-9");
  EXPECT_EQ(r.code, 1) << r.err;
  EXPECT_EQ(json::parse(r.out).at("error").at("kind"), "check");
}

TEST(Cli, ComputationErrorExitsThree) {
  // For p = 1 the LYZ denominator vanishes identically.
  const fs::path norm = write_temp(
      "norm.json",
      R"({"schema": "1", "function": {"dim": 2, "kind": "gauge_power", "p": 1.0, "body": {"kind": "cube", "dim": 2}}})");
  const Invocation r = run("ellipsoid --input " + norm.string() + " --budget 4096");
  EXPECT_EQ(r.code, 3);
  const json e = json::parse(r.err.substr(r.err.find('{')));
  EXPECT_EQ(e.at("error").at("kind"), "computation");
}

TEST(Cli, VerifySingleCriterionIsDeterministic) {
  const fs::path a = scratch() / "v1.json", b = scratch() / "v2.json";
  const Invocation r1 = run("verify --only 4 --seed 42 --output " + a.string());
  const Invocation r2 = run("verify --only 4 --seed 42 --output " + b.string());
  ASSERT_EQ(r1.code, 0) << r1.err;
  ASSERT_EQ(r2.code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(r1.err.find("[PASS] 4."), std::string::npos) << r1.err;
}

TEST(Cli, TimestampsAddMetadata) {
  const Invocation r = run("verify --only 4 --timestamps");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(json::parse(r.out).contains("metadata"));
}
