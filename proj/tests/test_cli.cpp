#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shiftop/cli.hpp"

using namespace shiftop;
using namespace shiftop::cli;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

AnalysisConfig config_for(std::initializer_list<double> coeffs) {
  AnalysisConfig c;
  c.transfer = WienerElement::polynomial(coeffs);
  return c;
}

const std::string& file(const CommandResult& r, const std::string& name) {
  for (const auto& [n, contents] : r.files) {
    if (n == name) return contents;
  }
  throw std::runtime_error("no output file " + name);
}

bool has_file(const CommandResult& r, const std::string& name) {
  for (const auto& entry : r.files) {
    if (entry.first == name) return true;
  }
  return false;
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("shiftop_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + " " SHIFTOP_CLI_PATH " " + args + " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Analyze, CounterexampleReport) {
  const auto r = run_analyze(config_for({1.0, -2.0}));
  ASSERT_EQ(r.exit_code, kSuccess);
  const auto report = json::parse(file(r, "analyze.json"));
  EXPECT_EQ(report["classification"]["verdict"], "NonInvertible");
  EXPECT_NEAR(report["sup_norm"].get<double>(), 3.0, 1e-6);
  EXPECT_EQ(report["l1_norm"].get<double>(), 3.0);
  EXPECT_EQ(report["inverse"]["side"], "anticausal");

  const auto asym = csv_rows(file(r, "asymmetry.csv"));
  ASSERT_EQ(asym.size(), 4u);
  double prev = 0.0;
  for (const auto& row : asym) {
    EXPECT_NEAR(row[1], 1.0, 1e-8);
    EXPECT_GT(row[2], prev);
    prev = row[2];
  }
  EXPECT_GT(asym.back()[2], 1e60);
  EXPECT_NE(r.summary.find("verdict: NonInvertible"), std::string::npos);
}

TEST(Analyze, ConstantOne) {
  const auto r = run_analyze(config_for({1.0}));
  ASSERT_EQ(r.exit_code, kSuccess);
  const auto report = json::parse(file(r, "analyze.json"));
  EXPECT_EQ(report["classification"]["verdict"], "Invertible");
  EXPECT_EQ(report["sup_norm"].get<double>(), 1.0);
  for (const auto& row : report["isometry"]) {
    EXPECT_NEAR(row["norm"].get<double>(), 1.0, 1e-14);
    EXPECT_NEAR(row["gap"].get<double>(), 0.0, 1e-14);
  }
  for (const auto& row : report["asymmetry"]) {
    EXPECT_NEAR(row["norm_circulant_inverse"].get<double>(), 1.0, 1e-14);
    EXPECT_NEAR(row["norm_triangular_inverse"].get<double>(), 1.0, 1e-14);
  }
}

TEST(Analyze, GeometricInverseInReport) {
  const auto r = run_analyze(config_for({1.0, -0.5}));
  const auto report = json::parse(file(r, "analyze.json"));
  EXPECT_EQ(report["classification"]["verdict"], "Invertible");
  const auto inv = wiener_from_json(report["inverse"]);
  EXPECT_EQ(report["inverse"]["side"], "causal");
  EXPECT_EQ(inv.offset(), 0);
  for (int n = 0; n <= inv.last_index(); ++n) {
    EXPECT_EQ(inv[n], Complex(std::pow(0.5, n)));
  }
}

TEST(Analyze, SkipsAsymmetryWhenTriangleIsSingular) {
  auto c = config_for({0.0, 1.0});
  const auto r = run_analyze(c);
  ASSERT_EQ(r.exit_code, kSuccess);
  EXPECT_FALSE(has_file(r, "asymmetry.csv"));
  EXPECT_TRUE(json::parse(file(r, "analyze.json"))["asymmetry"].is_null());
}

TEST(Analyze, InvalidConfig) {
  auto c = config_for({1.0});
  c.grid_size = 1000;
  EXPECT_EQ(run_analyze(c).exit_code, kInputError);
  c = config_for({1.0});
  c.dims = {16, 4};
  EXPECT_EQ(run_analyze(c).exit_code, kInputError);
  c = config_for({1.0});
  c.tol = 1e-2;
  const auto r = run_analyze(c);
  EXPECT_EQ(r.exit_code, kInputError);
  EXPECT_NE(r.message.find("--tol"), std::string::npos);
  EXPECT_TRUE(r.files.empty());
}

TEST(Invert, AnticausalCounterexample) {
  auto c = config_for({1.0, -2.0});
  c.side = "anticausal";
  const auto r = run_invert(c);
  ASSERT_EQ(r.exit_code, kSuccess);
  const auto j = json::parse(file(r, "inverse.json"));
  EXPECT_EQ(j["side"], "anticausal");
  EXPECT_LE(j["tail_bound"].get<double>(), 1e-10);
  const auto inv = wiener_from_json(j);
  EXPECT_EQ(inv.last_index(), -1);
  for (int k = 1; k <= -inv.offset(); ++k) {
    EXPECT_NEAR(inv[-k].real(), -std::pow(0.5, k), 1e-15);
  }
}

TEST(Invert, Constant) {
  const auto r = run_invert(config_for({1.0}));
  ASSERT_EQ(r.exit_code, kSuccess);
  EXPECT_EQ(wiener_from_json(json::parse(file(r, "inverse.json"))),
            WienerElement::constant(1.0));
}

TEST(Invert, ExitCodes) {
  EXPECT_EQ(run_invert(config_for({1.0, -1.0})).exit_code, kBorderline);
  // Roots 1/0.2 and 1/5 straddle the circle.
  EXPECT_EQ(run_invert(config_for({1.0, -5.2, 1.0})).exit_code, kInputError);
  auto forced = config_for({1.0, -2.0});
  forced.side = "causal";
  EXPECT_EQ(run_invert(forced).exit_code, kInputError);

  auto slow = config_for({1.0, -0.99});
  slow.max_len = 50;
  slow.eps = 1e-12;
  const auto r = run_invert(slow);
  EXPECT_EQ(r.exit_code, kTailNotCertified);
  EXPECT_TRUE(r.files.empty());
  EXPECT_NE(r.message.find("bound"), std::string::npos);
}

TEST(Simulate, WhiteNoiseColumnsAgree) {
  auto c = config_for({1.0});
  c.length = 10;
  c.max_lag = 3;
  const auto r = run_simulate(c);
  ASSERT_EQ(r.exit_code, kSuccess);
  const auto rows = csv_rows(file(r, "sample.csv"));
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    EXPECT_EQ(rows[t][0], static_cast<double>(t));
    EXPECT_EQ(rows[t][1], rows[t][2]);
  }
  const auto meta = json::parse(file(r, "simulate.json"));
  EXPECT_EQ(meta["generator"], "mt19937_64/box-muller");
  EXPECT_EQ(meta["seed"], 0);
}

TEST(Simulate, ReconstructionDecaysToFloor) {
  auto c = config_for({1.0, 0.5});
  c.length = 100000;
  c.seed = 7;
  const auto r = run_simulate(c);
  ASSERT_EQ(r.exit_code, kSuccess);
  EXPECT_FALSE(has_file(r, "divergence.csv"));
  const auto rows = csv_rows(file(r, "reconstruction.csv"));
  ASSERT_EQ(rows.size(), 21u);
  for (std::size_t m = 1; m < rows.size(); ++m) EXPECT_LT(rows[m][1], rows[m - 1][1]);
  EXPECT_LT(rows.back()[1], 5 * rows.back()[2]);
  EXPECT_GT(rows.back()[1], rows.back()[2] / 5);
  const auto meta = json::parse(file(r, "simulate.json"));
  EXPECT_EQ(meta["seed"], 7);
  EXPECT_EQ(meta["ar_coeffs"][0].get<double>(), 0.5);
}

TEST(Simulate, DivergenceTable) {
  auto c = config_for({1.0, -2.0});
  c.length = 100000;
  c.seed = 7;
  const auto r = run_simulate(c);
  ASSERT_EQ(r.exit_code, kSuccess);
  EXPECT_FALSE(has_file(r, "reconstruction.csv"));
  const auto rows = csv_rows(file(r, "divergence.csv"));
  for (std::size_t m = 1; m < rows.size(); ++m) EXPECT_GE(rows[m][1] / rows[m - 1][1], 2.0);
}

TEST(Simulate, ErgodicityLengths) {
  auto c = config_for({1.0, 0.5});
  c.length = 5000;
  const auto rows = csv_rows(file(run_simulate(c), "ergodicity.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], 50.0);
  EXPECT_EQ(rows[1][0], 500.0);
  EXPECT_EQ(rows[2][0], 5000.0);
}

TEST(Simulate, InputErrors) {
  const auto r = run_simulate(config_for({2.0, 1.0}));
  EXPECT_EQ(r.exit_code, kInputError);
  EXPECT_NE(r.message.find("divide the coefficients by a_0"), std::string::npos);
  auto short_sample = config_for({1.0});
  short_sample.length = 5;
  short_sample.max_lag = 5;
  EXPECT_EQ(run_simulate(short_sample).exit_code, kInputError);
  EXPECT_EQ(run_simulate(config_for({1.0, -1.0})).exit_code, kBorderline);
}

TEST(Commit, WritesEveryFileAndNoTemporaries) {
  const auto dir = fresh_dir("commit");
  CommandResult r;
  r.add("a.csv", "x\n1\n");
  r.add("b.json", "{}\n");
  commit(r, dir / "nested");
  EXPECT_EQ(slurp(dir / "nested" / "a.csv"), "x\n1\n");
  EXPECT_EQ(slurp(dir / "nested" / "b.json"), "{}\n");
  for (const auto& entry : fs::directory_iterator(dir / "nested")) {
    EXPECT_NE(entry.path().extension(), ".tmp");
  }
}

// Binary front end.

TEST(Binary, ExitCodeContract) {
  const auto dir = fresh_dir("exit").string();
  EXPECT_EQ(run_cli("analyze --coeffs 1,-2 --out " + dir), 0);
  EXPECT_TRUE(fs::exists(fs::path(dir) / "analyze.json"));
  EXPECT_TRUE(fs::exists(fs::path(dir) / "isometry.csv"));
  EXPECT_EQ(run_cli("invert --coeffs 1,-1 --out " + dir), 3);
  EXPECT_EQ(run_cli("invert --coeffs 1,-0.99 --max-len 50 --eps 1e-12 --out " + dir), 4);
  EXPECT_EQ(run_cli("analyze --coeffs 1,x --out " + dir), 2);
  EXPECT_EQ(run_cli("analyze --out " + dir), 2);
  EXPECT_EQ(run_cli("analyze --coeffs 1 --grid abc --out " + dir), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("simulate --coeffs 2,1 --T 100 --out " + dir), 2);
}

TEST(Binary, MalformedCoefficientFile) {
  const auto dir = fresh_dir("badfile");
  std::ofstream(dir / "f.json") << "{\"offset\": 0,\n \"coeffs\": [[1, 0], [2]]}";
  const auto err = dir / "err.txt";
  const std::string cmd = SHIFTOP_CLI_PATH " analyze --coeffs-file " +
                          (dir / "f.json").string() + " --out " + dir.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_NE(slurp(err).find("field 'coeffs[1]'"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "analyze.json"));
}

TEST(Binary, CoefficientFileMatchesInline) {
  const auto dir = fresh_dir("file_vs_inline");
  std::ofstream(dir / "f.json") << R"({"offset": 0, "coeffs": [[1, 0], [-0.5, 0]]})";
  ASSERT_EQ(run_cli("invert --coeffs-file " + (dir / "f.json").string() + " --out " +
                    (dir / "a").string()),
            0);
  ASSERT_EQ(run_cli("invert --coeffs 1,-0.5 --out " + (dir / "b").string()), 0);
  EXPECT_EQ(slurp(dir / "a" / "inverse.json"), slurp(dir / "b" / "inverse.json"));
}

TEST(Binary, RerunsAreByteIdentical) {
  const auto dir = fresh_dir("rerun");
  for (const char* sub : {"a", "b"}) {
    const auto out = (dir / sub).string();
    ASSERT_EQ(run_cli("analyze --coeffs 1,-2,0.5 --dims 4,16,64 --out " + out), 0);
    ASSERT_EQ(run_cli("simulate --coeffs 1,0.5 --T 2000 --seed 3 --out " + out), 0);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "b" / entry.path().filename()))
        << entry.path().filename();
    ++compared;
  }
  EXPECT_EQ(compared, 7u);
}

TEST(Binary, SeedEnvironmentOverride) {
  const auto dir = fresh_dir("seed_env");
  ASSERT_EQ(run_cli("simulate --coeffs 1 --T 50 --seed 11 --out " + (dir / "flag").string()),
            0);
  ASSERT_EQ(run_cli("simulate --coeffs 1 --T 50 --seed 99 --out " + (dir / "env").string(),
                    "SHIFTOP_SEED=11"),
            0);
  EXPECT_EQ(slurp(dir / "flag" / "sample.csv"), slurp(dir / "env" / "sample.csv"));
  EXPECT_NE(slurp(dir / "env" / "simulate.json").find("\"seed\": 11"), std::string::npos);
  EXPECT_EQ(run_cli("simulate --coeffs 1 --T 50 --out " + (dir / "bad").string(),
                    "SHIFTOP_SEED=abc"),
            2);
}
