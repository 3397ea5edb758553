// shiftop: command-line front end for the shift-operator library.
//
//   shiftop analyze  --coeffs "1,-2" [--dims 4,16,64] [--grid 65536] ...
//   shiftop invert   --coeffs "1,-2" --side anticausal
//   shiftop simulate --coeffs "1,0.5" --T 100000 --seed 7
//
// SHIFTOP_SEED, when set, overrides --seed.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "shiftop/cli.hpp"

namespace {

struct RawOptions {
  std::string coeffs;
  std::string coeffs_file;
  std::vector<long> dims{4, 16, 64, 256};
  std::size_t grid = shiftop::kDefaultGrid;
  double tol = shiftop::kDefaultRootTol;
  double eps = 1e-10;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  std::size_t length = 10000;
  std::string out = ".";
  std::string side = "auto";
  int max_lag = 20;
  int max_len = 100000;
};

void add_options(CLI::App& cmd, RawOptions& o) {
  cmd.add_option("--coeffs", o.coeffs,
                 "comma-separated real coefficients a_0,a_1,...");
  cmd.add_option("--coeffs-file", o.coeffs_file,
                 "JSON coefficient file {\"offset\":k,\"coeffs\":[[re,im],...]}");
  cmd.add_option("--dims", o.dims, "compression sizes N (strictly increasing)")
      ->delimiter(',');
  cmd.add_option("--grid", o.grid, "circle grid size for the sup norm");
  cmd.add_option("--tol", o.tol, "root classification tolerance");
  cmd.add_option("--eps", o.eps, "certified tail bound for inverses");
  cmd.add_option("--seed", o.seed, "PRNG seed");
  cmd.add_option("--sigma", o.sigma, "innovation standard deviation");
  cmd.add_option("--T", o.length, "sample length");
  cmd.add_option("--out", o.out, "output directory");
  cmd.add_option("--side", o.side, "auto | causal | anticausal");
  cmd.add_option("--max-lag", o.max_lag, "largest AR lag cutoff");
  cmd.add_option("--max-len", o.max_len, "largest inverse truncation length");
}

shiftop::cli::AnalysisConfig to_config(const RawOptions& o) {
  using shiftop::InputError;
  shiftop::cli::AnalysisConfig c;
  if (o.coeffs.empty() == o.coeffs_file.empty()) {
    throw InputError("give exactly one of --coeffs and --coeffs-file");
  }
  c.transfer = o.coeffs.empty() ? shiftop::load_wiener_file(o.coeffs_file)
                                : shiftop::parse_inline_coeffs(o.coeffs);
  c.dims.assign(o.dims.begin(), o.dims.end());
  c.grid_size = o.grid;
  c.tol = o.tol;
  c.eps = o.eps;
  c.seed = o.seed;
  if (const char* env = std::getenv("SHIFTOP_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw InputError("SHIFTOP_SEED: not an unsigned integer");
    c.seed = v;
  }
  c.sigma = o.sigma;
  c.length = o.length;
  c.output_dir = o.out;
  c.side = o.side;
  c.max_lag = o.max_lag;
  c.max_len = o.max_len;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = shiftop::cli;
  CLI::App app{"Shift-operator invertibility analysis"};
  app.require_subcommand(1);
  RawOptions opts;
  auto* analyze = app.add_subcommand("analyze", "roots, norms, isometry, asymmetry");
  auto* invert = app.add_subcommand("invert", "causal or anticausal inverse");
  auto* simulate = app.add_subcommand("simulate", "MA sample and reconstruction");
  for (auto* cmd : {analyze, invert, simulate}) add_options(*cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kInputError;
  }

  cli::CommandResult result;
  cli::AnalysisConfig config;
  try {
    config = to_config(opts);
  } catch (const shiftop::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kInputError;
  }
  try {
    if (analyze->parsed()) {
      result = cli::run_analyze(config);
    } else if (invert->parsed()) {
      result = cli::run_invert(config);
    } else {
      result = cli::run_simulate(config);
    }
    cli::commit(result, config.output_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kInputError;
  }
  std::cout << result.summary;
  std::cerr << result.message;
  return result.exit_code;
}
