#pragma once

/**
 * @file cli.hpp
 * @brief The analyze / invert / simulate commands behind tools/shiftop.
 *
 * Commands collect every output file in memory and write them at the end,
 * each through a temporary file and a rename.  Numbers in CSV files use 17
 * significant digits; JSON numbers use the shortest representation that
 * round-trips; the console summary uses 6 digits.
 *
 * Exit codes: 0 success, 2 input error, 3 borderline verdict, 4 tail bound
 * not certified.
 */

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shiftop/invertibility.hpp"
#include "shiftop/io.hpp"
#include "shiftop/operators.hpp"
#include "shiftop/process.hpp"
#include "shiftop/wiener.hpp"

namespace shiftop::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kBorderline = 3,
  kTailNotCertified = 4,
};

struct AnalysisConfig {
  WienerElement transfer = WienerElement::constant(1.0);
  std::vector<Eigen::Index> dims{4, 16, 64, 256};
  std::size_t grid_size = kDefaultGrid;
  double tol = kDefaultRootTol;
  double eps = 1e-10;
  std::uint64_t seed = 0;
  double sigma = 1.0;
  std::size_t length = 10000;
  std::string output_dir = ".";
  std::string side = "auto";  ///< auto | causal | anticausal
  int max_lag = 20;
  int max_len = 100000;
};

/// Throws InputError when a parameter is outside the range its consumer
/// accepts.
inline void validate(const AnalysisConfig& c) {
  if (c.dims.empty()) throw InputError("--dims: need at least one dimension");
  for (std::size_t i = 0; i < c.dims.size(); ++i) {
    if (c.dims[i] < 1) throw InputError("--dims: dimensions must be >= 1");
    if (i && c.dims[i] <= c.dims[i - 1]) {
      throw InputError("--dims: dimensions must strictly increase");
    }
  }
  if (c.grid_size < 16 || !is_power_of_two(c.grid_size)) {
    throw InputError("--grid: must be a power of two >= 16");
  }
  if (!(c.tol >= 1e-12 && c.tol <= 1e-4)) {
    throw InputError("--tol: must lie in [1e-12, 1e-4]");
  }
  if (!(c.eps > 0.0)) throw InputError("--eps: must be > 0");
  if (!(c.sigma > 0.0)) throw InputError("--sigma: must be > 0");
  if (c.length < 1) throw InputError("--T: must be >= 1");
  if (c.max_lag < 0) throw InputError("--max-lag: must be >= 0");
  if (c.max_len < 1) throw InputError("--max-len: must be >= 1");
  if (c.side != "auto" && c.side != "causal" && c.side != "anticausal") {
    throw InputError("--side: expected auto, causal or anticausal");
  }
}

struct CommandResult {
  int exit_code = kSuccess;
  std::string summary;  ///< stdout
  std::string message;  ///< stderr
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string name, std::string contents) {
    files.emplace_back(std::move(name), std::move(contents));
  }
};

/// Writes every file as dir/name.tmp, then renames it into place.
inline void commit(const CommandResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, contents] : r.files) {
    const auto target = dir / name;
    auto tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out << contents;
    }
    std::filesystem::rename(tmp, target);
  }
}

namespace detail {

inline std::string human(double x) { return format_number(x, 6); }

inline nlohmann::json complex_list(const std::vector<Complex>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Complex c : v) a.push_back({c.real(), c.imag()});
  return a;
}

inline nlohmann::json classification_json(const RootClassification& rc) {
  return {{"roots", complex_list(rc.roots)},
          {"inside", rc.inside},
          {"on_circle", rc.on_circle},
          {"outside", rc.outside},
          {"tol", rc.tol},
          {"verdict", std::string(to_string(rc.verdict()))}};
}

inline nlohmann::json inversion_json(const InversionResult& r) {
  nlohmann::json j = to_json(r.inverse);
  j["side"] = std::string(to_string(r.side));
  j["truncation_len"] = r.truncation_len;
  j["tail_bound"] = r.tail_bound;
  return j;
}

inline std::string isometry_csv(const std::vector<IsometryRow>& rows) {
  std::string s = "N,norm_unilateral,gap\n";
  for (const auto& r : rows) {
    s += std::to_string(r.dim) + ',' + format_number(r.norm) + ',' +
         format_number(r.gap) + '\n';
  }
  return s;
}

inline std::string asymmetry_csv(const std::vector<AsymmetryRow>& rows) {
  std::string s =
      "N,norm_circulant_inverse,norm_triangular_inverse,cond_circulant,"
      "cond_triangular\n";
  for (const auto& r : rows) {
    s += std::to_string(r.dim) + ',' + format_number(r.norm_circulant_inverse) +
         ',' + format_number(r.norm_triangular_inverse) + ',' +
         format_number(r.cond_circulant) + ',' +
         format_number(r.cond_triangular) + '\n';
  }
  return s;
}

inline std::string reconstruction_csv(const std::vector<ReconstructionRow>& rows) {
  std::string s = "M,mse,analytic_mse\n";
  for (const auto& r : rows) {
    s += std::to_string(r.cutoff) + ',' + format_number(r.mse) + ',' +
         format_number(r.analytic_mse) + '\n';
  }
  return s;
}

inline std::string ergodicity_csv(const std::vector<ErgodicRow>& rows) {
  std::string s = "T,abs_mean,predicted_std\n";
  for (const auto& r : rows) {
    s += std::to_string(r.length) + ',' + format_number(r.abs_mean) + ',' +
         format_number(r.predicted_std) + '\n';
  }
  return s;
}

inline std::string sample_csv(const ProcessSample& s) {
  std::string out = "t,X_t,eps_t\n";
  out.reserve(out.size() + s.size() * 52);
  for (std::size_t t = 0; t < s.size(); ++t) {
    out += std::to_string(t) + ',' + format_number(s.path[t]) + ',' +
           format_number(s.innovation(t)) + '\n';
  }
  return out;
}

inline CommandResult input_error(const std::string& what) {
  CommandResult r;
  r.exit_code = kInputError;
  r.message = "error: " + what + '\n';
  return r;
}

}  // namespace detail

/**
 * Root classification, norms, isometry sweep, inverse-norm asymmetry and
 * (when one exists) the inverse expansion, in analyze.json plus
 * isometry.csv and asymmetry.csv.
 */
inline CommandResult run_analyze(const AnalysisConfig& config) {
  using nlohmann::json;
  try {
    validate(config);
  } catch (const InputError& e) {
    return detail::input_error(e.what());
  }
  const WienerElement& f = config.transfer;
  if (!f.is_causal() || f.is_zero()) {
    return detail::input_error(
        "analyze: transfer must be a nonzero polynomial in nonnegative powers");
  }

  CommandResult r;
  const RootClassification rc = classify_roots(f, config.tol);
  const double l1 = l1_norm(f);
  const double sup = sup_norm(f, config.grid_size);
  const auto iso = isometry_sweep(f, config.dims, config.grid_size);

  json report;
  report["transfer"] = to_json(f);
  report["classification"] = detail::classification_json(rc);
  report["l1_norm"] = l1;
  report["sup_norm"] = sup;
  report["sup_norm_grid"] = config.grid_size;
  report["sup_norm_grid_error"] = sup_norm_grid_error(f, config.grid_size);
  report["isometry"] = json::array();
  for (const auto& row : iso) {
    report["isometry"].push_back(
        {{"N", row.dim}, {"norm", row.norm}, {"gap", row.gap}});
  }
  r.add("isometry.csv", detail::isometry_csv(iso));

  const bool can_invert_triangle = f[0] != 0.0;
  const bool dims_cover_support =
      config.dims.front() >= static_cast<Eigen::Index>(f.support_length());
  if (can_invert_triangle && dims_cover_support) {
    const auto asym = asymmetry_report(f, config.dims);
    report["asymmetry"] = json::array();
    for (const auto& row : asym) {
      report["asymmetry"].push_back(
          {{"N", row.dim},
           {"norm_circulant_inverse", row.norm_circulant_inverse},
           {"norm_triangular_inverse", row.norm_triangular_inverse},
           {"cond_circulant", row.cond_circulant},
           {"cond_triangular", row.cond_triangular},
           {"circulant_singular", row.circulant_singular}});
    }
    r.add("asymmetry.csv", detail::asymmetry_csv(asym));
  } else {
    report["asymmetry"] = nullptr;
    report["asymmetry_skipped"] =
        can_invert_triangle ? "smallest N is below the support length"
                            : "a_0 = 0, the triangular compression is singular";
  }

  report["inverse"] = nullptr;
  try {
    if (rc.verdict() == Verdict::Invertible) {
      report["inverse"] = detail::inversion_json(
          invert_causal(f, config.max_len, config.eps, config.tol));
    } else if (rc.degree() > 0 && rc.inside == rc.degree()) {
      report["inverse"] = detail::inversion_json(
          invert_anticausal(f, config.max_len, config.eps, config.tol));
    } else {
      report["inverse_skipped"] = "roots on or on both sides of the circle";
    }
  } catch (const TailNotCertifiedError& e) {
    report["inverse_skipped"] = e.what();
  }

  r.add("analyze.json", report.dump(2) + '\n');

  std::ostringstream out;
  out << "verdict: " << to_string(rc.verdict()) << " (inside " << rc.inside
      << ", on circle " << rc.on_circle << ", outside " << rc.outside << ")\n";
  out << "l1 norm: " << detail::human(l1) << "\nsup norm: " << detail::human(sup)
      << '\n';
  for (const auto& row : iso) {
    out << "  N=" << row.dim << "  ||f(T_N)||=" << detail::human(row.norm)
        << "  gap=" << detail::human(row.gap) << '\n';
  }
  r.summary = out.str();
  return r;
}

/// Inverse expansion written to inverse.json.
inline CommandResult run_invert(const AnalysisConfig& config) {
  try {
    validate(config);
  } catch (const InputError& e) {
    return detail::input_error(e.what());
  }
  const WienerElement& f = config.transfer;
  if (!f.is_causal() || f.is_zero()) {
    return detail::input_error(
        "invert: transfer must be a nonzero polynomial in nonnegative powers");
  }
  const RootClassification rc = classify_roots(f, config.tol);
  CommandResult r;
  if (rc.verdict() == Verdict::Borderline) {
    r.exit_code = kBorderline;
    r.message =
        "borderline: a root lies within tol of the unit circle, so neither a "
        "causal nor an anticausal inverse exists in the Wiener algebra\n";
    return r;
  }
  std::string side = config.side;
  if (side == "auto") {
    if (rc.verdict() == Verdict::Invertible) {
      side = "causal";
    } else if (rc.inside == rc.degree()) {
      side = "anticausal";
    } else {
      return detail::input_error(
          "invert: roots on both sides of the circle are not supported");
    }
  }
  try {
    const InversionResult inv =
        side == "causal"
            ? invert_causal(f, config.max_len, config.eps, config.tol)
            : invert_anticausal(f, config.max_len, config.eps, config.tol);
    r.add("inverse.json", detail::inversion_json(inv).dump(2) + '\n');
    r.summary = "side: " + side + "\ntruncation length: " +
                std::to_string(inv.truncation_len) +
                "\ntail bound: " + detail::human(inv.tail_bound) + '\n';
  } catch (const NotInvertibleError& e) {
    return detail::input_error(e.what());
  } catch (const TailNotCertifiedError& e) {
    r.exit_code = kTailNotCertified;
    r.message = std::string("error: ") + e.what() + '\n';
  }
  return r;
}

/**
 * Simulated sample plus the reconstruction table (invertible transfer) or
 * the divergence table (root inside the circle), the ergodic-mean table and
 * a JSON sidecar naming the seed and generator.
 */
inline CommandResult run_simulate(const AnalysisConfig& config) {
  using nlohmann::json;
  try {
    validate(config);
  } catch (const InputError& e) {
    return detail::input_error(e.what());
  }
  const WienerElement& f = config.transfer;
  if (!f.is_causal() || !f.is_real()) {
    return detail::input_error(
        "simulate: transfer must be a real polynomial in nonnegative powers");
  }
  if (f[0] != 1.0) {
    return detail::input_error(
        "simulate: transfer must satisfy a_0 = 1 (divide the coefficients by "
        "a_0 and scale --sigma by |a_0|)");
  }
  if (config.length <= static_cast<std::size_t>(config.max_lag)) {
    return detail::input_error("simulate: --T must exceed --max-lag");
  }

  CommandResult r;
  const ProcessSample sample =
      simulate(f, config.sigma, config.length, config.seed);
  r.add("sample.csv", detail::sample_csv(sample));

  json meta;
  meta["generator"] = std::string(GaussianSource::kName);
  meta["generator_version"] = GaussianSource::kVersion;
  meta["seed"] = config.seed;
  meta["sigma"] = config.sigma;
  meta["T"] = config.length;
  meta["max_lag"] = config.max_lag;
  meta["transfer"] = to_json(f);

  const RootClassification rc = classify_roots(f, config.tol);
  meta["verdict"] = std::string(to_string(rc.verdict()));
  std::ostringstream out;
  out << "verdict: " << to_string(rc.verdict()) << '\n';
  if (rc.verdict() == Verdict::Invertible) {
    const auto rep = reconstruct_innovations(sample, config.max_lag);
    meta["ar_coeffs"] = rep.ar_coeffs;
    r.add("reconstruction.csv", detail::reconstruction_csv(rep.mse_per_cutoff));
    const auto& last = rep.mse_per_cutoff.back();
    out << "reconstruction MSE at M=" << last.cutoff << ": "
        << detail::human(last.mse) << " (analytic "
        << detail::human(last.analytic_mse) << ")\n";
  } else if (rc.verdict() == Verdict::NonInvertible) {
    const auto rows = divergence_demo(sample, config.max_lag);
    r.add("divergence.csv", detail::reconstruction_csv(rows));
    out << "divergence MSE at M=" << rows.back().cutoff << ": "
        << detail::human(rows.back().mse) << '\n';
  } else {
    r.exit_code = kBorderline;
    r.message =
        "borderline: unit root, no innovation reconstruction table written\n";
  }

  std::vector<std::size_t> lengths;
  for (std::size_t div : {100u, 10u, 1u}) {
    const std::size_t len = config.length / div;
    if (len >= 1 && (lengths.empty() || lengths.back() != len)) {
      lengths.push_back(len);
    }
  }
  const auto erg = ergodic_mean_check(f, config.sigma, lengths, config.seed);
  r.add("ergodicity.csv", detail::ergodicity_csv(erg));

  json names = json::array();
  for (const auto& [name, contents] : r.files) names.push_back(name);
  names.push_back("simulate.json");
  meta["files"] = std::move(names);
  r.add("simulate.json", meta.dump(2) + '\n');
  r.summary = out.str();
  return r;
}

}  // namespace shiftop::cli
