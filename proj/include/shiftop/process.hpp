#pragma once

/**
 * @file process.hpp
 * @brief Moving-average simulation, AR(inf) innovation reconstruction, l1
 * filter convergence, mean ergodicity and MA recovery from autocovariances.
 *
 * Paths are real.  A sample of length T is X_t = sum_{j=0..q} a_j eps_{t-j},
 * t = 0..T-1, driven by i.i.d. N(0, sigma^2) innovations.  The q innovations
 * before t = 0 are drawn rather than zero-padded, so the path is stationary
 * from its first entry.
 */

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shiftop/invertibility.hpp"
#include "shiftop/wiener.hpp"

namespace shiftop {

/**
 * Standard normal stream: mt19937_64 words mapped to (0, 1] with 53-bit
 * resolution, then Box-Muller.  Every step is fixed here, unlike
 * std::normal_distribution whose algorithm varies between standard libraries,
 * so a seed replays the same stream everywhere.
 */
class GaussianSource {
 public:
  static constexpr std::string_view kName = "mt19937_64/box-muller";
  static constexpr int kVersion = 1;

  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  double uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct ProcessSample {
  std::vector<double> path;
  /// warmup pre-path innovations followed by one per path entry.
  std::vector<double> innovations;
  std::size_t warmup = 0;
  double sigma = 1.0;
  WienerElement transfer;
  std::uint64_t seed = 0;

  /// eps_t aligned with path[t].
  double innovation(std::size_t t) const { return innovations[t + warmup]; }
  std::size_t size() const { return path.size(); }
};

namespace detail {

inline std::vector<double> real_coefficients(const WienerElement& f,
                                             const char* who) {
  if (!f.is_causal() || !f.is_real()) {
    throw std::invalid_argument(std::string(who) +
                                ": transfer must be causal with real coefficients");
  }
  std::vector<double> a(static_cast<std::size_t>(f.last_index()) + 1, 0.0);
  for (int n = f.offset(); n <= f.last_index(); ++n) {
    a[static_cast<std::size_t>(n)] = f[n].real();
  }
  return a;
}

inline void require_normalized(const WienerElement& f, const char* who) {
  if (f[0] != 1.0) {
    throw std::invalid_argument(
        std::string(who) +
        ": transfer must satisfy a_0 = 1; divide the coefficients by a_0 and "
        "scale sigma by |a_0|");
  }
}

}  // namespace detail

inline ProcessSample simulate(const WienerElement& transfer, double sigma,
                              std::size_t length, std::uint64_t seed) {
  const auto a = detail::real_coefficients(transfer, "simulate");
  detail::require_normalized(transfer, "simulate");
  if (!(sigma > 0.0)) throw std::invalid_argument("simulate: sigma must be > 0");
  if (length < 1) throw std::invalid_argument("simulate: length must be >= 1");

  ProcessSample s;
  s.warmup = a.size() - 1;
  s.sigma = sigma;
  s.transfer = transfer;
  s.seed = seed;
  GaussianSource normal(seed);
  s.innovations.resize(length + s.warmup);
  for (double& e : s.innovations) e = sigma * normal();
  s.path.resize(length);
  for (std::size_t t = 0; t < length; ++t) {
    double x = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      x += a[j] * s.innovations[t + s.warmup - j];
    }
    s.path[t] = x;
  }
  return s;
}

/// gamma(0..max_lag) of sum a_j eps_{t-j}: sigma^2 sum_j a_j a_{j+k}.
inline std::vector<double> ma_autocovariance(const WienerElement& transfer,
                                             double sigma, std::size_t max_lag) {
  const auto a = detail::real_coefficients(transfer, "ma_autocovariance");
  std::vector<double> g(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    for (std::size_t j = 0; j + k < a.size(); ++j) g[k] += a[j] * a[j + k];
    g[k] *= sigma * sigma;
  }
  return g;
}

struct ReconstructionRow {
  int cutoff;           ///< M, number of lagged observations used
  double mse;           ///< mean of (eps_hat - eps)^2 over t = max_lag..T-1
  double analytic_mse;  ///< sigma^2 ||f g_M - 1||_2^2 for the applied filter
};

struct ReconstructionReport {
  std::vector<double> ar_coeffs;  ///< b_1, b_2, ... (b_n = -g_n)
  int lag_cutoff = 0;
  std::vector<ReconstructionRow> mse_per_cutoff;
};

namespace detail {

/**
 * eps_hat_M(t) = sum_{n=0..M} g_n X_{t-n} for every M = 0..max_lag, scored
 * against the true innovations on the common window t >= max_lag.
 */
inline std::vector<ReconstructionRow> score_inverse_filter(
    const ProcessSample& s, const std::vector<double>& g, int max_lag) {
  if (max_lag < 0) throw std::invalid_argument("max_lag must be >= 0");
  const std::size_t m_max = static_cast<std::size_t>(max_lag);
  if (s.size() <= m_max) {
    throw std::invalid_argument("sample is shorter than max_lag + 1");
  }
  std::vector<double> sse(m_max + 1, 0.0);
  for (std::size_t t = m_max; t < s.size(); ++t) {
    const double eps = s.innovation(t);
    double acc = 0.0;
    for (std::size_t n = 0; n <= m_max; ++n) {
      if (n < g.size()) acc += g[n] * s.path[t - n];
      const double e = acc - eps;
      sse[n] += e * e;
    }
  }
  const double count = static_cast<double>(s.size() - m_max);

  const auto a = real_coefficients(s.transfer, "score_inverse_filter");
  std::vector<ReconstructionRow> rows;
  for (std::size_t m = 0; m <= m_max; ++m) {
    // r = f * g_M - 1; the reconstruction error is r(B) eps.
    std::vector<double> r(a.size() + m, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t n = 0; n <= m && n < g.size(); ++n) r[i + n] += a[i] * g[n];
    }
    r[0] -= 1.0;
    double r2 = 0.0;
    for (double v : r) r2 += v * v;
    rows.push_back({static_cast<int>(m), sse[m] / count,
                    s.sigma * s.sigma * r2});
  }
  return rows;
}

inline std::vector<double> real_parts(const std::vector<Complex>& c) {
  std::vector<double> out;
  out.reserve(c.size());
  for (Complex v : c) out.push_back(v.real());
  return out;
}

}  // namespace detail

inline constexpr double kReconstructionEps = 1e-14;

/**
 * Recovers the innovations from the observed path through the AR(inf)
 * coefficients b_n = -g_n, g = 1/f, for every lag cutoff 0..max_lag.
 */
inline ReconstructionReport reconstruct_innovations(
    const ProcessSample& sample, int max_lag,
    double eps = kReconstructionEps, int max_len = 100000) {
  const InversionResult inv = invert_causal(sample.transfer, max_len, eps);
  std::vector<double> g(static_cast<std::size_t>(inv.truncation_len), 0.0);
  for (int n = 0; n < inv.truncation_len; ++n) {
    g[static_cast<std::size_t>(n)] = inv.inverse[n].real();
  }
  ReconstructionReport report;
  for (std::size_t n = 1; n < g.size(); ++n) report.ar_coeffs.push_back(-g[n]);
  report.lag_cutoff = max_lag;
  report.mse_per_cutoff = detail::score_inverse_filter(sample, g, max_lag);
  return report;
}

/// The same recursion with the formal (divergent) coefficients of a
/// transfer that has a root inside the circle.
inline std::vector<ReconstructionRow> divergence_demo(const ProcessSample& sample,
                                                      int max_lag) {
  const RootClassification rc = classify_roots(sample.transfer);
  if (rc.inside == 0) {
    throw NotInvertibleError(
        "divergence_demo: transfer has no root inside the circle", rc);
  }
  const auto g = detail::real_parts(causal_inverse_coefficients(
      sample.transfer, static_cast<std::size_t>(max_lag) + 1));
  return detail::score_inverse_filter(sample, g, max_lag);
}

inline std::vector<ReconstructionRow> divergence_demo(
    const WienerElement& transfer, int max_lag, std::uint64_t seed,
    std::size_t length = 100000, double sigma = 1.0) {
  return divergence_demo(simulate(transfer, sigma, length, seed), max_lag);
}

struct FilterRow {
  int cutoff;      ///< terms with |n| <= cutoff are kept
  double max_dev;  ///< max over t of |partial - full|
  double mse;      ///< mean over t of (partial - full)^2
  double bound;    ///< (sum_{|n| > cutoff} |a_n|) * max_t |X_t|
};

/**
 * Partial sums of sum_n a_n X_{t-n} (two-sided filters allowed), compared
 * with the full sum on the window where every lag and lead is observed.
 */
inline std::vector<FilterRow> l1_filter_convergence(
    const ProcessSample& sample, const WienerElement& filter,
    const std::vector<int>& cutoffs) {
  if (!filter.is_real()) {
    throw std::invalid_argument("l1_filter_convergence: filter must be real");
  }
  if (!std::is_sorted(cutoffs.begin(), cutoffs.end())) {
    throw std::invalid_argument("l1_filter_convergence: cutoffs must increase");
  }
  const int lo = filter.offset();
  const int hi = filter.last_index();
  const long long t_begin = std::max(0, hi);
  const long long t_end = static_cast<long long>(sample.size()) + std::min(0, lo);
  if (t_end <= t_begin) {
    throw std::invalid_argument("l1_filter_convergence: sample too short");
  }
  double max_abs_x = 0.0;
  for (double x : sample.path) max_abs_x = std::max(max_abs_x, std::abs(x));

  auto filtered = [&](long long t, int cutoff) {
    double acc = 0.0;
    for (int n = lo; n <= hi; ++n) {
      if (std::abs(n) > cutoff) continue;
      acc += filter[n].real() * sample.path[static_cast<std::size_t>(t - n)];
    }
    return acc;
  };
  const int full_cutoff = std::max(std::abs(lo), std::abs(hi));
  std::vector<double> full;
  full.reserve(static_cast<std::size_t>(t_end - t_begin));
  for (long long t = t_begin; t < t_end; ++t) full.push_back(filtered(t, full_cutoff));

  std::vector<FilterRow> rows;
  for (int k : cutoffs) {
    double tail = 0.0;
    for (int n = lo; n <= hi; ++n) {
      if (std::abs(n) > k) tail += std::abs(filter[n]);
    }
    double max_dev = 0.0, sse = 0.0;
    for (long long t = t_begin; t < t_end; ++t) {
      const double d =
          filtered(t, k) - full[static_cast<std::size_t>(t - t_begin)];
      max_dev = std::max(max_dev, std::abs(d));
      sse += d * d;
    }
    rows.push_back({k, max_dev, sse / static_cast<double>(full.size()),
                    tail * max_abs_x});
  }
  return rows;
}

struct ErgodicRow {
  std::size_t length;
  double abs_mean;
  double predicted_std;  ///< |f(1)| sigma / sqrt(T)
};

inline double sample_mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Sample mean of one simulated path per length against |f(1)| sigma/sqrt(T).
inline std::vector<ErgodicRow> ergodic_mean_check(
    const WienerElement& transfer, double sigma,
    const std::vector<std::size_t>& lengths, std::uint64_t seed) {
  const double f1 = std::abs(evaluate(transfer, 1.0));
  std::vector<ErgodicRow> rows;
  for (std::size_t len : lengths) {
    const ProcessSample s = simulate(transfer, sigma, len, seed);
    rows.push_back({len, std::abs(sample_mean(s.path)),
                    f1 * sigma / std::sqrt(static_cast<double>(len))});
  }
  return rows;
}

/**
 * Fraction of seeds first_seed .. first_seed + seeds - 1 whose studentized
 * sample mean mean / (|f(1)| sigma / sqrt(T)) exceeds `z` in magnitude.
 */
inline double studentized_exceedance(const WienerElement& transfer, double sigma,
                                     std::size_t length, std::uint64_t first_seed,
                                     std::size_t seeds, double z = 1.96) {
  const double sd = std::abs(evaluate(transfer, 1.0)) * sigma /
                    std::sqrt(static_cast<double>(length));
  if (!(sd > 0.0)) {
    throw std::invalid_argument(
        "studentized_exceedance: f(1) = 0, the asymptotic std vanishes");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < seeds; ++i) {
    const ProcessSample s = simulate(transfer, sigma, length, first_seed + i);
    if (std::abs(sample_mean(s.path) / sd) > z) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(seeds);
}

struct WoldEstimate {
  WienerElement transfer;  ///< a_0 = 1
  double variance;         ///< innovation variance sigma^2
  int iterations;
  bool converged;
};

/**
 * MA(q) coefficients and innovation variance from gamma(0..q) by the
 * innovations algorithm.
 *
 * With gamma(h) = 0 for h > q only theta_{n,1..q} are nonzero, giving the
 * banded recursion
 *   theta_{n,m} = (gamma(m) - sum_{m'=m+1}^{min(n,q)}
 *                  theta_{n-m,m'-m} theta_{n,m'} v_{n-m'}) / v_{n-m}
 *   v_n = gamma(0) - sum_{m=1}^{min(n,q)} theta_{n,m}^2 v_{n-m},
 * iterated until theta_n and v_n stop moving.  The limit is the
 * representative whose roots lie outside the unit circle.
 */
inline WoldEstimate wold_estimate(const std::vector<double>& autocov, int order,
                                  double tol = 1e-13, int max_iter = 200000) {
  if (order < 0 || autocov.size() < static_cast<std::size_t>(order) + 1) {
    throw std::invalid_argument("wold_estimate: need gamma(0..order)");
  }
  const std::size_t q = static_cast<std::size_t>(order);
  Eigen::MatrixXd toeplitz(q + 1, q + 1);
  for (std::size_t i = 0; i <= q; ++i) {
    for (std::size_t j = 0; j <= q; ++j) {
      toeplitz(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          autocov[i > j ? i - j : j - i];
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(toeplitz);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(
        "wold_estimate: autocovariance matrix is not positive definite");
  }

  // theta[n][m] for m = 1..q (index 0 unused).
  std::vector<std::vector<double>> theta{std::vector<double>(q + 1, 0.0)};
  std::vector<double> v{autocov[0]};
  bool converged = (q == 0);
  int n = 1;
  for (; !converged && n <= max_iter; ++n) {
    const std::size_t nn = static_cast<std::size_t>(n);
    std::vector<double> th(q + 1, 0.0);
    const std::size_t top = std::min(nn, q);
    for (std::size_t m = top; m >= 1; --m) {
      double s = autocov[m];
      for (std::size_t mp = m + 1; mp <= top; ++mp) {
        s -= theta[nn - m][mp - m] * th[mp] * v[nn - mp];
      }
      th[m] = s / v[nn - m];
    }
    double vn = autocov[0];
    for (std::size_t m = 1; m <= top; ++m) vn -= th[m] * th[m] * v[nn - m];
    if (!(vn > 0.0)) {
      throw std::invalid_argument(
          "wold_estimate: innovation variance became non-positive");
    }
    double change = std::abs(vn - v.back()) / vn;
    for (std::size_t m = 1; m <= q; ++m) {
      change = std::max(change, std::abs(th[m] - theta.back()[m]));
    }
    theta.push_back(std::move(th));
    v.push_back(vn);
    converged = n > static_cast<int>(q) && change <= tol;
  }
  std::vector<double> coeffs(q + 1, 1.0);
  for (std::size_t m = 1; m <= q; ++m) coeffs[m] = theta.back()[m];
  return {WienerElement::from_real(coeffs), v.back(),
          static_cast<int>(theta.size()) - 1, converged};
}

}  // namespace shiftop
