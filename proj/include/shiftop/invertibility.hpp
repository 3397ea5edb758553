#pragma once

/**
 * @file invertibility.hpp
 * @brief Root classification, causal and anticausal inversion of transfer
 * polynomials, and the f(B) versus f(T) inverse-norm comparison.
 */

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiftop/operators.hpp"
#include "shiftop/wiener.hpp"

namespace shiftop {

enum class Verdict { Invertible, Borderline, NonInvertible };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Invertible:
      return "Invertible";
    case Verdict::Borderline:
      return "Borderline";
    case Verdict::NonInvertible:
      return "NonInvertible";
  }
  return "?";
}

inline constexpr double kDefaultRootTol = 1e-9;

struct RootClassification {
  std::vector<Complex> roots;
  int inside = 0;
  int on_circle = 0;
  int outside = 0;
  double tol = kDefaultRootTol;

  int degree() const { return inside + on_circle + outside; }

  /// Any root within tol of the circle makes the verdict Borderline.
  Verdict verdict() const {
    if (on_circle > 0) return Verdict::Borderline;
    if (inside > 0) return Verdict::NonInvertible;
    return Verdict::Invertible;
  }
};

/// Roots of a causal polynomial, zero roots from the offset included.
inline std::vector<Complex> polynomial_roots(const WienerElement& f) {
  if (!f.is_causal()) {
    throw std::invalid_argument("polynomial_roots: element is not causal");
  }
  if (f.is_zero()) {
    throw std::invalid_argument("polynomial_roots: zero polynomial");
  }
  std::vector<Complex> roots(static_cast<std::size_t>(f.offset()), Complex{0.0});
  const auto& c = f.coeffs();
  const Eigen::Index d = static_cast<Eigen::Index>(c.size()) - 1;
  if (d == 0) return roots;
  // Companion matrix of the monic polynomial z^d + (c_{d-1}/c_d) z^{d-1} + ...
  Matrix companion = Matrix::Zero(d, d);
  for (Eigen::Index i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  const Complex lead = c.back();
  for (Eigen::Index i = 0; i < d; ++i) {
    companion(i, d - 1) = -c[static_cast<std::size_t>(i)] / lead;
  }
  Eigen::ComplexEigenSolver<Matrix> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("polynomial_roots: eigensolver did not converge");
  }
  for (Eigen::Index i = 0; i < d; ++i) roots.push_back(es.eigenvalues()(i));
  return roots;
}

inline RootClassification classify_roots(const WienerElement& f,
                                         double tol = kDefaultRootTol) {
  if (!(tol >= 1e-12 && tol <= 1e-4)) {
    throw std::invalid_argument("classify_roots: tol must lie in [1e-12, 1e-4]");
  }
  RootClassification rc;
  rc.tol = tol;
  rc.roots = polynomial_roots(f);
  for (Complex r : rc.roots) {
    const double m = std::abs(r);
    if (m < 1.0 - tol) {
      ++rc.inside;
    } else if (m > 1.0 + tol) {
      ++rc.outside;
    } else {
      ++rc.on_circle;
    }
  }
  return rc;
}

enum class InverseSide { Causal, Anticausal };

inline std::string_view to_string(InverseSide s) {
  return s == InverseSide::Causal ? "causal" : "anticausal";
}

struct InversionResult {
  WienerElement inverse;
  InverseSide side;
  int truncation_len;
  /// Certified bound on the l1 mass of the dropped coefficients, inflated by
  /// max(1, ||f||_1) so that it also bounds ||f * inverse - 1||_1.
  double tail_bound;
};

class NotInvertibleError : public std::invalid_argument {
 public:
  NotInvertibleError(const std::string& what, RootClassification rc)
      : std::invalid_argument(what), classification(std::move(rc)) {}
  RootClassification classification;
};

class TailNotCertifiedError : public std::runtime_error {
 public:
  TailNotCertifiedError(double achieved, int max_len)
      : std::runtime_error("tail bound not certified within max_len = " +
                           std::to_string(max_len) + " (achieved " +
                           std::to_string(achieved) + ")"),
        achieved_bound(achieved),
        max_len(max_len) {}
  double achieved_bound;
  int max_len;
};

/**
 * First `count` coefficients of the formal power series 1/f:
 * g_0 = 1/a_0, g_n = -(1/a_0) sum_{k=1..n} a_k g_{n-k}.
 * No root condition is checked, so this also yields the divergent formal
 * coefficients of a non-invertible symbol.
 */
inline std::vector<Complex> causal_inverse_coefficients(const WienerElement& f,
                                                        std::size_t count) {
  if (!f.is_causal() || f[0] == 0.0) {
    throw std::invalid_argument(
        "causal_inverse_coefficients: need a causal symbol with a_0 != 0");
  }
  const Complex inv_a0 = 1.0 / f[0];
  const int deg = f.last_index();
  std::vector<Complex> g(count);
  for (std::size_t n = 0; n < count; ++n) {
    if (n == 0) {
      g[0] = inv_a0;
      continue;
    }
    Complex s{0.0};
    const int kmax = std::min<int>(deg, static_cast<int>(n));
    for (int k = 1; k <= kmax; ++k) s += f[k] * g[n - static_cast<std::size_t>(k)];
    g[n] = -inv_a0 * s;
  }
  return g;
}

namespace detail {

/**
 * Bound on sum_{n >= L} |g_n| for g = 1/f, f = a_0 prod_k (1 - z / r_k).
 *
 * |g_n| <= |1/a_0| C(n+d-1, d-1) rho^n with rho = max 1/|r_k| (coefficientwise
 * majorant by prod 1/(1 - rho z)).  The majorant terms m_n have decreasing
 * ratio (n+d)/(n+1) rho, so once that ratio q_L is below one the tail is at
 * most m_L / (1 - q_L).  Returns +inf when the ratio test does not apply yet.
 */
inline double geometric_tail_bound(double inv_a0_abs, int degree, double rho,
                                   int len) {
  if (degree == 0) return 0.0;
  const double d = degree;
  const double l = len;
  const double q = (l + d) / (l + 1.0) * rho;
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  const double log_m = std::lgamma(l + d) - std::lgamma(d) - std::lgamma(l + 1.0) +
                       l * std::log(rho);
  return inv_a0_abs * std::exp(log_m) / (1.0 - q);
}

// Root-error allowance on rho; the companion eigenvalues are not exact.
inline constexpr double kRhoInflation = 1.0 + 1e-6;

/// Causal inversion of a symbol with a_0 != 0 and every root outside the
/// circle, roots supplied by the caller.
inline InversionResult certified_causal_inverse(const WienerElement& f,
                                                const std::vector<Complex>& roots,
                                                int max_len, double eps) {
  double rho = 0.0;
  for (Complex r : roots) rho = std::max(rho, 1.0 / std::abs(r));
  rho *= kRhoInflation;
  const int degree = static_cast<int>(roots.size());
  const double inv_a0_abs = 1.0 / std::abs(f[0]);
  const double scale = std::max(1.0, l1_norm(f));

  double bound = std::numeric_limits<double>::infinity();
  int len = 1;
  for (; len <= max_len; ++len) {
    bound = scale * geometric_tail_bound(inv_a0_abs, degree, rho, len);
    if (bound <= eps) break;
  }
  if (len > max_len) throw TailNotCertifiedError(bound, max_len);
  return {WienerElement(causal_inverse_coefficients(f, static_cast<std::size_t>(len)), 0),
          InverseSide::Causal, len, bound};
}

}  // namespace detail

/// 1/f in the causal subalgebra, truncated once the tail is certified <= eps.
inline InversionResult invert_causal(const WienerElement& f, int max_len,
                                     double eps, double tol = kDefaultRootTol) {
  if (!f.is_causal()) {
    throw std::invalid_argument("invert_causal: symbol is not causal");
  }
  RootClassification rc = classify_roots(f, tol);
  if (rc.verdict() != Verdict::Invertible) {
    throw NotInvertibleError("invert_causal: verdict is " +
                                 std::string(to_string(rc.verdict())),
                             std::move(rc));
  }
  return detail::certified_causal_inverse(f, rc.roots, max_len, eps);
}

/// Coefficient reversal z^d f(1/z) of a causal polynomial with f[0] != 0.
inline WienerElement reversed_polynomial(const WienerElement& f) {
  std::vector<Complex> c(f.coeffs().rbegin(), f.coeffs().rend());
  return WienerElement(std::move(c), 0);
}

/**
 * Laurent inverse of a polynomial with every root strictly inside the circle,
 * supported on negative powers.
 *
 * Writing f = z^s q(z) with q(0) != 0 and deg q = d, 1/q(z) = z^{-d} / q~(1/z)
 * where q~ is the reversed polynomial, whose roots lie outside the circle.
 * The causal inverse h of q~ is re-indexed as coefficient h_n at z^{-(n+s+d)}.
 */
inline InversionResult invert_anticausal(const WienerElement& f, int max_len,
                                         double eps,
                                         double tol = kDefaultRootTol) {
  if (!f.is_causal()) {
    throw std::invalid_argument("invert_anticausal: symbol is not causal");
  }
  RootClassification rc = classify_roots(f, tol);
  if (rc.degree() == 0 || rc.inside != rc.degree()) {
    throw NotInvertibleError(
        "invert_anticausal: every root must lie strictly inside the circle",
        std::move(rc));
  }
  const int shift = f.last_index();  // s + d
  const WienerElement q = WienerElement(f.coeffs(), 0);
  const WienerElement rev = reversed_polynomial(q);
  // Same roots, truncation length and bound as invert_causal(rev).
  InversionResult causal = detail::certified_causal_inverse(
      rev, polynomial_roots(rev), max_len, eps);
  // h_n sits at index -(n + shift); store lowest index first.
  std::vector<Complex> c(causal.inverse.coeffs().rbegin(),
                         causal.inverse.coeffs().rend());
  const int lowest = -(causal.inverse.last_index() + shift);
  return {WienerElement(std::move(c), lowest), InverseSide::Anticausal,
          causal.truncation_len, causal.tail_bound};
}

/**
 * Inverse of a lower-triangular matrix by forward substitution, one unit
 * vector at a time.  No pivoting, so the growth of the inverse is exposed
 * as is.
 */
inline Matrix lower_triangular_inverse(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix x = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      Complex s = (i == j) ? Complex{1.0} : Complex{0.0};
      for (Eigen::Index k = j; k < i; ++k) s -= a(i, k) * x(k, j);
      x(i, j) = s / a(i, i);
    }
  }
  return x;
}

struct AsymmetryRow {
  Eigen::Index dim;
  double norm_circulant_inverse;   ///< +inf when the circulant is singular
  double norm_triangular_inverse;
  double cond_circulant;
  double cond_triangular;
  bool circulant_singular;
};

/// Circulant spectra smaller than this (relative to ||f||_1) count as zero.
inline constexpr double kSingularCirculantTol = 1e-12;

/**
 * Inverse norms of f(B_N) (circulant, through its spectrum) and f(T_N)
 * (triangular, through forward substitution) for each N.
 */
inline std::vector<AsymmetryRow> asymmetry_report(
    const WienerElement& f, const std::vector<Eigen::Index>& dims) {
  if (!f.is_causal() || f[0] == 0.0) {
    throw std::invalid_argument(
        "asymmetry_report: need a causal polynomial with a_0 != 0");
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<AsymmetryRow> rows;
  for (Eigen::Index n : dims) {
    if (n < static_cast<Eigen::Index>(f.support_length())) {
      throw std::invalid_argument(
          "asymmetry_report: N is smaller than the support of the symbol");
    }
    AsymmetryRow row{n, inf, inf, inf, inf, false};
    const auto spectrum = circulant_spectrum(f, n);
    double lo = inf, hi = 0.0;
    for (Complex v : spectrum) {
      lo = std::min(lo, std::abs(v));
      hi = std::max(hi, std::abs(v));
    }
    if (lo <= kSingularCirculantTol * l1_norm(f)) {
      row.circulant_singular = true;
    } else {
      // Circulants are normal, so singular values are |eigenvalues|.
      row.norm_circulant_inverse = 1.0 / lo;
      row.cond_circulant = hi / lo;
    }
    const TruncatedOperator tri = build_unilateral(f, n);
    const Matrix tri_inv = lower_triangular_inverse(tri.matrix);
    row.norm_triangular_inverse = largest_singular_value(tri_inv);
    row.cond_triangular = operator_norm(tri) * row.norm_triangular_inverse;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace shiftop
