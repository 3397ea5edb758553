#pragma once

/**
 * @file operators.hpp
 * @brief Finite compressions of f(T) and f(B), norms and Szego quotients.
 *
 * The unilateral shift T is modeled as multiplication by z on H^2; its N x N
 * compression S has ones on the first subdiagonal, so f(T) compresses to the
 * lower-triangular Toeplitz matrix with first column (a_0, ..., a_{N-1}).
 * The bilateral shift B is modeled by the N x N cyclic shift C, which is
 * unitary and diagonalized by the discrete Fourier basis: the spectrum of
 * f(C) is {f(w^k)} for w = exp(2 pi i / N).
 */

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shiftop/wiener.hpp"

namespace shiftop {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class OperatorKind { UnilateralCompression, BilateralCirculant };

inline std::string_view to_string(OperatorKind kind) {
  return kind == OperatorKind::UnilateralCompression ? "UnilateralCompression"
                                                     : "BilateralCirculant";
}

struct TruncatedOperator {
  Matrix matrix;
  OperatorKind kind;
  WienerElement source;
  Eigen::Index dim;
};

namespace detail {

inline void require_causal(const WienerElement& f, const char* who) {
  if (!f.is_causal()) {
    throw std::invalid_argument(std::string(who) +
                                ": symbol has negative powers of z");
  }
}

inline void require_dim(Eigen::Index n, const char* who) {
  if (n < 1) throw std::invalid_argument(std::string(who) + ": dim < 1");
}

}  // namespace detail

/// f(S) = sum_n a_n S^n with S the N x N subdiagonal shift.
inline TruncatedOperator build_unilateral(const WienerElement& f,
                                          Eigen::Index dim) {
  detail::require_causal(f, "build_unilateral");
  detail::require_dim(dim, "build_unilateral");
  Matrix a = Matrix::Zero(dim, dim);
  Matrix power = Matrix::Identity(dim, dim);  // S^n, starting at n = 0
  for (int n = 0; n <= f.last_index() && n < dim; ++n) {
    if (n >= f.offset()) a += f[n] * power;
    // S * P moves every row of P down by one.
    power.bottomRows(dim - 1) = power.topRows(dim - 1).eval();
    power.row(0).setZero();
  }
  return {std::move(a), OperatorKind::UnilateralCompression, f, dim};
}

/// Circulant sum_n a_n C^n with C e_j = e_{j+1 mod N}.
inline TruncatedOperator build_bilateral(const WienerElement& f,
                                         Eigen::Index dim) {
  detail::require_dim(dim, "build_bilateral");
  if (static_cast<Eigen::Index>(f.support_length()) > dim) {
    throw std::invalid_argument(
        "build_bilateral: dim is smaller than the support of the symbol");
  }
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = f.offset(); n <= f.last_index(); ++n) {
    const Eigen::Index shift = ((n % dim) + dim) % dim;
    for (Eigen::Index j = 0; j < dim; ++j) {
      a((j + shift) % dim, j) += f[n];
    }
  }
  return {std::move(a), OperatorKind::BilateralCirculant, f, dim};
}

/**
 * T_f built from its definition: column j holds the coefficients of
 * P(f(z) z^j) in degrees 0..N-1, where P projects onto H^2.
 */
inline TruncatedOperator build_toeplitz(const WienerElement& f,
                                        Eigen::Index dim) {
  detail::require_causal(f, "build_toeplitz");
  detail::require_dim(dim, "build_toeplitz");
  Matrix a = Matrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const WienerElement column =
        multiply(f, WienerElement::monomial(1.0, static_cast<int>(j)));
    for (Eigen::Index i = 0; i < dim; ++i) a(i, j) = column[static_cast<int>(i)];
  }
  return {std::move(a), OperatorKind::UnilateralCompression, f, dim};
}

/// Eigenvalues of build_bilateral(f, N) in Fourier order: f(w^k), k = 0..N-1.
inline std::vector<Complex> circulant_spectrum(const WienerElement& f,
                                               Eigen::Index dim) {
  std::vector<Complex> out(static_cast<std::size_t>(dim));
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(dim);
    out[static_cast<std::size_t>(k)] =
        detail::evaluate_unchecked(f, std::polar(1.0, theta));
  }
  return out;
}

/// Matrices at or above this size use Lanczos instead of a dense SVD.
inline constexpr Eigen::Index kDenseNormLimit = 1024;

namespace detail {

inline double dense_largest_singular_value(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

/**
 * Largest eigenvalue of A^H A by Lanczos with full reorthogonalization.
 * Stops when the Ritz estimate min(r, r^2 / gap) drops below 1e-12 relative,
 * or when the Krylov space fills the whole domain (then the answer is exact
 * up to rounding).
 */
/**
 * Last component of the unit eigenvector of the symmetric tridiagonal
 * T = tridiag(beta, alpha, beta) (leading m x m block) for its largest
 * eigenvalue theta, by inverse iteration.  theta' I - T with theta' slightly
 * above theta is positive definite, so the LDL^T sweep needs no pivoting.
 */
inline double tridiagonal_top_vector_tail(const std::vector<double>& alpha,
                                          const std::vector<double>& beta,
                                          Eigen::Index m, double theta) {
  const std::size_t n = static_cast<std::size_t>(m);
  double scale = std::abs(theta);
  for (std::size_t i = 0; i + 1 < n; ++i) scale = std::max(scale, std::abs(beta[i]));
  const double shift = theta + 1e-13 * std::max(scale, 1e-300);
  std::vector<double> d(n), l(n, 0.0), y(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = shift - alpha[i];
    if (i > 0) {
      l[i] = -beta[i - 1] / d[i - 1];
      d[i] -= l[i] * -beta[i - 1];
    }
  }
  for (int iter = 0; iter < 3; ++iter) {
    for (std::size_t i = 1; i < n; ++i) y[i] -= l[i] * y[i - 1];
    for (std::size_t i = 0; i < n; ++i) y[i] /= d[i];
    for (std::size_t i = n - 1; i-- > 0;) y[i] -= l[i + 1] * y[i + 1];
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : y) v /= norm;
  }
  return y[n - 1];
}

inline double lanczos_largest_singular_value(const Matrix& a) {
  const Eigen::Index n = a.cols();
  const Eigen::Index max_steps = n;
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = Complex(u(rng), u(rng));
  q.normalize();

  Matrix basis(n, std::min<Eigen::Index>(max_steps, 64));
  std::vector<double> alpha;
  std::vector<double> beta;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < max_steps; ++k) {
    if (k >= basis.cols()) {
      basis.conservativeResize(n, std::min<Eigen::Index>(max_steps, 2 * k));
    }
    basis.col(k) = q;
    Vector w = a.adjoint() * (a * q);
    alpha.push_back(w.dot(q).real());
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      const auto v = basis.leftCols(k + 1);
      w -= v * (v.adjoint() * w);
    }
    const double b = w.norm();

    const bool check = (k + 1) % 8 == 0 || k + 1 == max_steps || b == 0.0;
    if (check) {
      const Eigen::Index m = k + 1;
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
      theta = es.eigenvalues()(m - 1);
      const double gap = m > 1 ? theta - es.eigenvalues()(m - 2) : theta;
      const double resid =
          std::abs(b * tridiagonal_top_vector_tail(alpha, beta, m, theta));
      const double err = gap > 0.0 ? std::min(resid, resid * resid / gap)
                                   : resid;
      if (b == 0.0 || k + 1 == max_steps || err <= 1e-12 * theta) break;
    }
    beta.push_back(b);
    q = w / b;
  }
  return std::sqrt(std::max(theta, 0.0));
}

}  // namespace detail

/// Largest singular value of a dense matrix.
inline double largest_singular_value(const Matrix& a) {
  if (a.rows() < kDenseNormLimit && a.cols() < kDenseNormLimit) {
    return detail::dense_largest_singular_value(a);
  }
  return detail::lanczos_largest_singular_value(a);
}

inline double operator_norm(const TruncatedOperator& op) {
  return largest_singular_value(op.matrix);
}

/// Truncated Szego kernel at w: values[k] = conj(w)^k.
struct SzegoVector {
  Complex point;
  Vector values;
};

inline constexpr double kSzegoMaxRadius = 1.0 - 1e-6;

inline SzegoVector szego_vector(Complex w, Eigen::Index dim) {
  if (std::abs(w) > kSzegoMaxRadius) {
    throw std::domain_error("szego_vector: |w| must be at most 1 - 1e-6");
  }
  detail::require_dim(dim, "szego_vector");
  Vector v(dim);
  const Complex wc = std::conj(w);
  Complex p{1.0};
  for (Eigen::Index k = 0; k < dim; ++k) {
    v(k) = p;
    p *= wc;
  }
  return {w, std::move(v)};
}

/**
 * <A k, k> / <k, k> with A = build_unilateral(f, N) and k the truncated
 * Szego kernel.  A k is formed by direct convolution with the coefficients
 * of f rather than through a dense matrix.
 */
inline Complex rayleigh_quotient(const WienerElement& f, const SzegoVector& k) {
  detail::require_causal(f, "rayleigh_quotient");
  const Eigen::Index n = k.values.size();
  Vector ak = Vector::Zero(n);
  for (int d = f.offset(); d <= f.last_index() && d < n; ++d) {
    const Complex a = f[d];
    if (a == 0.0) continue;
    ak.tail(n - d) += a * k.values.head(n - d);
  }
  // Eigen's dot conjugates its first argument: k.dot(ak) = sum conj(k_i) ak_i.
  return k.values.dot(ak) / k.values.squaredNorm();
}

struct IsometryRow {
  Eigen::Index dim;
  double norm;  ///< ||f(T_N)||
  double gap;   ///< sup_norm(f, grid) - ||f(T_N)||
};

inline constexpr std::size_t kDefaultGrid = std::size_t{1} << 16;

/// Convergence of ||f(T_N)|| toward the grid sup norm over increasing N.
inline std::vector<IsometryRow> isometry_sweep(
    const WienerElement& f, const std::vector<Eigen::Index>& dims,
    std::size_t grid_size = kDefaultGrid) {
  detail::require_causal(f, "isometry_sweep");
  if (!std::is_sorted(dims.begin(), dims.end()) ||
      std::adjacent_find(dims.begin(), dims.end()) != dims.end()) {
    throw std::invalid_argument("isometry_sweep: dims must strictly increase");
  }
  const double sup = sup_norm(f, grid_size);
  std::vector<IsometryRow> rows;
  rows.reserve(dims.size());
  for (Eigen::Index n : dims) {
    const double norm = operator_norm(build_unilateral(f, n));
    rows.push_back({n, norm, sup - norm});
  }
  return rows;
}

/// Dense text dump: "N kind" then N rows of N "re,im" pairs.
inline void write_matrix_dump(std::ostream& os, const TruncatedOperator& op) {
  os << op.dim << ' ' << to_string(op.kind) << '\n';
  const auto prec = os.precision(17);
  for (Eigen::Index i = 0; i < op.dim; ++i) {
    for (Eigen::Index j = 0; j < op.dim; ++j) {
      if (j) os << ' ';
      os << op.matrix(i, j).real() << ',' << op.matrix(i, j).imag();
    }
    os << '\n';
  }
  os.precision(prec);
}

struct MatrixDump {
  Matrix matrix;
  OperatorKind kind;
};

inline MatrixDump read_matrix_dump(std::istream& is) {
  Eigen::Index n = 0;
  std::string kind;
  if (!(is >> n >> kind) || n < 1) {
    throw std::runtime_error("matrix dump: bad header");
  }
  MatrixDump out{Matrix(n, n), OperatorKind::UnilateralCompression};
  if (kind == "BilateralCirculant") {
    out.kind = OperatorKind::BilateralCirculant;
  } else if (kind != "UnilateralCompression") {
    throw std::runtime_error("matrix dump: unknown kind '" + kind + "'");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double re = 0.0, im = 0.0;
      char comma = 0;
      if (!(is >> re >> comma >> im) || comma != ',') {
        throw std::runtime_error("matrix dump: bad entry at row " +
                                 std::to_string(i) + ", column " +
                                 std::to_string(j));
      }
      out.matrix(i, j) = Complex(re, im);
    }
  }
  return out;
}

}  // namespace shiftop
