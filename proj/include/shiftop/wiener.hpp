#pragma once

/**
 * @file wiener.hpp
 * @brief Finitely supported elements of the Wiener algebra.
 *
 * An element is a Laurent polynomial f(z) = sum_n a_n z^n stored as a dense
 * coefficient block starting at index `offset`.  Elements are kept trimmed:
 * the first and last stored coefficients are nonzero unless the element is
 * zero, which is stored as the single coefficient 0 at offset 0.  With that
 * convention, equality of elements is plain equality of (offset, coeffs).
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace shiftop {

using Complex = std::complex<double>;

class WienerElement {
 public:
  WienerElement() : coeffs_{Complex{0.0}}, offset_{0} {}

  explicit WienerElement(std::vector<Complex> coeffs, int offset = 0)
      : coeffs_(std::move(coeffs)), offset_(offset) {
    trim();
  }

  /// Real coefficients a_offset, a_{offset+1}, ...
  static WienerElement from_real(const std::vector<double>& coeffs,
                                 int offset = 0) {
    std::vector<Complex> c(coeffs.begin(), coeffs.end());
    return WienerElement(std::move(c), offset);
  }

  static WienerElement polynomial(std::initializer_list<double> coeffs) {
    return from_real(std::vector<double>(coeffs));
  }

  static WienerElement constant(Complex c) { return WienerElement({c}, 0); }

  static WienerElement monomial(Complex c, int power) {
    return WienerElement({c}, power);
  }

  const std::vector<Complex>& coeffs() const { return coeffs_; }
  int offset() const { return offset_; }
  /// Index of the last stored coefficient.
  int last_index() const {
    return offset_ + static_cast<int>(coeffs_.size()) - 1;
  }
  std::size_t support_length() const { return coeffs_.size(); }

  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  bool is_causal() const { return offset_ >= 0; }

  bool is_real() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](Complex c) { return c.imag() == 0.0; });
  }

  /// Coefficient a_n; zero outside the stored support.
  Complex operator[](int n) const {
    if (n < offset_ || n > last_index()) return Complex{0.0};
    return coeffs_[static_cast<std::size_t>(n - offset_)];
  }

  friend bool operator==(const WienerElement&, const WienerElement&) = default;

  friend WienerElement operator+(const WienerElement& f,
                                 const WienerElement& g) {
    if (f.is_zero()) return g;
    if (g.is_zero()) return f;
    const int lo = std::min(f.offset_, g.offset_);
    const int hi = std::max(f.last_index(), g.last_index());
    std::vector<Complex> c(static_cast<std::size_t>(hi - lo + 1));
    for (int n = lo; n <= hi; ++n) {
      c[static_cast<std::size_t>(n - lo)] = f[n] + g[n];
    }
    return WienerElement(std::move(c), lo);
  }

  friend WienerElement operator*(Complex s, const WienerElement& f) {
    std::vector<Complex> c = f.coeffs_;
    for (auto& x : c) x *= s;
    return WienerElement(std::move(c), f.offset_);
  }

  friend WienerElement operator-(const WienerElement& f,
                                 const WienerElement& g) {
    return f + Complex{-1.0} * g;
  }

 private:
  void trim() {
    if (coeffs_.empty()) {
      coeffs_.assign(1, Complex{0.0});
      offset_ = 0;
      return;
    }
    auto nz = [](Complex c) { return c != 0.0; };
    auto first = std::find_if(coeffs_.begin(), coeffs_.end(), nz);
    if (first == coeffs_.end()) {
      coeffs_.assign(1, Complex{0.0});
      offset_ = 0;
      return;
    }
    auto last = std::find_if(coeffs_.rbegin(), coeffs_.rend(), nz).base();
    offset_ += static_cast<int>(first - coeffs_.begin());
    coeffs_ = std::vector<Complex>(first, last);
  }

  std::vector<Complex> coeffs_;
  int offset_;
};

/// Sum of |a_n| over the support.
inline double l1_norm(const WienerElement& f) {
  double s = 0.0;
  for (Complex c : f.coeffs()) s += std::abs(c);
  return s;
}

/// Sum of |n a_n|; bounds |f'| on the circle.
inline double derivative_l1_norm(const WienerElement& f) {
  double s = 0.0;
  for (int n = f.offset(); n <= f.last_index(); ++n) {
    s += std::abs(static_cast<double>(n)) * std::abs(f[n]);
  }
  return s;
}

/// Laurent convolution.  The result starts at offset(f) + offset(g).
inline WienerElement multiply(const WienerElement& f, const WienerElement& g) {
  const auto& a = f.coeffs();
  const auto& b = g.coeffs();
  std::vector<Complex> c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return WienerElement(std::move(c), f.offset() + g.offset());
}

inline WienerElement operator*(const WienerElement& f, const WienerElement& g) {
  return multiply(f, g);
}

namespace detail {

inline Complex ipow(Complex x, int n) {
  Complex r{1.0};
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

// Horner evaluation of sum_{k=0}^{n-1} c[k] x^k over c[first..first+n).
template <typename It>
Complex horner(It first, It last, Complex x) {
  Complex acc{0.0};
  while (last != first) {
    --last;
    acc = acc * x + *last;
  }
  return acc;
}

/// Evaluates f at an arbitrary nonzero point, one Horner pass per side of
/// the Laurent split.
inline Complex evaluate_unchecked(const WienerElement& f, Complex z) {
  const int lo = f.offset();
  const int hi = f.last_index();
  Complex pos{0.0};
  if (hi >= 0) {
    const int start = std::max(lo, 0);
    const auto& c = f.coeffs();
    pos = horner(c.begin() + (start - lo), c.end(), z) * ipow(z, start);
  }
  Complex neg{0.0};
  if (lo < 0) {
    // a_{-1} w + a_{-2} w^2 + ... with w = 1/z.
    const int top = std::min(hi, -1);
    std::vector<Complex> q(static_cast<std::size_t>(-lo));
    for (int n = lo; n <= top; ++n) q[static_cast<std::size_t>(-n - 1)] = f[n];
    const Complex w = 1.0 / z;
    neg = horner(q.begin(), q.end(), w) * w;
  }
  return pos + neg;
}

}  // namespace detail

/// f(z) for |z| = 1 (within 1e-12).  Throws std::domain_error otherwise.
inline Complex evaluate(const WienerElement& f, Complex z) {
  if (std::abs(std::abs(z) - 1.0) > 1e-12) {
    throw std::domain_error("evaluate: point is not on the unit circle");
  }
  return detail::evaluate_unchecked(f, z);
}

/// f(w) for a causal element and |w| <= 1 (power series inside the disk).
inline Complex evaluate_in_disk(const WienerElement& f, Complex w) {
  if (!f.is_causal()) {
    throw std::invalid_argument("evaluate_in_disk: element is not causal");
  }
  if (std::abs(w) > 1.0 + 1e-12) {
    throw std::domain_error("evaluate_in_disk: point outside the closed disk");
  }
  const auto& c = f.coeffs();
  return detail::horner(c.begin(), c.end(), w) * detail::ipow(w, f.offset());
}

inline bool is_power_of_two(std::size_t n) { return n && !(n & (n - 1)); }

/// Point k of the G-point grid on the circle, exp(2 pi i k / G).
///
/// k / G is an exact dyadic fraction, so a point of grid G is bitwise
/// identical to the matching point of grid 2G.
inline Complex circle_point(std::size_t k, std::size_t grid_size) {
  const double frac = static_cast<double>(k) / static_cast<double>(grid_size);
  return std::polar(1.0, 2.0 * std::numbers::pi * frac);
}

/**
 * Maximum of |f| over the grid of `grid_size` roots of unity.
 *
 * This is a lower bound on the true sup norm; the true value exceeds it by
 * at most sup_norm_grid_error(f, grid_size).  `grid_size` must be a power of
 * two and at least 16 so that refined grids nest.
 */
inline double sup_norm(const WienerElement& f, std::size_t grid_size) {
  if (grid_size < 16 || !is_power_of_two(grid_size)) {
    throw std::invalid_argument(
        "sup_norm: grid_size must be a power of two >= 16");
  }
  double best = 0.0;
  for (std::size_t k = 0; k < grid_size; ++k) {
    best = std::max(best,
                    std::abs(detail::evaluate_unchecked(
                        f, circle_point(k, grid_size))));
  }
  return best;
}

/// Upper bound on ||f||_inf - sup_norm(f, grid_size): every point of the
/// circle is within arc pi/G of the grid and |f'| <= sum |n a_n|.
inline double sup_norm_grid_error(const WienerElement& f,
                                  std::size_t grid_size) {
  return std::numbers::pi / static_cast<double>(grid_size) *
         derivative_l1_norm(f);
}

}  // namespace shiftop
