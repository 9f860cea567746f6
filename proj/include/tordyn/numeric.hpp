// High-precision scalar types, polynomial root finding and small dense
// linear algebra shared by the exact and numeric modules.
#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tordyn {

namespace mp = boost::multiprecision;

using BigInt = mp::cpp_int;
using BigRational = mp::cpp_rational;

/// 256-bit binary floating point. Every high-precision computation in the
/// library is carried out in this type; callers pick a working precision
/// (<= kMaxPrecisionBits) that only controls tolerances.
using HighFloat = mp::number<mp::cpp_bin_float<256, mp::digit_base_2>, mp::et_off>;
using HighComplex =
    mp::number<mp::complex_adaptor<mp::cpp_bin_float<256, mp::digit_base_2>>, mp::et_off>;

inline constexpr int kMaxPrecisionBits = 256;

/// Base class of every error caused by a caller violating an operation's
/// preconditions (the CLI maps these to exit code 2).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iteration or memory budget exhausted.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure could not certify its own accuracy.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline HighFloat pow2(int e) { return ldexp(HighFloat(1), e); }

inline HighFloat to_high(const BigInt& v) { return HighFloat(v); }

inline HighFloat to_high(const BigRational& v) {
  return HighFloat(mp::numerator(v)) / HighFloat(mp::denominator(v));
}

inline double to_double(const HighFloat& v) { return v.convert_to<double>(); }

inline std::complex<double> to_double(const HighComplex& z) {
  return {z.real().convert_to<double>(), z.imag().convert_to<double>()};
}

namespace detail {

template <class C, class R>
void eval_with_derivative(std::span<const R> coeffs, const C& z, C& value, C& deriv) {
  const std::size_t n = coeffs.size();
  value = C(coeffs[n - 1]);
  deriv = C(0);
  for (std::size_t i = n - 1; i-- > 0;) {
    deriv = deriv * z + value;
    value = value * z + C(coeffs[i]);
  }
}

// One Aberth-Ehrlich sweep; returns the largest correction modulus.
template <class C, class R, class Abs>
R aberth_sweep(std::span<const R> coeffs, std::vector<C>& z, Abs abs_fn) {
  R worst = R(0);
  const std::size_t n = z.size();
  for (std::size_t i = 0; i < n; ++i) {
    C p, dp;
    eval_with_derivative<C, R>(coeffs, z[i], p, dp);
    if (abs_fn(p) == R(0)) continue;
    C ratio = p / dp;
    C sum = C(0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sum += C(1) / (z[i] - z[j]);
    }
    C step = ratio / (C(1) - ratio * sum);
    z[i] -= step;
    worst = std::max(worst, R(abs_fn(step)));
  }
  return worst;
}

}  // namespace detail

/// All complex roots of the integer polynomial with coefficients `coeffs`
/// (index 0 = constant term), refined to roughly 2^-precision_bits relative
/// accuracy. Roots are approximated in double precision with Aberth's method
/// and then polished by high-precision Aberth sweeps. Meant for squarefree
/// input; repeated roots converge only linearly.
inline std::vector<HighComplex> polynomial_roots(std::span<const BigInt> coeffs,
                                                 int precision_bits = kMaxPrecisionBits) {
  std::size_t len = coeffs.size();
  while (len > 0 && coeffs[len - 1] == 0) --len;
  if (len < 2) return {};
  const std::size_t n = len - 1;

  std::vector<HighFloat> hc(len);
  for (std::size_t i = 0; i < len; ++i) hc[i] = HighFloat(coeffs[i]);

  // Scale to a monic double polynomial for the seeding stage.
  std::vector<double> dc(len);
  const HighFloat lead = hc[n];
  for (std::size_t i = 0; i < len; ++i) dc[i] = to_double(hc[i] / lead);

  double bound = 0.0;  // Cauchy bound
  for (std::size_t i = 0; i < n; ++i) bound = std::max(bound, std::abs(dc[i]));
  bound += 1.0;

  std::vector<std::complex<double>> zd(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * (double(k) + 0.25) / double(n) + 0.4;
    zd[k] = std::polar(0.5 * bound, angle);
  }
  auto dabs = [](const std::complex<double>& v) { return std::abs(v); };
  for (int it = 0; it < 800; ++it) {
    double worst = detail::aberth_sweep<std::complex<double>, double>(dc, zd, dabs);
    bool finite = true;
    for (const auto& v : zd) finite = finite && std::isfinite(v.real()) && std::isfinite(v.imag());
    if (!finite) throw std::runtime_error("polynomial_roots: double seeding diverged");
    if (worst < 1e-14 * bound) break;
  }

  std::vector<HighComplex> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = HighComplex(HighFloat(zd[k].real()), HighFloat(zd[k].imag()));
  auto habs = [](const HighComplex& v) { return HighFloat(abs(v)); };
  const HighFloat tol = pow2(-std::min(precision_bits, kMaxPrecisionBits - 8)) * HighFloat(bound);
  for (int it = 0; it < 200; ++it) {
    HighFloat worst = detail::aberth_sweep<HighComplex, HighFloat>(hc, z, habs);
    if (worst <= tol) break;
  }
  return z;
}

/// Dense row-major matrix over a field-like scalar.
template <class T>
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T(0)) {}

  T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  bool operator==(const DenseMatrix&) const = default;
};

template <class T>
DenseMatrix<T> operator*(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.cols != b.rows) throw ContractError("matrix product: dimension mismatch");
  DenseMatrix<T> c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      if (a(i, k) == T(0)) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

template <class T>
std::vector<T> operator*(const DenseMatrix<T>& a, const std::vector<T>& x) {
  if (a.cols != x.size()) throw ContractError("matrix-vector product: dimension mismatch");
  std::vector<T> y(a.rows, T(0));
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) y[i] += a(i, j) * x[j];
  return y;
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
template <class T>
DenseMatrix<T> inverse(DenseMatrix<T> a) {
  using std::abs;
  if (a.rows != a.cols) throw ContractError("inverse: matrix not square");
  const std::size_t n = a.rows;
  DenseMatrix<T> inv = DenseMatrix<T>::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (abs(a(r, col)) > abs(a(piv, col))) piv = r;
    if (a(piv, col) == T(0)) throw std::runtime_error("inverse: singular matrix");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const T d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col) == T(0)) continue;
      const T factor = a(r, col);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= factor * a(col, j);
        inv(r, j) -= factor * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace tordyn
