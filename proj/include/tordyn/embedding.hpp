// Archimedean picture of a toral automorphism: companion matrix, roots
// grouped into places, a real basis of the central subspace W0 and the
// projection onto it along the invariant complement.
#pragma once

#include "tordyn/classify.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace tordyn {

/// Companion matrix: ones on the superdiagonal, last row (-f_0, ..., -f_{n-1}).
inline IntMatrix companion(const IntPolynomial& f) {
  if (f.degree() < 1) throw ContractError("companion: degree must be at least 1");
  if (f.lead() != 1) throw ContractError("companion: polynomial is not monic");
  const auto n = static_cast<std::size_t>(f.degree());
  IntMatrix a(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) a(i, i + 1) = 1;
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = -f.coeff(j);
  return a;
}

struct Place {
  bool real = true;
  bool central = false;  // complex place with |θ|_v = 1
  HighComplex root;      // representative with nonnegative imaginary part
};

using CVector = std::vector<std::complex<double>>;

/// Central frame of an ergodic unit polynomial with s >= 1 unit-circle pairs.
///
/// Central coordinates are w in C^s; the lift to R^n is
/// L(w) = sum_v Re(w_v·V_v) with V_v = (1, θ_v, ..., θ_v^{n-1}) the
/// Vandermonde eigenvector of the companion matrix, so A·L(w) = L(ξ·w).
/// Columns 2v, 2v+1 of `basis` are Re V_v and -Im V_v; the remaining n - 2s
/// columns span the invariant complement (Gram-Schmidt orthonormalized).
struct CentralFrame {
  IntPolynomial f;
  IntMatrix A;
  std::vector<Place> places;
  std::vector<std::size_t> s0_places;  // indices into places, ordered by angle
  std::vector<HighFloat> angles;       // φ_v in (0, π)
  std::vector<HighFloat> reduced_roots;  // 2cos φ_v, roots of the reduced polynomial
  DenseMatrix<HighFloat> basis;
  DenseMatrix<HighFloat> basis_inv;
  DenseMatrix<HighFloat> proj_W0;
  DenseMatrix<double> A_d;
  DenseMatrix<double> basis_d;
  DenseMatrix<double> basis_inv_d;
  DenseMatrix<double> proj_W0_d;
  int precision_bits = 128;

  int n() const { return f.degree(); }
  int s() const { return static_cast<int>(angles.size()); }
  HighFloat tolerance() const { return pow2(-precision_bits / 2); }

  std::vector<std::vector<HighFloat>> basis_W0() const { return columns(0, 2 * s()); }
  std::vector<std::vector<HighFloat>> basis_complement() const { return columns(2 * s(), n()); }

 private:
  std::vector<std::vector<HighFloat>> columns(int from, int to) const {
    std::vector<std::vector<HighFloat>> out;
    for (int j = from; j < to; ++j) {
      std::vector<HighFloat> c(static_cast<std::size_t>(n()));
      for (int i = 0; i < n(); ++i) c[static_cast<std::size_t>(i)] = basis(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      out.push_back(std::move(c));
    }
    return out;
  }
};

namespace detail {

// Sign of g at x evaluated exactly.
inline int sign_at(const IntPolynomial& g, const BigRational& x) {
  const BigRational v = g.eval(x);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

/// Isolates the real roots of the squarefree g in (lo, hi) into disjoint
/// intervals (a, b] holding one root each, by Sturm-guided subdivision.
inline void isolate_real_roots(const SturmChain& sc, const BigRational& lo, const BigRational& hi, int count,
                               std::vector<std::pair<BigRational, BigRational>>& out) {
  if (count == 0) return;
  if (count == 1) {
    out.emplace_back(lo, hi);
    return;
  }
  const BigRational mid = (lo + hi) / 2;
  const int left = sc.variations(lo) - sc.variations(mid);
  isolate_real_roots(sc, lo, mid, left, out);
  isolate_real_roots(sc, mid, hi, count - left, out);
}

/// Refines the single simple root of g in (a, b] by bisection in HighFloat.
inline HighFloat bisect_root(const IntPolynomial& g, BigRational a, BigRational b) {
  if (sign_at(g, b) == 0) return to_high(b);
  // shrink exactly until the endpoints bracket a sign change
  while (sign_at(g, a) == 0 || sign_at(g, a) == sign_at(g, b)) a = (a + b) / 2;
  HighFloat lo = to_high(a), hi = to_high(b);
  const int slo = sign_at(g, a);
  for (int it = 0; it < kMaxPrecisionBits + 16; ++it) {
    const HighFloat mid = (lo + hi) / 2;
    if (mid == lo || mid == hi) break;
    const HighFloat v = g.eval(mid);
    if (v == 0) return mid;
    if ((v > 0) == (slo > 0)) lo = mid; else hi = mid;
  }
  return (lo + hi) / 2;
}

inline std::vector<HighComplex> vandermonde(const HighComplex& theta, int n) {
  std::vector<HighComplex> v(static_cast<std::size_t>(n));
  HighComplex p(1);
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = p;
    p *= theta;
  }
  return v;
}

inline DenseMatrix<double> to_double_matrix(const DenseMatrix<HighFloat>& m) {
  DenseMatrix<double> d(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) d.data[i] = to_double(m.data[i]);
  return d;
}

}  // namespace detail

/// Builds the central frame. Unit-circle roots are located from the exact
/// Sturm isolation of the reduced polynomial and refined by bisection; the
/// remaining roots come from high-precision Aberth iteration.
inline CentralFrame build_frame(const IntPolynomial& f_in, int precision_bits = 128) {
  if (precision_bits < 32 || precision_bits > kMaxPrecisionBits)
    throw ContractError("build_frame: precision_bits must lie in [32, " + std::to_string(kMaxPrecisionBits) + "]");
  const ClassificationReport rep = classify(f_in);
  if (!rep.irreducible) throw ContractError("build_frame: polynomial is reducible");
  if (!rep.ergodic) throw ContractError("build_frame: polynomial is cyclotomic (not ergodic)");
  if (!rep.algebraic_unit)
    throw ContractError("build_frame: not an algebraic unit (solenoid case); frames are only built on the torus");
  if (rep.s0_count < 1) throw ContractError("build_frame: s0_count = 0 (hyperbolic, no central frame)");

  CentralFrame fr;
  fr.f = rep.input;
  fr.precision_bits = precision_bits;
  const int n = fr.f.degree();
  fr.A = companion(fr.f);

  // Certified unit-circle angles.
  const IntPolynomial g = chebyshev_reduce(fr.f);
  SturmChain sc(g);
  const int count = sc.variations(BigRational(-2)) - sc.variations(BigRational(2));
  if (count != rep.s0_count) throw std::logic_error("build_frame: Sturm count disagrees with classification");
  std::vector<std::pair<BigRational, BigRational>> intervals;
  detail::isolate_real_roots(sc, BigRational(-2), BigRational(2), count, intervals);
  for (const auto& [a, b] : intervals) {
    const HighFloat t = detail::bisect_root(g, a, b);
    fr.reduced_roots.push_back(t);
  }
  // larger t = smaller angle; order by angle ascending
  std::sort(fr.reduced_roots.begin(), fr.reduced_roots.end(), [](const HighFloat& x, const HighFloat& y) { return x > y; });
  for (const auto& t : fr.reduced_roots) fr.angles.push_back(acos(t / 2));

  // Numeric roots, matched against the certified unit-circle ones.
  const auto roots = polynomial_roots(fr.f.coeffs(), kMaxPrecisionBits);
  HighFloat min_sep = -1;
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      const HighFloat d = abs(roots[i] - roots[j]);
      if (min_sep < 0 || d < min_sep) min_sep = d;
    }
  const HighFloat tol = fr.tolerance();
  if (min_sep >= 0 && min_sep < 64 * tol) {
    const double bits = -2.0 * std::log2(to_double(min_sep)) + 12.0;
    throw ContractError("build_frame: precision insufficient to separate roots; need about " +
                        std::to_string(static_cast<int>(std::ceil(bits))) + " bits");
  }
  const HighFloat real_tol = sqrt(tol) * pow2(-16);
  std::vector<bool> used(roots.size(), false);
  for (const auto& phi : fr.angles) {
    const HighComplex target(cos(phi), sin(phi));
    std::size_t best = roots.size();
    HighFloat best_d = 0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const HighFloat d = abs(roots[i] - target);
      if (best == roots.size() || d < best_d) {
        best = i;
        best_d = d;
      }
    }
    if (best_d > sqrt(tol)) throw std::logic_error("build_frame: certified unit-circle root not found numerically");
    used[best] = true;
    for (std::size_t i = 0; i < roots.size(); ++i)
      if (!used[i] && abs(roots[i] - conj(target)) < sqrt(tol)) {
        used[i] = true;
        break;
      }
    Place p;
    p.real = false;
    p.central = true;
    p.root = target;  // exact-on-circle representative
    fr.s0_places.push_back(fr.places.size());
    fr.places.push_back(p);
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const HighComplex& z = roots[i];
    if (abs(z.imag()) < real_tol) {
      Place p;
      p.root = HighComplex(z.real(), HighFloat(0));
      fr.places.push_back(p);
      used[i] = true;
    } else if (z.imag() > 0) {
      Place p;
      p.real = false;
      p.root = z;
      fr.places.push_back(p);
      used[i] = true;
    }
  }

  // Basis: central columns first, then the complement.
  fr.basis = DenseMatrix<HighFloat>(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  std::size_t col = 0;
  auto put = [&](const std::vector<HighComplex>& v, bool imag_neg) {
    for (int i = 0; i < n; ++i)
      fr.basis(static_cast<std::size_t>(i), col) =
          imag_neg ? HighFloat(-v[static_cast<std::size_t>(i)].imag()) : HighFloat(v[static_cast<std::size_t>(i)].real());
    ++col;
  };
  for (auto idx : fr.s0_places) {
    const auto v = detail::vandermonde(fr.places[idx].root, n);
    put(v, false);
    put(v, true);
  }
  const std::size_t first_complement = col;
  for (const auto& p : fr.places) {
    if (p.central) continue;
    const auto v = detail::vandermonde(p.root, n);
    put(v, false);
    if (!p.real) put(v, true);
  }
  if (col != static_cast<std::size_t>(n)) throw std::logic_error("build_frame: place decomposition does not span R^n");
  // Gram-Schmidt inside the complement.
  for (std::size_t j = first_complement; j < col; ++j) {
    for (std::size_t k = first_complement; k < j; ++k) {
      HighFloat dot = 0;
      for (int i = 0; i < n; ++i) dot += fr.basis(i, j) * fr.basis(i, k);
      for (int i = 0; i < n; ++i) fr.basis(i, j) -= dot * fr.basis(i, k);
    }
    HighFloat norm = 0;
    for (int i = 0; i < n; ++i) norm += fr.basis(i, j) * fr.basis(i, j);
    norm = sqrt(norm);
    for (int i = 0; i < n; ++i) fr.basis(i, j) /= norm;
  }
  fr.basis_inv = inverse(fr.basis);
  DenseMatrix<HighFloat> keep(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < first_complement; ++i) keep(i, i) = 1;
  fr.proj_W0 = fr.basis * keep * fr.basis_inv;

  DenseMatrix<HighFloat> ah(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < fr.A.data.size(); ++i) ah.data[i] = HighFloat(fr.A.data[i]);
  fr.A_d = detail::to_double_matrix(ah);
  fr.basis_d = detail::to_double_matrix(fr.basis);
  fr.basis_inv_d = detail::to_double_matrix(fr.basis_inv);
  fr.proj_W0_d = detail::to_double_matrix(fr.proj_W0);
  return fr;
}

/// ||w|| = max_v |w_v|.
inline double central_norm(const CentralFrame& fr, const CVector& w) {
  if (static_cast<int>(w.size()) != fr.s()) throw ContractError("central_norm: dimension mismatch");
  double m = 0;
  for (const auto& z : w) m = std::max(m, std::abs(z));
  return m;
}

inline double central_norm(const CVector& w) {
  double m = 0;
  for (const auto& z : w) m = std::max(m, std::abs(z));
  return m;
}

/// ξ^m = (e^{i m φ_v})_v.
inline std::vector<HighComplex> central_rotation_high(const CentralFrame& fr, long long m) {
  std::vector<HighComplex> out;
  for (const auto& phi : fr.angles) {
    const HighFloat a = phi * HighFloat(m);
    out.emplace_back(cos(a), sin(a));
  }
  return out;
}

inline CVector central_rotation(const CentralFrame& fr, long long m) {
  CVector out;
  for (const auto& z : central_rotation_high(fr, m)) out.push_back(to_double(z));
  return out;
}

/// Multiplies central coordinates place-wise: (γ_v w_v)_v.
inline CVector rotate(const CVector& gamma, const CVector& w) {
  if (gamma.size() != w.size()) throw ContractError("rotate: dimension mismatch");
  CVector out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = gamma[i] * w[i];
  return out;
}

/// Lift of central coordinates to R^n.
inline std::vector<double> lift(const CentralFrame& fr, const CVector& w) {
  if (static_cast<int>(w.size()) != fr.s()) throw ContractError("lift: dimension mismatch");
  const auto n = static_cast<std::size_t>(fr.n());
  std::vector<double> x(n, 0.0);
  for (std::size_t v = 0; v < w.size(); ++v)
    for (std::size_t i = 0; i < n; ++i)
      x[i] += w[v].real() * fr.basis_d(i, 2 * v) + w[v].imag() * fr.basis_d(i, 2 * v + 1);
  return x;
}

inline std::vector<HighFloat> lift_high(const CentralFrame& fr, const std::vector<HighComplex>& w) {
  if (static_cast<int>(w.size()) != fr.s()) throw ContractError("lift: dimension mismatch");
  const auto n = static_cast<std::size_t>(fr.n());
  std::vector<HighFloat> x(n, HighFloat(0));
  for (std::size_t v = 0; v < w.size(); ++v)
    for (std::size_t i = 0; i < n; ++i)
      x[i] += w[v].real() * fr.basis(i, 2 * v) + w[v].imag() * fr.basis(i, 2 * v + 1);
  return x;
}

/// Central coordinates of the W0-component of x (projection along the complement).
inline CVector central_coordinates(const CentralFrame& fr, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != fr.n()) throw ContractError("central_coordinates: dimension mismatch");
  CVector w(static_cast<std::size_t>(fr.s()));
  for (std::size_t v = 0; v < w.size(); ++v) {
    double re = 0, im = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      re += fr.basis_inv_d(2 * v, j) * x[j];
      im += fr.basis_inv_d(2 * v + 1, j) * x[j];
    }
    w[v] = {re, im};
  }
  return w;
}

inline std::vector<HighComplex> central_coordinates_high(const CentralFrame& fr, const std::vector<HighFloat>& x) {
  if (static_cast<int>(x.size()) != fr.n()) throw ContractError("central_coordinates: dimension mismatch");
  std::vector<HighComplex> w;
  for (std::size_t v = 0; v < static_cast<std::size_t>(fr.s()); ++v) {
    HighFloat re = 0, im = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      re += fr.basis_inv(2 * v, j) * x[j];
      im += fr.basis_inv(2 * v + 1, j) * x[j];
    }
    w.emplace_back(re, im);
  }
  return w;
}

/// Coordinates of x along the complement basis columns.
inline std::vector<double> complement_coordinates(const CentralFrame& fr, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != fr.n()) throw ContractError("complement_coordinates: dimension mismatch");
  const auto first = static_cast<std::size_t>(2 * fr.s());
  std::vector<double> c(static_cast<std::size_t>(fr.n()) - first, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k)
    for (std::size_t j = 0; j < x.size(); ++j) c[k] += fr.basis_inv_d(first + k, j) * x[j];
  return c;
}

}  // namespace tordyn
