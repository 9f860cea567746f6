// Dynamical classification of integer polynomials and integer matrices:
// irreducibility, ergodicity, expansiveness, total irreducibility, the torus
// (unit) versus solenoid case, and the archimedean place counts.
#pragma once

#include "tordyn/poly_core.hpp"

#include <boost/multiprecision/miller_rabin.hpp>

#include <random>
#include <set>
#include <string>
#include <vector>

namespace tordyn {

struct ClassificationReport {
  IntPolynomial input;
  bool irreducible = false;
  bool ergodic = false;
  bool expansive = false;
  bool totally_irreducible = false;
  bool algebraic_unit = false;
  bool is_self_inversive = false;
  int s0_count = 0;
  int central_real_dim = 0;
  int real_place_count = 0;
  int complex_place_count = 0;
  std::vector<BigInt> finite_place_primes;
  std::vector<std::string> notes;
};

using IntMatrix = DenseMatrix<BigInt>;

/// Characteristic polynomial det(u·I - A) by the Faddeev-LeVerrier
/// recursion; every division in the recursion is exact over Z.
inline IntPolynomial characteristic_polynomial(const IntMatrix& a) {
  if (a.rows != a.cols) throw ContractError("characteristic polynomial: matrix is not square");
  const std::size_t n = a.rows;
  std::vector<BigInt> c(n + 1);
  c[n] = 1;
  IntMatrix m(n, n);  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    IntMatrix am = a * m;
    for (std::size_t i = 0; i < n; ++i) am(i, i) += c[n - k + 1];
    m = std::move(am);  // M_k = A·M_{k-1} + c_{n-k+1}·I
    IntMatrix amk = a * m;
    BigInt trace = 0;
    for (std::size_t i = 0; i < n; ++i) trace += amk(i, i);
    c[n - k] = -trace / static_cast<long long>(k);
  }
  return IntPolynomial(std::move(c));
}

namespace detail {

inline std::vector<BigInt> prime_divisors(BigInt v) {
  std::vector<BigInt> out;
  v = abs(v);
  if (v < 2) return out;
  for (unsigned p = 2; p < 1000000; ++p) {
    if (BigInt(p) * p > v) break;
    if (v % p == 0) {
      out.emplace_back(p);
      while (v % p == 0) v /= p;
    }
  }
  if (v > 1) {
    std::mt19937_64 gen(0x9e3779b97f4a7c15ULL);
    if (!mp::miller_rabin_test(v, 40, gen))
      throw ContractError("finite place support: cofactor " + v.str() + " is composite beyond trial division");
    out.push_back(v);
  }
  return out;
}

/// Cauchy bound on the moduli of the roots, as a rational.
inline BigRational cauchy_bound(const IntPolynomial& f) {
  BigRational m = 0;
  for (int i = 0; i < f.degree(); ++i) {
    BigRational r = BigRational(abs(f.coeff(static_cast<std::size_t>(i)))) / BigRational(abs(f.lead()));
    if (r > m) m = r;
  }
  return m + 1;
}

/// Newton divided-difference interpolation over Q at the nodes xs.
inline RationalPolynomial interpolate(const std::vector<BigInt>& xs, const std::vector<BigInt>& ys) {
  const std::size_t n = xs.size();
  std::vector<BigRational> dd(ys.begin(), ys.end());
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = n - 1; i >= level; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / BigRational(xs[i] - xs[i - level]);
      if (i == level) break;
    }
  RationalPolynomial acc(std::vector<BigRational>{dd[n - 1]});
  for (std::size_t i = n - 1; i-- > 0;) {
    acc = acc * RationalPolynomial(std::vector<BigRational>{BigRational(-xs[i]), BigRational(1)});
    acc = acc + RationalPolynomial(std::vector<BigRational>{dd[i]});
  }
  return acc;
}

inline IntPolynomial rational_to_integer_exact(const RationalPolynomial& p) {
  std::vector<BigInt> v;
  for (const auto& c : p.coeffs()) {
    if (mp::denominator(c) != 1) throw std::logic_error("interpolated polynomial is not integral");
    v.push_back(mp::numerator(c));
  }
  return IntPolynomial(std::move(v));
}

/// The orders k >= 2 a root of unity of degree <= n^2 can have.
inline std::vector<std::uint64_t> degeneracy_orders(int n) {
  std::vector<std::uint64_t> out;
  for (auto k : totient_preimages_upto(static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n)))
    if (k >= 2) out.push_back(k);
  return out;
}

/// Monic integer polynomial whose roots are lc(f)·θ_i; root ratios are unchanged.
inline IntPolynomial monic_scaled(const IntPolynomial& f) {
  const int n = f.degree();
  std::vector<BigInt> v(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k)
    v[static_cast<std::size_t>(k)] = f.coeff(static_cast<std::size_t>(k)) * pow(f.lead(), static_cast<unsigned>(n - 1 - std::min(k, n - 1)));
  v[static_cast<std::size_t>(n)] = 1;
  return IntPolynomial(std::move(v));
}

/// Remainder of a modulo a monic integer polynomial m.
inline std::vector<BigInt> reduce_monic(std::vector<BigInt> a, const IntPolynomial& m) {
  const std::size_t n = static_cast<std::size_t>(m.degree());
  for (std::size_t top = a.size(); top-- > n;) {
    const BigInt t = a[top];
    if (t == 0) continue;
    for (std::size_t j = 0; j <= n; ++j) a[top - n + j] -= t * m.coeffs()[j];
  }
  a.resize(n);
  return a;
}

inline std::vector<BigInt> mul_mod_monic(const std::vector<BigInt>& a, const std::vector<BigInt>& b,
                                         const IntPolynomial& m) {
  std::vector<BigInt> c(a.size() + b.size(), BigInt(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return reduce_monic(std::move(c), m);
}

/// Polynomial whose roots are the k-th powers of the roots of the monic
/// integer polynomial m: the characteristic polynomial of multiplication by
/// x^k on Z[x]/(m).
inline IntPolynomial powers_polynomial(const IntPolynomial& m, std::uint64_t k) {
  const int n = m.degree();
  std::vector<BigInt> result = reduce_monic({BigInt(1)}, m);
  std::vector<BigInt> base = reduce_monic({BigInt(0), BigInt(1)}, m);
  for (std::uint64_t e = k; e; e >>= 1) {
    if (e & 1) result = mul_mod_monic(result, base, m);
    if (e > 1) base = mul_mod_monic(base, base, m);
  }
  IntMatrix mult(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  std::vector<BigInt> column = result;
  for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) mult(i, j) = column[i];
    std::vector<BigInt> shifted(column.size() + 1, BigInt(0));
    for (std::size_t i = 0; i < column.size(); ++i) shifted[i + 1] = column[i];
    column = reduce_monic(std::move(shifted), m);
  }
  return characteristic_polynomial(mult);
}

}  // namespace detail

/// Number of conjugate pairs of roots of f on the unit circle (the complex
/// places with |θ|_v = 1 when f is irreducible). Roots ±1 are not counted.
/// Non-self-inversive input is reduced to gcd(f, reversal of f), which
/// carries every unit-circle root; for irreducible f that gcd is 1.
inline int unit_circle_root_pairs(const IntPolynomial& f) {
  if (f.is_zero() || f.constant_term() == 0) throw ContractError("unit_circle_root_pairs: zero constant term");
  if (f.degree() < 2) return 0;
  if (is_self_inversive(f)) return count_unit_circle_roots(f).conjugate_pairs;
  IntPolynomial h = gcd(f, f.reversed());
  if (h.degree() < 1) return 0;
  if (!is_self_inversive(h)) throw std::logic_error("gcd with the reversal is not self-inversive");
  return count_unit_circle_roots(h).conjugate_pairs;
}

/// True iff the irreducible polynomial f is a cyclotomic polynomial Φ_k.
inline bool is_cyclotomic(const IntPolynomial& f_in) {
  IntPolynomial f = f_in.lead() < 0 ? -f_in : f_in;
  if (f.degree() < 1) throw ContractError("is_cyclotomic: degree must be at least 1");
  if (f.lead() != 1 || abs(f.constant_term()) != 1) return false;
  if (!is_self_inversive(f)) return false;
  const UnitCircleCount uc = count_unit_circle_roots(f);
  const int on_circle = 2 * uc.conjugate_pairs + (uc.root_at_one ? 1 : 0) + (uc.root_at_minus_one ? 1 : 0);
  if (on_circle != f.degree()) return false;
  const auto n = static_cast<std::uint64_t>(f.degree());
  for (auto k : totient_preimages_upto(n))
    if (totient(k) == n && cyclotomic_poly(k) == f) return true;
  return false;
}

/// True iff some Φ_k with totient(k) <= deg f divides f.
inline bool has_cyclotomic_factor(const IntPolynomial& f) {
  const auto n = static_cast<std::uint64_t>(std::max(f.degree(), 1));
  for (auto k : totient_preimages_upto(n))
    if (totient(k) <= n && divide_exact(f, cyclotomic_poly(k))) return true;
  return false;
}

/// Result of the degeneracy test: the order k of a root-of-unity ratio
/// between two distinct roots, when one exists.
struct DegeneracyResult {
  bool degenerate = false;
  std::uint64_t order = 0;
};

/// Resultant route: D(y) = Res_x(f(x), f(x·y)) = lc^{2n}·prod_{i,j}(yθ_i - θ_j)
/// is interpolated from n^2+1 integer evaluations, the diagonal factor
/// (y-1)^n is divided out, and the quotient is tested against every Φ_k
/// with totient(k) <= n^2.
inline DegeneracyResult degeneracy_by_resultant(const IntPolynomial& f_in) {
  IntPolynomial f = f_in.lead() < 0 ? -f_in : f_in;
  const int n = f.degree();
  if (n < 2) return {};
  const std::size_t points = static_cast<std::size_t>(n * n + 1);
  std::vector<BigInt> xs, ys;
  for (std::size_t i = 0; i < points; ++i) {
    const BigInt y = BigInt(static_cast<long long>(i) + 2);
    xs.push_back(y);
    ys.push_back(resultant(f, f.scale_variable(y)));
  }
  IntPolynomial d = detail::rational_to_integer_exact(detail::interpolate(xs, ys));
  const IntPolynomial ym1{-1, 1};
  for (int i = 0; i < n; ++i) {
    auto q = divide_exact(d, ym1);
    if (!q) throw ContractError("is_degenerate: (y-1)^n does not divide D(y); input has repeated roots");
    d = std::move(*q);
  }
  for (auto k : detail::degeneracy_orders(n))
    if (divide_exact(d, cyclotomic_poly(k))) return {true, k};
  return {};
}

/// Graeffe-type route: for each maximal candidate order k, the polynomial
/// with roots θ_i^k is the characteristic polynomial of multiplication by
/// x^k in Z[x]/(F), F monic with roots lc(f)·θ_i; it is squarefree iff no
/// ratio of distinct roots has order dividing k.
inline DegeneracyResult degeneracy_by_graeffe(const IntPolynomial& f_in) {
  IntPolynomial f = f_in.lead() < 0 ? -f_in : f_in;
  const int n = f.degree();
  if (n < 2) return {};
  const IntPolynomial big = detail::monic_scaled(f);
  const auto orders = detail::degeneracy_orders(n);
  const std::set<std::uint64_t> order_set(orders.begin(), orders.end());
  const std::uint64_t kmax = orders.empty() ? 0 : orders.back();
  for (auto k : orders) {
    bool maximal = true;
    for (std::uint64_t mult = 2 * k; mult <= kmax; mult += k)
      if (order_set.count(mult)) {
        maximal = false;
        break;
      }
    if (!maximal) continue;
    if (!is_squarefree(detail::powers_polynomial(big, k))) {
      // smallest order overall, which need not divide k
      for (auto d : orders)
        if (!is_squarefree(detail::powers_polynomial(big, d))) return {true, d};
      return {true, k};
    }
  }
  return {};
}

/// True when two distinct roots of f have a root-of-unity ratio (so f is
/// not totally irreducible). Uses the resultant route.
inline bool is_degenerate(const IntPolynomial& f) {
  if (f.degree() < 2) return false;
  return degeneracy_by_resultant(f).degenerate;
}

/// Proper subgroup test for the rotation closure: with at least two central
/// places, independence holds for ergodic non-degenerate f.
inline bool multiplicative_independence(const IntPolynomial& f) {
  if (unit_circle_root_pairs(f) < 2) return true;
  return !is_cyclotomic(f) && !is_degenerate(f);
}

/// Decides the dynamical properties of the automorphism defined by f.
inline ClassificationReport classify(const IntPolynomial& f_in) {
  if (f_in.is_zero() || f_in.degree() < 1) throw ContractError("classify: degree must be at least 1");
  if (f_in.constant_term() == 0) throw ContractError("classify: zero constant term");
  if (f_in.content() != 1)
    throw ContractError("classify: polynomial is not primitive (content " + f_in.content().str() + ")");

  ClassificationReport r;
  IntPolynomial f = f_in;
  if (f.lead() < 0) {
    f = -f;
    r.notes.push_back("leading coefficient was negative; input negated");
  }
  r.input = f;
  const int n = f.degree();

  const IrreducibilityEvidence ev = irreducibility_evidence(f);
  r.irreducible = ev.irreducible;
  {
    std::string primes;
    for (auto p : ev.primes_used) primes += (primes.empty() ? "" : ",") + std::to_string(p);
    if (ev.irreducible && !ev.used_root_subset_search) {
      r.notes.push_back(n == 1 ? "irreducible: linear"
                               : "irreducible: factor-degree patterns modulo primes {" + primes + "} admit no proper factor");
    } else if (ev.irreducible) {
      r.notes.push_back("irreducible: no integral factor among root subsets of the surviving degrees");
    } else {
      r.notes.push_back("reducible: factor " + (ev.factor ? ev.factor->to_string() : std::string("?")));
    }
  }

  r.algebraic_unit = abs(f.constant_term()) == 1 && abs(f.lead()) == 1;
  r.finite_place_primes = detail::prime_divisors(f.constant_term() * f.lead());
  if (r.algebraic_unit)
    r.notes.push_back("algebraic unit: |f_0| = |f_n| = 1, phase space is a torus");
  else
    r.notes.push_back("not a unit: primes dividing f_0*f_n are the candidate finite places (solenoid case)");

  r.is_self_inversive = is_self_inversive(f);
  r.s0_count = unit_circle_root_pairs(f);
  r.central_real_dim = 2 * r.s0_count;
  bool real_unit_root = false;
  {
    const IntPolynomial h = r.is_self_inversive ? f : gcd(f, f.reversed());
    if (h.degree() >= 1) {
      const UnitCircleCount uc = count_unit_circle_roots(h);
      real_unit_root = uc.root_at_one || uc.root_at_minus_one;
    }
  }
  r.expansive = r.s0_count == 0 && !real_unit_root;
  if (!r.is_self_inversive) {
    if (r.irreducible && n >= 2)
      r.notes.push_back(
          "not self-inversive: an irreducible integer polynomial with a root of modulus 1 equals its reversal up to "
          "sign, so no root lies on the unit circle and s0_count = 0");
    else
      r.notes.push_back("not self-inversive: unit-circle roots counted on gcd(f, reversal)");
  } else {
    r.notes.push_back("self-inversive: unit-circle pairs counted by a Sturm chain of the reduced polynomial on (-2, 2)");
  }

  if (r.irreducible) {
    const bool cyclo = is_cyclotomic(f);
    r.ergodic = !cyclo;
    r.notes.push_back(cyclo ? "not ergodic: f is cyclotomic" : "ergodic: f is not cyclotomic");
    if (n >= 2) {
      const DegeneracyResult dg = degeneracy_by_resultant(f);
      r.totally_irreducible = !dg.degenerate;
      r.notes.push_back(dg.degenerate ? "degenerate: two roots have a ratio of order " + std::to_string(dg.order)
                                      : "totally irreducible: no root ratio is a root of unity");
    } else {
      r.totally_irreducible = true;
    }
  } else {
    r.ergodic = !has_cyclotomic_factor(f);
    r.totally_irreducible = false;
    r.notes.push_back("reducible input: ergodic means no cyclotomic factor; totally_irreducible is false");
  }

  const IntPolynomial sq = squarefree_part(f);
  const BigRational bound = detail::cauchy_bound(sq);
  r.real_place_count = sturm_count(sq, -bound, bound);
  r.complex_place_count = (sq.degree() - r.real_place_count) / 2;
  if (!r.irreducible) r.notes.push_back("place counts refer to the distinct roots of f (f is reducible)");
  return r;
}

inline ClassificationReport classify_matrix(const IntMatrix& a) {
  if (a.rows != a.cols || a.rows == 0) throw ContractError("classify_matrix: matrix is not square");
  return classify(characteristic_polynomial(a));
}

}  // namespace tordyn
