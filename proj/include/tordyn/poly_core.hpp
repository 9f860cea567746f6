// Exact univariate polynomial arithmetic over the integers and rationals:
// parsing, resultants, Sturm chains, self-inversive reduction, cyclotomic
// polynomials and an irreducibility decision procedure.
#pragma once

#include "tordyn/numeric.hpp"

#include <cctype>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tordyn {

class ParseError : public ContractError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : ContractError(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

namespace detail {
template <class T>
void trim_zeros(std::vector<T>& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}
}  // namespace detail

/// Polynomial with arbitrary-precision integer coefficients, index 0 being
/// the constant term. The coefficient vector never carries a zero leading
/// entry; the zero polynomial has an empty vector and degree -1.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  explicit IntPolynomial(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) {
    detail::trim_zeros(coeffs_);
  }
  IntPolynomial(std::initializer_list<long long> coeffs) {
    for (long long c : coeffs) coeffs_.emplace_back(c);
    detail::trim_zeros(coeffs_);
  }

  static IntPolynomial constant(const BigInt& c) { return IntPolynomial(std::vector<BigInt>{c}); }
  static IntPolynomial monomial(const BigInt& c, std::size_t k) {
    std::vector<BigInt> v(k + 1);
    v[k] = c;
    return IntPolynomial(std::move(v));
  }

  const std::vector<BigInt>& coeffs() const noexcept { return coeffs_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  BigInt coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : BigInt(0); }
  const BigInt& lead() const {
    if (coeffs_.empty()) throw ContractError("leading coefficient of the zero polynomial");
    return coeffs_.back();
  }
  BigInt constant_term() const { return coeff(0); }

  BigInt content() const {
    BigInt g = 0;
    for (const auto& c : coeffs_) g = gcd(g, c);
    return g;
  }
  /// Divides out the content and makes the leading coefficient positive.
  IntPolynomial primitive_part() const {
    if (is_zero()) return {};
    BigInt g = content();
    if (lead() < 0) g = -g;
    std::vector<BigInt> v = coeffs_;
    for (auto& c : v) c /= g;
    return IntPolynomial(std::move(v));
  }
  IntPolynomial derivative() const {
    std::vector<BigInt> v;
    for (std::size_t i = 1; i < coeffs_.size(); ++i) v.push_back(coeffs_[i] * static_cast<long long>(i));
    return IntPolynomial(std::move(v));
  }
  IntPolynomial reversed() const {
    std::vector<BigInt> v(coeffs_.rbegin(), coeffs_.rend());
    return IntPolynomial(std::move(v));
  }
  /// f(-u)
  IntPolynomial negate_variable() const {
    std::vector<BigInt> v = coeffs_;
    for (std::size_t i = 1; i < v.size(); i += 2) v[i] = -v[i];
    return IntPolynomial(std::move(v));
  }
  /// f(c·u)
  IntPolynomial scale_variable(const BigInt& c) const {
    std::vector<BigInt> v = coeffs_;
    BigInt p = 1;
    for (auto& x : v) {
      x *= p;
      p *= c;
    }
    return IntPolynomial(std::move(v));
  }

  template <class T>
  T eval(const T& x) const {
    T acc = T(0);
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + T(coeffs_[i]);
    return acc;
  }

  std::string to_string(char var = 'u') const;

  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

  IntPolynomial operator-() const {
    std::vector<BigInt> v = coeffs_;
    for (auto& c : v) c = -c;
    return IntPolynomial(std::move(v));
  }
  friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
    std::vector<BigInt> v(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) + b.coeff(i);
    return IntPolynomial(std::move(v));
  }
  friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) { return a + (-b); }
  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<BigInt> v(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return IntPolynomial(std::move(v));
  }
  friend IntPolynomial operator*(const BigInt& s, const IntPolynomial& a) {
    std::vector<BigInt> v = a.coeffs_;
    for (auto& c : v) c *= s;
    return IntPolynomial(std::move(v));
  }

 private:
  std::vector<BigInt> coeffs_;
};

inline std::string IntPolynomial::to_string(char var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = coeffs_.size(); i-- > 0;) {
    const BigInt& c = coeffs_[i];
    if (c == 0) continue;
    BigInt mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (i == 0 || mag != 1) os << mag;
    if (i >= 1) os << var;
    if (i >= 2) os << "^" << i;
    first = false;
  }
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const IntPolynomial& p) { return os << p.to_string(); }

/// Polynomial with rational coefficients (Boost rationals are kept in lowest
/// terms with positive denominators).
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<BigRational> coeffs) : coeffs_(std::move(coeffs)) {
    detail::trim_zeros(coeffs_);
  }
  explicit RationalPolynomial(const IntPolynomial& p) {
    for (const auto& c : p.coeffs()) coeffs_.emplace_back(c);
  }

  const std::vector<BigRational>& coeffs() const noexcept { return coeffs_; }
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  BigRational coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : BigRational(0); }
  const BigRational& lead() const {
    if (coeffs_.empty()) throw ContractError("leading coefficient of the zero polynomial");
    return coeffs_.back();
  }

  BigRational eval(const BigRational& x) const {
    BigRational acc = 0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
    return acc;
  }
  RationalPolynomial derivative() const {
    std::vector<BigRational> v;
    for (std::size_t i = 1; i < coeffs_.size(); ++i) v.push_back(coeffs_[i] * static_cast<long long>(i));
    return RationalPolynomial(std::move(v));
  }
  RationalPolynomial monic() const {
    if (is_zero()) return {};
    std::vector<BigRational> v = coeffs_;
    const BigRational l = lead();
    for (auto& c : v) c /= l;
    return RationalPolynomial(std::move(v));
  }
  /// Clears denominators and content; the result has positive leading coefficient.
  IntPolynomial to_primitive_integer() const {
    if (is_zero()) return {};
    BigInt den = 1;
    for (const auto& c : coeffs_) den = lcm(den, BigInt(mp::denominator(c)));
    std::vector<BigInt> v;
    for (const auto& c : coeffs_) v.push_back(mp::numerator(c) * (den / mp::denominator(c)));
    return IntPolynomial(std::move(v)).primitive_part();
  }

  friend bool operator==(const RationalPolynomial&, const RationalPolynomial&) = default;

  RationalPolynomial operator-() const {
    std::vector<BigRational> v = coeffs_;
    for (auto& c : v) c = -c;
    return RationalPolynomial(std::move(v));
  }
  friend RationalPolynomial operator+(const RationalPolynomial& a, const RationalPolynomial& b) {
    std::vector<BigRational> v(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) + b.coeff(i);
    return RationalPolynomial(std::move(v));
  }
  friend RationalPolynomial operator-(const RationalPolynomial& a, const RationalPolynomial& b) {
    return a + (-b);
  }
  friend RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<BigRational> v(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return RationalPolynomial(std::move(v));
  }

 private:
  std::vector<BigRational> coeffs_;
};

/// Euclidean division over the rationals: a = q·b + r with deg r < deg b.
inline std::pair<RationalPolynomial, RationalPolynomial> divmod(const RationalPolynomial& a,
                                                                const RationalPolynomial& b) {
  if (b.is_zero()) throw ContractError("polynomial division by zero");
  std::vector<BigRational> r = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) return {RationalPolynomial(), a};
  std::vector<BigRational> q(static_cast<std::size_t>(a.degree() - db + 1));
  const BigRational& lb = b.lead();
  for (int k = a.degree() - db; k >= 0; --k) {
    const BigRational factor = r[static_cast<std::size_t>(k + db)] / lb;
    q[static_cast<std::size_t>(k)] = factor;
    if (factor == 0) continue;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k + j)] -= factor * b.coeffs()[static_cast<std::size_t>(j)];
  }
  return {RationalPolynomial(std::move(q)), RationalPolynomial(std::move(r))};
}

/// Monic gcd over the rationals (zero if both inputs are zero).
inline RationalPolynomial gcd(RationalPolynomial a, RationalPolynomial b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Exact quotient a / b over the integers, or nullopt when b does not divide a
/// in Z[u].
inline std::optional<IntPolynomial> divide_exact(const IntPolynomial& a, const IntPolynomial& b) {
  if (b.is_zero()) throw ContractError("polynomial division by zero");
  if (a.is_zero()) return IntPolynomial();
  if (a.degree() < b.degree()) return std::nullopt;
  std::vector<BigInt> r = a.coeffs();
  const int db = b.degree();
  std::vector<BigInt> q(static_cast<std::size_t>(a.degree() - db + 1));
  const BigInt& lb = b.lead();
  for (int k = a.degree() - db; k >= 0; --k) {
    const BigInt& top = r[static_cast<std::size_t>(k + db)];
    if (top % lb != 0) return std::nullopt;
    const BigInt factor = top / lb;
    q[static_cast<std::size_t>(k)] = factor;
    if (factor == 0) continue;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k + j)] -= factor * b.coeffs()[static_cast<std::size_t>(j)];
  }
  for (const auto& c : r)
    if (c != 0) return std::nullopt;
  return IntPolynomial(std::move(q));
}

/// Pseudo-remainder: lc(b)^(deg a - deg b + 1)·a mod b, computed over Z.
inline IntPolynomial pseudo_remainder(const IntPolynomial& a, const IntPolynomial& b) {
  if (b.is_zero()) throw ContractError("pseudo-remainder by zero");
  if (a.degree() < b.degree()) return a;
  std::vector<BigInt> r = a.coeffs();
  const int db = b.degree();
  const BigInt& lb = b.lead();
  for (int top = a.degree(); top >= db; --top) {
    const BigInt t = r[static_cast<std::size_t>(top)];
    for (auto& c : r) c *= lb;
    if (t == 0) continue;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(top - db + j)] -= t * b.coeffs()[static_cast<std::size_t>(j)];
  }
  return IntPolynomial(std::move(r));
}

/// Primitive gcd over Z (positive leading coefficient).
inline IntPolynomial gcd(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.is_zero()) return b.primitive_part();
  if (b.is_zero()) return a.primitive_part();
  RationalPolynomial g = gcd(RationalPolynomial(a), RationalPolynomial(b));
  return g.to_primitive_integer();
}

/// Resultant of p and q with the Sylvester-matrix convention
/// Res(p, q) = lc(p)^deg q · prod q(roots of p), so Res(u-2, u-3) = -1.
/// Computed by the subresultant pseudo-remainder sequence.
inline BigInt resultant(IntPolynomial a, IntPolynomial b) {
  if (a.is_zero() || b.is_zero()) throw ContractError("resultant of a zero polynomial");
  if (a.degree() == 0) return pow(a.lead(), static_cast<unsigned>(b.degree()));
  if (b.degree() == 0) return pow(b.lead(), static_cast<unsigned>(a.degree()));

  BigInt ca = a.content(), cb = b.content();
  if (a.lead() < 0) ca = -ca;
  if (b.lead() < 0) cb = -cb;
  a = divide_exact(a, IntPolynomial::constant(ca)).value();
  b = divide_exact(b, IntPolynomial::constant(cb)).value();
  BigInt t = pow(ca, static_cast<unsigned>(b.degree())) * pow(cb, static_cast<unsigned>(a.degree()));
  int sign = 1;
  if (a.degree() < b.degree()) {
    std::swap(a, b);
    if ((a.degree() % 2 == 1) && (b.degree() % 2 == 1)) sign = -1;
  }
  BigInt g = 1, h = 1;
  for (;;) {
    const int delta = a.degree() - b.degree();
    if ((a.degree() % 2 == 1) && (b.degree() % 2 == 1)) sign = -sign;
    IntPolynomial r = pseudo_remainder(a, b);
    a = b;
    if (r.is_zero()) return 0;
    const BigInt divisor = g * pow(h, static_cast<unsigned>(delta));
    b = divide_exact(r, IntPolynomial::constant(divisor)).value();
    g = a.lead();
    if (delta == 0) {
      // h unchanged
    } else if (delta == 1) {
      h = g;
    } else {
      h = pow(g, static_cast<unsigned>(delta)) / pow(h, static_cast<unsigned>(delta - 1));
    }
    if (b.degree() <= 0) break;
  }
  // b is a nonzero constant here.
  const int da = a.degree();
  BigInt hh;
  if (da == 0) {
    hh = h;
  } else if (da == 1) {
    hh = b.lead();
  } else {
    hh = pow(b.lead(), static_cast<unsigned>(da)) / pow(h, static_cast<unsigned>(da - 1));
  }
  return sign * t * hh;
}

/// True iff gcd(p, p') is constant, i.e. Res(p, p') != 0.
inline bool is_squarefree(const IntPolynomial& p) {
  if (p.is_zero()) throw ContractError("squarefree test of the zero polynomial");
  if (p.degree() <= 1) return true;
  return resultant(p, p.derivative()) != 0;
}

inline IntPolynomial squarefree_part(const IntPolynomial& p) {
  if (p.degree() <= 1) return p.primitive_part();
  IntPolynomial g = gcd(p, p.derivative());
  return divide_exact(p.primitive_part(), g).value().primitive_part();
}

/// Sturm chain of a polynomial: chain[0] = p, chain[1] = p', and each later
/// entry the negated remainder of the two before it.
struct SturmChain {
  IntPolynomial source;
  std::vector<RationalPolynomial> chain;

  explicit SturmChain(const IntPolynomial& p) : source(p) {
    if (p.is_zero()) throw ContractError("Sturm chain of the zero polynomial");
    chain.emplace_back(p);
    if (p.degree() == 0) return;
    chain.push_back(chain[0].derivative());
    while (chain.back().degree() > 0) {
      RationalPolynomial r = divmod(chain[chain.size() - 2], chain.back()).second;
      if (r.is_zero()) break;
      chain.push_back(-r);
    }
  }

  /// Sign variations of the chain at x, zeros skipped.
  int variations(const BigRational& x) const {
    int count = 0, last = 0;
    for (const auto& q : chain) {
      const BigRational v = q.eval(x);
      const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  }
};

/// Number of distinct real roots of p in (lo, hi]. p must be squarefree
/// unless `reduce_to_squarefree` is set, in which case p / gcd(p, p') is used.
inline int sturm_count(const IntPolynomial& p, const BigRational& lo, const BigRational& hi,
                       bool reduce_to_squarefree = false) {
  if (p.is_zero()) throw ContractError("sturm_count: zero polynomial");
  if (!(lo < hi)) throw ContractError("sturm_count: empty interval");
  IntPolynomial q = p;
  if (!is_squarefree(p)) {
    if (!reduce_to_squarefree) throw ContractError("sturm_count: polynomial is not squarefree");
    q = squarefree_part(p);
  }
  SturmChain sc(q);
  return sc.variations(lo) - sc.variations(hi);
}

/// True iff the coefficient reversal of f equals ±f.
inline bool is_self_inversive(const IntPolynomial& f) {
  if (f.is_zero() || f.constant_term() == 0)
    throw ContractError("is_self_inversive: zero constant term");
  const IntPolynomial r = f.reversed();
  return r == f || r == -f;
}

/// For a palindromic f of degree 2m returns g of degree m with
/// f(u) = u^m·g(u + 1/u).
inline IntPolynomial chebyshev_reduce(const IntPolynomial& f) {
  if (f.is_zero() || f.constant_term() == 0) throw ContractError("chebyshev_reduce: zero constant term");
  if (f.degree() % 2 != 0) throw ContractError("chebyshev_reduce: odd degree");
  const IntPolynomial r = f.reversed();
  if (r != f) {
    if (r == -f) throw ContractError("chebyshev_reduce: anti-palindromic input (remove factors u-1, u+1 first)");
    throw ContractError("chebyshev_reduce: input is not self-inversive");
  }
  const std::size_t m = static_cast<std::size_t>(f.degree() / 2);
  // D_0 = 2, D_1 = t, D_{j+1} = t·D_j - D_{j-1}; u^j + u^-j = D_j(u + 1/u).
  IntPolynomial t{0, 1};
  IntPolynomial prev = IntPolynomial{2};
  IntPolynomial cur = t;
  IntPolynomial g = IntPolynomial::constant(f.coeff(m));
  for (std::size_t j = 1; j <= m; ++j) {
    g = g + f.coeff(m + j) * cur;
    IntPolynomial next = t * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return g;
}

/// Inverse of chebyshev_reduce: expands u^m·g(u + 1/u).
inline IntPolynomial chebyshev_expand(const IntPolynomial& g) {
  if (g.is_zero()) return {};
  const std::size_t m = static_cast<std::size_t>(g.degree());
  // u^m·(u + 1/u)^j = u^(m-j)·(u^2 + 1)^j
  IntPolynomial acc;
  IntPolynomial power{1};
  const IntPolynomial u2p1{1, 0, 1};
  for (std::size_t j = 0; j <= m; ++j) {
    acc = acc + g.coeff(j) * (power * IntPolynomial::monomial(1, m - j));
    power = power * u2p1;
  }
  return acc;
}

/// Result of dividing the forced real factors out of a self-inversive
/// polynomial: f = (u-1)^a (u+1)^b · core with core palindromic of even
/// degree.
struct SelfInversiveSplit {
  IntPolynomial core;
  int multiplicity_at_one = 0;
  int multiplicity_at_minus_one = 0;
};

inline SelfInversiveSplit split_unit_real_factors(IntPolynomial f) {
  SelfInversiveSplit out;
  const IntPolynomial um1{-1, 1}, up1{1, 1};
  while (f.degree() >= 1 && f.eval(BigInt(1)) == 0) {
    f = divide_exact(f, um1).value();
    ++out.multiplicity_at_one;
  }
  while (f.degree() >= 1 && f.eval(BigInt(-1)) == 0) {
    f = divide_exact(f, up1).value();
    ++out.multiplicity_at_minus_one;
  }
  out.core = std::move(f);
  return out;
}

/// Number of distinct roots of an arbitrary self-inversive f on the unit
/// circle, counted as: conjugate pairs (non-real) plus the real roots ±1.
struct UnitCircleCount {
  int conjugate_pairs = 0;
  bool root_at_one = false;
  bool root_at_minus_one = false;
};

inline UnitCircleCount count_unit_circle_roots(const IntPolynomial& f) {
  if (!is_self_inversive(f)) throw ContractError("count_unit_circle_roots: not self-inversive");
  SelfInversiveSplit split = split_unit_real_factors(f);
  UnitCircleCount out;
  out.root_at_one = split.multiplicity_at_one > 0;
  out.root_at_minus_one = split.multiplicity_at_minus_one > 0;
  if (split.core.degree() <= 0) return out;
  const IntPolynomial core = split.core.lead() < 0 ? -split.core : split.core;
  // core is palindromic of even degree with no roots at ±1.
  IntPolynomial g = chebyshev_reduce(core);
  out.conjugate_pairs = sturm_count(g, BigRational(-2), BigRational(2), /*reduce_to_squarefree=*/true);
  return out;
}

inline std::uint64_t totient(std::uint64_t k) {
  std::uint64_t result = k;
  for (std::uint64_t p = 2; p * p <= k; ++p) {
    if (k % p != 0) continue;
    while (k % p == 0) k /= p;
    result -= result / p;
  }
  if (k > 1) result -= result / k;
  return result;
}

/// All k >= 1 with totient(k) <= bound, ascending. Uses totient(k) >= sqrt(k/2).
inline std::vector<std::uint64_t> totient_preimages_upto(std::uint64_t bound) {
  const std::uint64_t kmax = 2 * bound * bound + 2;
  std::vector<std::uint64_t> phi(kmax + 1);
  std::iota(phi.begin(), phi.end(), std::uint64_t{0});
  for (std::uint64_t p = 2; p <= kmax; ++p) {
    if (phi[p] != p) continue;
    for (std::uint64_t m = p; m <= kmax; m += p) phi[m] -= phi[m] / p;
  }
  std::vector<std::uint64_t> out;
  for (std::uint64_t k = 1; k <= kmax; ++k)
    if (phi[k] <= bound) out.push_back(k);
  return out;
}

/// The k-th cyclotomic polynomial, by dividing u^k - 1 by Φ_d for every
/// proper divisor d of k.
inline IntPolynomial cyclotomic_poly(std::uint64_t k) {
  if (k == 0) throw ContractError("cyclotomic_poly: k must be positive");
  std::vector<std::uint64_t> divisors;
  for (std::uint64_t d = 1; d <= k; ++d)
    if (k % d == 0) divisors.push_back(d);
  std::map<std::uint64_t, IntPolynomial> table;
  for (std::uint64_t d : divisors) {
    IntPolynomial p = IntPolynomial::monomial(1, d) - IntPolynomial{1};
    for (std::uint64_t e : divisors) {
      if (e >= d) break;
      if (d % e == 0) p = divide_exact(p, table.at(e)).value();
    }
    table.emplace(d, std::move(p));
  }
  return table.at(k);
}

namespace modp {

using Poly = std::vector<std::uint64_t>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

inline std::uint64_t inv(std::uint64_t a, std::uint64_t p) { return powmod(a, p - 2, p); }

inline Poly reduce(const IntPolynomial& f, std::uint64_t p) {
  Poly out;
  const BigInt bp = p;
  for (const auto& c : f.coeffs()) {
    BigInt r = c % bp;
    if (r < 0) r += bp;
    out.push_back(r.convert_to<std::uint64_t>());
  }
  trim(out);
  return out;
}

inline Poly mod(Poly a, const Poly& b, std::uint64_t p) {
  const std::size_t db = b.size() - 1;
  const std::uint64_t il = inv(b.back(), p);
  while (!a.empty() && a.size() >= b.size()) {
    const std::uint64_t factor = mulmod(a.back(), il, p);
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t j = 0; j <= db; ++j)
      a[shift + j] = (a[shift + j] + p - mulmod(factor, b[j], p)) % p;
    trim(a);
  }
  return a;
}

inline Poly div(Poly a, const Poly& b, std::uint64_t p) {
  if (a.size() < b.size()) return {};
  const std::size_t db = b.size() - 1;
  const std::uint64_t il = inv(b.back(), p);
  Poly q(a.size() - db, 0);
  for (std::size_t k = a.size() - b.size() + 1; k-- > 0;) {
    const std::uint64_t factor = mulmod(a[k + db], il, p);
    q[k] = factor;
    for (std::size_t j = 0; j <= db; ++j) a[k + j] = (a[k + j] + p - mulmod(factor, b[j], p)) % p;
  }
  trim(q);
  return q;
}

inline Poly mul(const Poly& a, const Poly& b, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + mulmod(a[i], b[j], p)) % p;
  trim(c);
  return c;
}

inline Poly gcd(Poly a, Poly b, std::uint64_t p) {
  while (!b.empty()) {
    Poly r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const std::uint64_t il = inv(a.back(), p);
    for (auto& c : a) c = mulmod(c, il, p);
  }
  return a;
}

inline Poly derivative(const Poly& a, std::uint64_t p) {
  Poly d;
  for (std::size_t i = 1; i < a.size(); ++i) d.push_back(mulmod(a[i], i % p, p));
  trim(d);
  return d;
}

inline Poly powmod_poly(Poly base, std::uint64_t e, const Poly& m, std::uint64_t p) {
  Poly r{1};
  base = mod(base, m, p);
  while (e) {
    if (e & 1) r = mod(mul(r, base, p), m, p);
    base = mod(mul(base, base, p), m, p);
    e >>= 1;
  }
  return r;
}

/// Degrees of the irreducible factors of a squarefree f over F_p
/// (distinct-degree factorization).
inline std::vector<int> factor_degrees(Poly f, std::uint64_t p) {
  std::vector<int> degrees;
  Poly h{0, 1};
  for (int d = 1; 2 * d <= static_cast<int>(f.size()) - 1; ++d) {
    h = powmod_poly(h, p, f, p);
    Poly hx = h;
    if (hx.size() < 2) hx.resize(2, 0);
    hx[1] = (hx[1] + p - 1) % p;
    trim(hx);
    Poly g = gcd(f, hx, p);
    const int gd = static_cast<int>(g.size()) - 1;
    if (gd > 0) {
      for (int i = 0; i < gd / d; ++i) degrees.push_back(d);
      f = div(f, g, p);
      h = mod(h, f, p);
    }
  }
  if (f.size() > 1) degrees.push_back(static_cast<int>(f.size()) - 1);
  return degrees;
}

}  // namespace modp

/// Subset sums of a factor-degree multiset restricted to [1, n-1].
inline std::set<int> possible_factor_degrees(const std::vector<int>& degrees, int n) {
  std::vector<bool> reach(static_cast<std::size_t>(n + 1), false);
  reach[0] = true;
  for (int d : degrees)
    for (int s = n; s >= d; --s)
      if (reach[static_cast<std::size_t>(s - d)]) reach[static_cast<std::size_t>(s)] = true;
  std::set<int> out;
  for (int s = 1; s < n; ++s)
    if (reach[static_cast<std::size_t>(s)]) out.insert(s);
  return out;
}

inline constexpr int kIrreducibilityDegreeLimit = 16;

/// Evidence gathered by the irreducibility decision.
struct IrreducibilityEvidence {
  bool irreducible = false;
  std::vector<std::uint64_t> primes_used;
  std::set<int> surviving_degrees;  // factor degrees not excluded modulo the primes
  bool used_root_subset_search = false;
  std::optional<IntPolynomial> factor;  // a nontrivial factor when reducible
};

/// Decides irreducibility over Z of a primitive polynomial of degree <= 16.
/// Factor-degree patterns modulo several primes are intersected first; if a
/// degree survives, candidate factors lc(f)·prod(u - r_i) over conjugation-
/// closed subsets of numerically isolated roots are rounded to Z[u] and
/// checked by exact division.
inline IrreducibilityEvidence irreducibility_evidence(const IntPolynomial& f) {
  if (f.is_zero() || f.degree() < 1) throw ContractError("is_irreducible: degree must be at least 1");
  const BigInt c = f.content();
  if (c != 1) throw ContractError("is_irreducible: polynomial is not primitive (content " + c.str() + ")");
  if (f.degree() > kIrreducibilityDegreeLimit)
    throw ContractError("is_irreducible: degree " + std::to_string(f.degree()) + " exceeds the supported limit of 16");

  IrreducibilityEvidence ev;
  const int n = f.degree();
  if (n == 1) {
    ev.irreducible = true;
    return ev;
  }
  if (f.constant_term() == 0) {
    ev.factor = IntPolynomial{0, 1};
    return ev;
  }
  if (!is_squarefree(f)) {
    ev.factor = gcd(f, f.derivative());
    return ev;
  }

  std::set<int> surviving;
  for (int s = 1; s < n; ++s) surviving.insert(s);
  static constexpr std::uint64_t kPrimes[] = {3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,  41,  43,  47,
                                              53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109};
  int used = 0;
  for (std::uint64_t p : kPrimes) {
    if (used >= 10 || surviving.empty()) break;
    if (f.lead() % p == 0) continue;
    modp::Poly fp = modp::reduce(f, p);
    modp::Poly g = modp::gcd(fp, modp::derivative(fp, p), p);
    if (g.size() > 1) continue;  // not squarefree mod p
    const auto degs = modp::factor_degrees(fp, p);
    const auto possible = possible_factor_degrees(degs, n);
    std::set<int> next;
    std::set_intersection(surviving.begin(), surviving.end(), possible.begin(), possible.end(),
                          std::inserter(next, next.begin()));
    surviving = std::move(next);
    ev.primes_used.push_back(p);
    ++used;
  }
  ev.surviving_degrees = surviving;
  if (surviving.empty()) {
    ev.irreducible = true;
    return ev;
  }

  ev.used_root_subset_search = true;
  const auto roots = polynomial_roots(f.coeffs());
  const HighFloat lead = HighFloat(f.lead());
  const HighFloat tol = pow2(-60);
  // Mignotte: every coefficient of a factor of degree d is bounded by
  // C(d, j)·||f||_2 times the leading coefficient ratio.
  HighFloat norm2 = 0;
  for (const auto& cf : f.coeffs()) norm2 += HighFloat(cf) * HighFloat(cf);
  norm2 = sqrt(norm2);

  std::vector<int> degrees_to_try;
  for (int d : surviving)
    if (2 * d <= n) degrees_to_try.push_back(d);

  std::vector<int> idx;
  std::optional<IntPolynomial> found;
  const auto try_subset = [&](const std::vector<int>& subset) -> bool {
    // conjugation closure check: imaginary parts sum to zero is necessary
    std::vector<HighComplex> prod{HighComplex(lead)};
    for (int i : subset) {
      std::vector<HighComplex> next(prod.size() + 1, HighComplex(0));
      for (std::size_t k = 0; k < prod.size(); ++k) {
        next[k + 1] += prod[k];
        next[k] -= prod[k] * roots[static_cast<std::size_t>(i)];
      }
      prod = std::move(next);
    }
    std::vector<BigInt> coeffs;
    const HighFloat bound = lead * norm2 * pow2(static_cast<int>(subset.size())) + 1;
    for (const auto& z : prod) {
      if (abs(z.imag()) > tol * (1 + abs(z.real()))) return false;
      if (abs(z.real()) > bound) return false;
      HighFloat r = round(z.real());
      if (abs(z.real() - r) > tol * (1 + abs(r))) return false;
      coeffs.push_back(r.convert_to<BigInt>());
    }
    IntPolynomial cand = IntPolynomial(std::move(coeffs)).primitive_part();
    if (cand.degree() < 1 || cand.degree() >= n) return false;
    if (divide_exact(f, cand)) {
      found = cand;
      return true;
    }
    return false;
  };

  for (int d : degrees_to_try) {
    // enumerate d-subsets of root indices
    std::vector<int> subset(static_cast<std::size_t>(d));
    std::iota(subset.begin(), subset.end(), 0);
    for (;;) {
      if (try_subset(subset)) break;
      int i = d - 1;
      while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - d + i) --i;
      if (i < 0) break;
      ++subset[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < d; ++j) subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
    if (found) break;
  }
  if (found) {
    ev.factor = found;
  } else {
    ev.irreducible = true;
  }
  return ev;
}

inline bool is_irreducible(const IntPolynomial& f) { return irreducibility_evidence(f).irreducible; }

/// Parses a sum of monomials `c*u^k` (variable `u` or `x`, `*` optional,
/// integer coefficients) into a coefficient vector.
inline IntPolynomial poly_parse(std::string_view text) {
  std::size_t pos = 0;
  const auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  const auto read_digits = [&](std::string& out) {
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) out.push_back(text[pos++]);
  };

  std::map<std::size_t, BigInt> terms;
  char variable = 0;
  bool any_term = false;
  skip_ws();
  if (pos == text.size()) throw ParseError("empty polynomial", pos);
  while (pos < text.size()) {
    int sign = 1;
    bool had_sign = false;
    skip_ws();
    while (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      if (text[pos] == '-') sign = -sign;
      had_sign = true;
      ++pos;
      skip_ws();
    }
    if (any_term && !had_sign) throw ParseError("expected '+' or '-'", pos);
    if (pos == text.size()) throw ParseError("dangling sign", pos);

    BigInt coefficient = 1;
    bool has_coefficient = false;
    std::string digits;
    read_digits(digits);
    if (!digits.empty()) {
      coefficient = BigInt(digits);
      has_coefficient = true;
      if (pos < text.size() && (text[pos] == '.' || text[pos] == '/' || text[pos] == 'e' || text[pos] == 'E'))
        throw ParseError("non-integer coefficient", pos);
    }
    skip_ws();
    std::size_t exponent = 0;
    bool has_variable = false;
    if (pos < text.size() && text[pos] == '*') {
      if (!has_coefficient) throw ParseError("'*' without a coefficient", pos);
      ++pos;
      skip_ws();
      if (pos == text.size() || (text[pos] != 'u' && text[pos] != 'x'))
        throw ParseError("expected variable after '*'", pos);
    }
    if (pos < text.size() && (text[pos] == 'u' || text[pos] == 'x')) {
      if (variable != 0 && variable != text[pos]) throw ParseError("mixed variable names", pos);
      variable = text[pos];
      has_variable = true;
      ++pos;
      exponent = 1;
      skip_ws();
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        skip_ws();
        std::string e;
        if (pos < text.size() && text[pos] == '-') throw ParseError("negative exponent", pos);
        read_digits(e);
        if (e.empty()) throw ParseError("expected exponent", pos);
        if (e.size() > 6) throw ParseError("exponent too large", pos);
        exponent = static_cast<std::size_t>(std::stoul(e));
      }
    }
    if (!has_coefficient && !has_variable) {
      throw ParseError(std::string("unexpected character '") + (pos < text.size() ? text[pos] : '?') + "'", pos);
    }
    terms[exponent] += sign * coefficient;
    any_term = true;
    skip_ws();
    if (pos < text.size() && text[pos] != '+' && text[pos] != '-') {
      if (text[pos] == '.' || text[pos] == '/') throw ParseError("non-integer coefficient", pos);
      throw ParseError(std::string("unexpected character '") + text[pos] + "'", pos);
    }
  }
  std::size_t deg = terms.empty() ? 0 : terms.rbegin()->first;
  std::vector<BigInt> coeffs(deg + 1);
  for (const auto& [e, c] : terms) coeffs[e] += c;
  return IntPolynomial(std::move(coeffs));
}

}  // namespace tordyn
