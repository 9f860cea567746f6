// The automorphism α on T^n: exact orbits, central-leaf translations,
// R-separated subsets of W0 and truncated inverse-orbit unions.
#pragma once

#include "tordyn/embedding.hpp"
#include "tordyn/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace tordyn {

struct TorusPoint {
  std::vector<double> coords;

  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> c) : coords(std::move(c)) {
    for (auto& x : coords) {
      x -= std::floor(x);
      if (x >= 1.0) x = 0.0;
    }
  }
  std::size_t dim() const { return coords.size(); }
  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
};

/// Exact rational point of T^n, coordinates in [0, 1).
struct RationalTorusPoint {
  std::vector<BigRational> coords;

  RationalTorusPoint() = default;
  explicit RationalTorusPoint(std::vector<BigRational> c) : coords(std::move(c)) {
    for (auto& x : coords) {
      BigInt fl = mp::numerator(x) / mp::denominator(x);
      if (x < 0 && fl * mp::denominator(x) != mp::numerator(x)) fl -= 1;
      x -= BigRational(fl);
    }
  }
  friend bool operator==(const RationalTorusPoint&, const RationalTorusPoint&) = default;
};

/// Signed distance to the nearest integer, coordinatewise, in [-1/2, 1/2).
inline std::vector<double> torus_difference(const TorusPoint& a, const TorusPoint& b) {
  if (a.dim() != b.dim()) throw ContractError("torus_difference: dimension mismatch");
  std::vector<double> d(a.dim());
  for (std::size_t i = 0; i < d.size(); ++i) {
    double v = a.coords[i] - b.coords[i];
    v -= std::floor(v + 0.5);
    d[i] = v;
  }
  return d;
}

/// Euclidean distance on T^n.
inline double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  double s = 0;
  for (double v : torus_difference(a, b)) s += v * v;
  return std::sqrt(s);
}

/// Inverse of an integer matrix with determinant ±1.
inline IntMatrix integer_inverse(const IntMatrix& a) {
  const std::size_t n = a.rows;
  DenseMatrix<BigRational> q(n, n);
  for (std::size_t i = 0; i < a.data.size(); ++i) q.data[i] = BigRational(a.data[i]);
  const DenseMatrix<BigRational> inv = inverse(q);
  IntMatrix out(n, n);
  for (std::size_t i = 0; i < inv.data.size(); ++i) {
    if (mp::denominator(inv.data[i]) != 1) throw ContractError("integer_inverse: determinant is not ±1");
    out.data[i] = mp::numerator(inv.data[i]);
  }
  return out;
}

inline BigInt mod_positive(const BigInt& v, const BigInt& m) {
  BigInt r = v % m;
  if (r < 0) r += m;
  return r;
}

/// a^e with entries reduced modulo `mod`.
inline IntMatrix matrix_power_mod(const IntMatrix& a, std::uint64_t e, const BigInt& mod) {
  IntMatrix result = IntMatrix::identity(a.rows);
  IntMatrix base = a;
  for (auto& v : base.data) v = mod_positive(v, mod);
  for (auto& v : result.data) v = mod_positive(v, mod);
  auto reduce = [&](IntMatrix m) {
    for (auto& v : m.data) v = mod_positive(v, mod);
    return m;
  };
  while (e) {
    if (e & 1) result = reduce(result * base);
    e >>= 1;
    if (e) base = reduce(base * base);
  }
  return result;
}

inline constexpr long long kMaxAlphaPower = 1LL << 20;

namespace detail {

inline const IntMatrix& power_base(const CentralFrame& fr, long long m, IntMatrix& inv_store) {
  if (m >= 0) return fr.A;
  inv_store = integer_inverse(fr.A);
  return inv_store;
}

inline BigInt lcm_big(const BigInt& a, const BigInt& b) { return a / gcd(a, b) * b; }

}  // namespace detail

/// α^m on rational points: (A^m mod q)·x mod 1 with q the common
/// denominator, so the result is exact for every m.
inline RationalTorusPoint apply_alpha(const CentralFrame& fr, const RationalTorusPoint& x, long long m) {
  if (static_cast<int>(x.coords.size()) != fr.n()) throw ContractError("apply_alpha: dimension mismatch");
  if (m > kMaxAlphaPower || m < -kMaxAlphaPower) throw ContractError("apply_alpha: |m| exceeds 2^20");
  BigInt q = 1;
  for (const auto& c : x.coords) q = detail::lcm_big(q, mp::denominator(c));
  IntMatrix inv;
  const IntMatrix& base = detail::power_base(fr, m, inv);
  const IntMatrix p = matrix_power_mod(base, static_cast<std::uint64_t>(m < 0 ? -m : m), q);
  std::vector<BigInt> k;
  for (const auto& c : x.coords) k.push_back(mp::numerator(c) * (q / mp::denominator(c)));
  std::vector<BigRational> out;
  for (std::size_t i = 0; i < p.rows; ++i) {
    BigInt acc = 0;
    for (std::size_t j = 0; j < p.cols; ++j) acc += p(i, j) * k[j];
    out.emplace_back(mod_positive(acc, q), q);
  }
  return RationalTorusPoint(std::move(out));
}

/// α^m on double points. Each double is an exact dyadic rational, so the
/// orbit is computed exactly and rounded once to double at the end.
inline TorusPoint apply_alpha(const CentralFrame& fr, const TorusPoint& x, long long m) {
  std::vector<BigRational> r;
  for (double c : x.coords) {
    int e = 0;
    const double mant = std::frexp(c, &e);
    const auto k = static_cast<long long>(std::ldexp(mant, 53));
    BigRational v(k);
    const int shift = 53 - e;
    if (shift >= 0) v /= BigRational(BigInt(1) << shift); else v *= BigRational(BigInt(1) << -shift);
    r.push_back(v);
  }
  const RationalTorusPoint y = apply_alpha(fr, RationalTorusPoint(std::move(r)), m);
  std::vector<double> out;
  for (const auto& c : y.coords) out.push_back(c.convert_to<double>());
  return TorusPoint(std::move(out));
}

/// 64-bit fixed-point torus point: coordinate i is c[i] / 2^64. Integer
/// matrices act exactly on it through wrapping uint64 arithmetic.
struct FixedTorusPoint {
  std::vector<std::uint64_t> c;
};

inline FixedTorusPoint to_fixed(const TorusPoint& x) {
  FixedTorusPoint f;
  for (double v : x.coords) f.c.push_back(static_cast<std::uint64_t>(std::ldexp(v, 64) < 0x1.0p64 ? std::ldexp(v, 64) : 0.0));
  return f;
}

inline double fixed_coord(std::uint64_t v) { return static_cast<double>(v >> 11) * 0x1.0p-53; }

inline TorusPoint from_fixed(const FixedTorusPoint& f) {
  std::vector<double> out;
  for (auto v : f.c) out.push_back(fixed_coord(v));
  return TorusPoint(std::move(out));
}

/// Integer matrix reduced modulo 2^64.
struct WrapMatrix {
  std::size_t n = 0;
  std::vector<std::uint64_t> m;

  static WrapMatrix from(const IntMatrix& a) {
    WrapMatrix w;
    w.n = a.rows;
    const BigInt mod = BigInt(1) << 64;
    for (const auto& v : a.data) w.m.push_back(static_cast<std::uint64_t>(mod_positive(v, mod)));
    return w;
  }
  void apply(const std::vector<std::uint64_t>& x, std::vector<std::uint64_t>& y) const {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t acc = 0;
      for (std::size_t j = 0; j < n; ++j) acc += m[i * n + j] * x[j];
      y[i] = acc;
    }
  }
};

/// x + π(w), reduced mod 1.
inline TorusPoint leaf_point(const CentralFrame& fr, const TorusPoint& x, const CVector& w) {
  if (static_cast<int>(x.dim()) != fr.n()) throw ContractError("leaf_point: dimension mismatch");
  const auto l = lift(fr, w);
  std::vector<double> out(x.coords);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += l[i];
  return TorusPoint(std::move(out));
}

struct SeparatedSet {
  std::vector<CVector> points;
  double R = 0;

  /// Exhaustive pairwise check of the frame-norm separation, up to rounding
  /// of the lattice products R*i.
  bool verify() const {
    const double floor_R = R * (1 - 1e-12);
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        double d = 0;
        for (std::size_t v = 0; v < points[i].size(); ++v) d = std::max(d, std::abs(points[i][v] - points[j][v]));
        if (d < floor_R) return false;
      }
    return true;
  }
};

enum class SeparationStrategy { grid, greedy_random };

inline SeparationStrategy parse_strategy(const std::string& s) {
  if (s == "grid") return SeparationStrategy::grid;
  if (s == "greedy-random" || s == "greedy_random") return SeparationStrategy::greedy_random;
  throw ContractError("unknown separation strategy '" + s + "'");
}

/// K points of W0 pairwise at least R apart in the frame norm.
/// Grid: the lattice R·Z^{2s} enumerated in a cube, first real coordinate
/// fastest. Greedy-random: uniform proposals in a box, violators rejected.
inline SeparatedSet make_separated(int s, double R, std::size_t K, SeparationStrategy strategy, std::uint64_t seed,
                                   std::size_t iteration_budget = 0) {
  if (!(R > 0)) throw ContractError("make_separated: R must be positive");
  if (K < 1) throw ContractError("make_separated: K must be at least 1");
  if (s < 1) throw ContractError("make_separated: s must be at least 1");
  SeparatedSet out;
  out.R = R;
  const int d = 2 * s;
  std::size_t side = 1;
  while (std::pow(static_cast<double>(side), d) < static_cast<double>(K)) ++side;
  if (strategy == SeparationStrategy::grid) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    while (out.points.size() < K) {
      CVector w(static_cast<std::size_t>(s));
      for (int v = 0; v < s; ++v) w[v] = {R * double(idx[2 * v]), R * double(idx[2 * v + 1])};
      out.points.push_back(w);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (++idx[k] < side) break;
        idx[k] = 0;
      }
    }
  } else {
    Rng rng(seed, "torus_dynamics.make_separated");
    const double box = 2.0 * R * static_cast<double>(side);
    const std::size_t budget = iteration_budget ? iteration_budget : 1000 * K + 1000;
    std::size_t it = 0;
    while (out.points.size() < K) {
      if (++it > budget)
        throw BudgetError("make_separated: greedy-random reached " + std::to_string(out.points.size()) + " of " +
                          std::to_string(K) + " points within the iteration budget");
      CVector w(static_cast<std::size_t>(s));
      for (int v = 0; v < s; ++v) {
        const double re = rng.uniform(0, box);
        const double im = rng.uniform(0, box);
        w[v] = {re, im};
      }
      bool ok = true;
      for (const auto& p : out.points) {
        double dist = 0;
        for (int v = 0; v < s; ++v) dist = std::max(dist, std::abs(p[v] - w[v]));
        if (dist < R) {
          ok = false;
          break;
        }
      }
      if (ok) out.points.push_back(w);
    }
  }
  if (!out.verify()) throw std::logic_error("make_separated: separation check failed");
  return out;
}

inline SeparatedSet make_separated(const CentralFrame& fr, double R, std::size_t K, SeparationStrategy strategy,
                                   std::uint64_t seed) {
  return make_separated(fr.s(), R, K, strategy, seed);
}

inline constexpr std::size_t kPointBudget = 10'000'000;

/// Streams the points α^{-n}(π(a) + x0), n = n_from..n_to, to `visit(n, index
/// in A, point)`. Uses α^{-n}(π(a) + x0) = α^{-n}x0 + π(ξ^{-n}a): the base
/// orbit is exact in fixed point and the central part is a rotation.
inline void for_each_inverse_orbit_point(const CentralFrame& fr, const SeparatedSet& set, const TorusPoint& x0,
                                         std::size_t n_from, std::size_t n_to,
                                         const std::function<void(std::size_t, std::size_t, const TorusPoint&)>& visit) {
  if (static_cast<int>(x0.dim()) != fr.n()) throw ContractError("inverse orbit: dimension mismatch");
  const auto n = static_cast<std::size_t>(fr.n());
  const WrapMatrix inv = WrapMatrix::from(integer_inverse(fr.A));
  FixedTorusPoint base = to_fixed(x0);
  std::vector<std::uint64_t> tmp(n);
  // advance to n_from - 1
  for (std::size_t k = 1; k < n_from; ++k) {
    inv.apply(base.c, tmp);
    base.c.swap(tmp);
  }
  const int s = fr.s();
  std::vector<std::vector<double>> lifts(set.points.size());
  TorusPoint pt;
  pt.coords.resize(n);
  CVector rot;
  for (std::size_t step = n_from; step <= n_to; ++step) {
    inv.apply(base.c, tmp);
    base.c.swap(tmp);
    rot = central_rotation(fr, -static_cast<long long>(step));
    for (std::size_t a = 0; a < set.points.size(); ++a) {
      CVector w(static_cast<std::size_t>(s));
      for (int v = 0; v < s; ++v) w[v] = rot[v] * set.points[a][v];
      const auto l = lift(fr, w);
      for (std::size_t i = 0; i < n; ++i) {
        double c = fixed_coord(base.c[i]) + l[i];
        c -= std::floor(c);
        if (c >= 1.0) c = 0.0;
        pt.coords[i] = c;
      }
      visit(step, a, pt);
    }
  }
}

/// {α^{-n}(π(a) + x0) : a ∈ A, 1 <= n <= N}.
inline std::vector<TorusPoint> inverse_orbit_union(const CentralFrame& fr, const SeparatedSet& set,
                                                   const TorusPoint& x0, std::size_t N) {
  if (set.points.size() * N > kPointBudget)
    throw BudgetError("inverse_orbit_union: K·N = " + std::to_string(set.points.size() * N) + " exceeds the point budget");
  std::vector<TorusPoint> out;
  out.reserve(set.points.size() * N);
  for_each_inverse_orbit_point(fr, set, x0, 1, N,
                               [&](std::size_t, std::size_t, const TorusPoint& p) { out.push_back(p); });
  return out;
}

}  // namespace tordyn
