// Finitely supported measures, empirical leaf-mass profiles, the finiteness
// diagnostic, the equivariant center of mass and the map τ.
#pragma once

#include "tordyn/torus_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tordyn {

using RealVector = std::vector<double>;

inline std::vector<double> flatten(const RealVector& p) { return p; }
inline std::vector<double> flatten(const TorusPoint& p) { return p.coords; }
inline std::vector<double> flatten(const CVector& p) {
  std::vector<double> out;
  for (const auto& z : p) {
    out.push_back(z.real());
    out.push_back(z.imag());
  }
  return out;
}

inline double merge_distance(const RealVector& a, const RealVector& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
inline double merge_distance(const CVector& a, const CVector& b) { return merge_distance(flatten(a), flatten(b)); }
inline double merge_distance(const TorusPoint& a, const TorusPoint& b) {
  double m = 0;
  for (double d : torus_difference(a, b)) m = std::max(m, std::abs(d));
  return m;
}

/// Finitely supported positive measure.
template <class P>
struct WeightedPointMeasure {
  std::vector<P> support;
  std::vector<double> weights;

  static constexpr double kMergeTolerance = 1e-12;

  WeightedPointMeasure() = default;
  WeightedPointMeasure(std::vector<P> pts, std::vector<double> w) : support(std::move(pts)), weights(std::move(w)) {
    if (support.size() != weights.size()) throw ContractError("measure: support and weights differ in length");
    for (double x : weights)
      if (!(x > 0) || !std::isfinite(x)) throw ContractError("measure: weights must be positive and finite");
  }

  /// Uniform probability measure on the given points.
  static WeightedPointMeasure uniform(std::vector<P> pts) {
    if (pts.empty()) throw ContractError("measure: empty support");
    const double w = 1.0 / static_cast<double>(pts.size());
    std::vector<double> ws(pts.size(), w);
    return WeightedPointMeasure(std::move(pts), std::move(ws));
  }

  std::size_t size() const { return support.size(); }
  bool empty() const { return support.empty(); }
  double total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
  bool is_probability(double tol = 1e-12) const { return std::abs(total() - 1.0) <= tol; }

  void add(P p, double w) {
    if (!(w > 0)) throw ContractError("measure: weights must be positive");
    support.push_back(std::move(p));
    weights.push_back(w);
  }

  /// Merges atoms closer than the merge tolerance (sup norm), keeping the
  /// first position and summing weights.
  void merge_close() {
    if (support.size() < 2) return;
    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> key(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) key[i] = flatten(support[i]).at(0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    std::vector<bool> gone(support.size(), false);
    for (std::size_t a = 0; a < order.size(); ++a) {
      const std::size_t i = order[a];
      if (gone[i]) continue;
      for (std::size_t b = a + 1; b < order.size() && key[order[b]] - key[i] <= kMergeTolerance; ++b) {
        const std::size_t j = order[b];
        if (!gone[j] && merge_distance(support[i], support[j]) <= kMergeTolerance) {
          weights[i] += weights[j];
          gone[j] = true;
        }
      }
    }
    std::vector<P> s;
    std::vector<double> w;
    for (std::size_t i = 0; i < support.size(); ++i)
      if (!gone[i]) {
        s.push_back(std::move(support[i]));
        w.push_back(weights[i]);
      }
    support = std::move(s);
    weights = std::move(w);
  }

  WeightedPointMeasure scaled(double t) const {
    if (!(t > 0)) throw ContractError("measure: scale must be positive");
    WeightedPointMeasure out = *this;
    for (auto& w : out.weights) w *= t;
    return out;
  }

  template <class F>
  auto pushforward(F&& f) const {
    using Q = std::decay_t<decltype(f(support.front()))>;
    WeightedPointMeasure<Q> out;
    for (std::size_t i = 0; i < support.size(); ++i) {
      out.support.push_back(f(support[i]));
      out.weights.push_back(weights[i]);
    }
    return out;
  }
};

using TorusMeasure = WeightedPointMeasure<TorusPoint>;
using CentralMeasure = WeightedPointMeasure<CVector>;
using EuclideanMeasure = WeightedPointMeasure<RealVector>;

enum class SampleKind { haar, central_orbit_closure, periodic_orbit };

inline SampleKind parse_sample_kind(const std::string& s) {
  if (s == "haar") return SampleKind::haar;
  if (s == "central_orbit_closure" || s == "orbit") return SampleKind::central_orbit_closure;
  if (s == "periodic_orbit" || s == "periodic") return SampleKind::periodic_orbit;
  throw ContractError("unknown sample kind '" + s + "'");
}

struct SampleParams {
  std::optional<CVector> w0;          // central point, default (1, 0, ...)
  long long denominator = 5;          // periodic orbit of (1/q, 0, ..., 0)
  std::size_t period_budget = 1'000'000;
};

/// Exact periodic orbit of the rational point (1/q, 0, ..., 0).
inline std::vector<RationalTorusPoint> periodic_orbit(const CentralFrame& fr, long long q, std::size_t budget) {
  if (q < 2) throw ContractError("periodic_orbit: denominator must be at least 2");
  std::vector<BigRational> c(static_cast<std::size_t>(fr.n()), BigRational(0));
  c[0] = BigRational(1, q);
  const RationalTorusPoint start(std::move(c));
  std::vector<RationalTorusPoint> orbit{start};
  RationalTorusPoint x = apply_alpha(fr, start, 1);
  while (!(x == start)) {
    if (orbit.size() >= budget) throw BudgetError("periodic_orbit: period exceeds the budget");
    orbit.push_back(x);
    x = apply_alpha(fr, x, 1);
  }
  return orbit;
}

/// Samples an α-invariant (or approximately invariant) measure on T^n.
inline TorusMeasure sample_invariant(const CentralFrame& fr, SampleKind kind, const SampleParams& params,
                                     std::size_t count, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(fr.n());
  std::vector<TorusPoint> pts;
  switch (kind) {
    case SampleKind::haar: {
      if (count < 1) throw ContractError("sample_invariant: count must be positive");
      Rng rng(seed, "measures.sample_invariant.haar");
      pts.reserve(count);
      for (std::size_t k = 0; k < count; ++k) {
        std::vector<double> c(n);
        for (auto& v : c) v = rng.uniform();
        pts.emplace_back(std::move(c));
      }
      break;
    }
    case SampleKind::central_orbit_closure: {
      if (count < 1) throw ContractError("sample_invariant: count must be positive");
      CVector w0 = params.w0.value_or(CVector(static_cast<std::size_t>(fr.s()), {0.0, 0.0}));
      if (!params.w0) w0[0] = {1.0, 0.0};
      if (static_cast<int>(w0.size()) != fr.s()) throw ContractError("sample_invariant: w0 dimension mismatch");
      // α^m(π(w0)) = π(ξ^m w0); phasors resynchronized from the exact angles
      const TorusPoint zero(std::vector<double>(n, 0.0));
      CVector step = central_rotation(fr, 1), cur(static_cast<std::size_t>(fr.s()), {1.0, 0.0});
      for (std::size_t m = 0; m < count; ++m) {
        if (m % 1024 == 0) cur = central_rotation(fr, static_cast<long long>(m));
        pts.push_back(leaf_point(fr, zero, rotate(cur, w0)));
        cur = rotate(cur, step);
      }
      break;
    }
    case SampleKind::periodic_orbit: {
      for (const auto& p : periodic_orbit(fr, params.denominator, params.period_budget)) {
        std::vector<double> c;
        for (const auto& v : p.coords) c.push_back(v.convert_to<double>());
        pts.emplace_back(std::move(c));
      }
      break;
    }
  }
  return TorusMeasure::uniform(std::move(pts));
}

struct LeafMassProfile {
  std::vector<double> radii;
  std::vector<double> masses;
  std::size_t sample_size = 0;
  double r0 = 0;
  double tube_eps = 0;
  double embedded_eps_limit = 0;  // largest tube_eps without self-overlap up to radii.back()
  bool tube_overlaps = false;
};

namespace detail {

// Lattice points k of Z^n with max_v |central(k)_v| <= central_bound and
// |complement(k)|_inf <= comp_bound, found by Fincke-Pohst enumeration of
// the ellipsoid containing that cylinder.
inline std::vector<std::vector<long long>> lattice_cylinder(const CentralFrame& fr, double central_bound,
                                                            double comp_bound, std::size_t cap) {
  const auto n = static_cast<std::size_t>(fr.n());
  const auto sc = static_cast<std::size_t>(2 * fr.s());
  // Q(k) = |D Binv k|^2 with D scaling central rows by 1/central_bound and
  // complement rows by 1/comp_bound; the cylinder lies in Q <= n - s.
  DenseMatrix<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = fr.basis_inv_d(i, j) / (i < sc ? central_bound : comp_bound);
  DenseMatrix<double> g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0;
      for (std::size_t k = 0; k < n; ++k) acc += m(k, i) * m(k, j);
      g(i, j) = acc;
    }
  // g = R^T R, then Q(k) = sum_i r_ii^2 (k_i + sum_{j>i} r_ij/r_ii k_j)^2
  DenseMatrix<double> r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = g(i, i);
    for (std::size_t k = 0; k < i; ++k) d -= r(k, i) * r(k, i);
    if (!(d > 0)) throw std::runtime_error("lattice enumeration: degenerate quadratic form");
    r(i, i) = std::sqrt(d);
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = g(i, j);
      for (std::size_t k = 0; k < i; ++k) v -= r(k, i) * r(k, j);
      r(i, j) = v / r(i, i);
    }
  }
  const double bound = static_cast<double>(n) - static_cast<double>(fr.s()) + 1e-9;
  std::vector<std::vector<long long>> out;
  std::vector<long long> k(n, 0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t level, double remaining) {
    const std::size_t i = level;
    double c = 0;
    for (std::size_t j = i + 1; j < n; ++j) c += r(i, j) / r(i, i) * static_cast<double>(k[j]);
    const double half = std::sqrt(std::max(remaining, 0.0)) / r(i, i);
    const auto lo = static_cast<long long>(std::ceil(-c - half));
    const auto hi = static_cast<long long>(std::floor(-c + half));
    for (long long v = lo; v <= hi; ++v) {
      k[i] = v;
      const double t = r(i, i) * (static_cast<double>(v) + c);
      const double rem = remaining - t * t;
      if (rem < 0) continue;
      if (i == 0) {
        out.push_back(k);
        if (out.size() > cap) throw BudgetError("lattice enumeration exceeded its cap");
      } else {
        rec(i - 1, rem);
      }
    }
    k[i] = 0;
  };
  rec(n - 1, bound);
  return out;
}

struct CellKey {
  std::vector<long long> idx;
  bool operator==(const CellKey&) const = default;
};
struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 0x12345;
    for (auto v : k.idx) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Half the smallest complement sup-norm of a nonzero lattice vector whose
/// central part has norm <= 2·rmax: tubes thinner than this around a central
/// ball of radius rmax do not overlap themselves. Capped at `cap`.
inline double tube_embedding_limit(const CentralFrame& fr, double rmax, double cap = 0.05) {
  const auto lattice = detail::lattice_cylinder(fr, 2 * rmax, 2 * cap, 50'000'000);
  double best = 2 * cap;
  for (const auto& k : lattice) {
    bool zero = true;
    for (auto v : k) zero = zero && v == 0;
    if (zero) continue;
    std::vector<double> kv(k.begin(), k.end());
    if (central_norm(central_coordinates(fr, kv)) > 2 * rmax) continue;
    double m = 0;
    for (double c : complement_coordinates(fr, kv)) m = std::max(m, std::abs(c));
    best = std::min(best, m);
  }
  return best / 2;
}

/// Empirical ρ_x-mass of central balls: sample mass in the tubes
/// {x + π(w) + c : ||w|| <= r, |c|_inf < tube_eps in complement coordinates},
/// each lattice return of the leaf counted separately, normalized so the
/// mass at r0 = radii.front() is 1.
inline LeafMassProfile estimate_leaf_profile(const CentralFrame& fr, const TorusMeasure& sample, const TorusPoint& x,
                                             std::vector<double> radii, double tube_eps = 0.02) {
  if (!(tube_eps > 0)) throw ContractError("estimate_leaf_profile: tube_eps must be positive");
  if (radii.empty()) throw ContractError("estimate_leaf_profile: no radii");
  if (!std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 0)
    throw ContractError("estimate_leaf_profile: radii must be positive and increasing");
  if (static_cast<int>(x.dim()) != fr.n()) throw ContractError("estimate_leaf_profile: dimension mismatch");
  const auto n = static_cast<std::size_t>(fr.n());
  const auto sc = static_cast<std::size_t>(2 * fr.s());
  const std::size_t nc = n - sc;

  // bounds on the coordinates of a representative d in [0,1)^n of y - x
  double comp_d = 0, central_d = 0;
  for (std::size_t i = sc; i < n; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc += std::abs(fr.basis_inv_d(i, j));
    comp_d = std::max(comp_d, acc);
  }
  for (std::size_t v = 0; v < sc / 2; ++v) {
    double acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc += std::hypot(fr.basis_inv_d(2 * v, j), fr.basis_inv_d(2 * v + 1, j));
    central_d = std::max(central_d, acc);
  }
  const double rmax = radii.back();
  const auto lattice = detail::lattice_cylinder(fr, rmax + central_d, comp_d + tube_eps, 50'000'000);

  // bucket lattice points by complement coordinates
  std::vector<std::vector<double>> kcomp(lattice.size()), kcent(lattice.size());
  std::unordered_map<detail::CellKey, std::vector<std::size_t>, detail::CellKeyHash> cells;
  for (std::size_t t = 0; t < lattice.size(); ++t) {
    std::vector<double> kv(lattice[t].begin(), lattice[t].end());
    kcomp[t] = complement_coordinates(fr, kv);
    kcent[t] = flatten(central_coordinates(fr, kv));
    detail::CellKey key;
    for (double c : kcomp[t]) key.idx.push_back(static_cast<long long>(std::floor(c / tube_eps)));
    cells[key].push_back(t);
  }

  std::vector<double> mass(radii.size(), 0.0);
  std::vector<double> d(n);
  std::vector<long long> base(nc), off(nc);
  for (std::size_t p = 0; p < sample.size(); ++p) {
    const auto& y = sample.support[p].coords;
    for (std::size_t i = 0; i < n; ++i) {
      double v = y[i] - x.coords[i];
      v -= std::floor(v);
      d[i] = v;
    }
    const auto dcomp = complement_coordinates(fr, d);
    const auto dcent = flatten(central_coordinates(fr, d));
    // need comp(k) within tube_eps of -comp(d)
    for (std::size_t j = 0; j < nc; ++j) base[j] = static_cast<long long>(std::floor(-dcomp[j] / tube_eps)) - 1;
    std::fill(off.begin(), off.end(), 0);
    for (;;) {
      detail::CellKey key;
      for (std::size_t j = 0; j < nc; ++j) key.idx.push_back(base[j] + off[j]);
      if (auto it = cells.find(key); it != cells.end()) {
        for (std::size_t t : it->second) {
          bool inside = true;
          for (std::size_t j = 0; j < nc && inside; ++j) inside = std::abs(kcomp[t][j] + dcomp[j]) < tube_eps;
          if (!inside) continue;
          double norm = 0;
          for (std::size_t v = 0; v < sc / 2; ++v)
            norm = std::max(norm, std::hypot(kcent[t][2 * v] + dcent[2 * v], kcent[t][2 * v + 1] + dcent[2 * v + 1]));
          for (std::size_t ri = 0; ri < radii.size(); ++ri)
            if (norm <= radii[ri]) mass[ri] += sample.weights[p];
        }
      }
      std::size_t j = 0;
      while (j < nc && ++off[j] > 2) off[j++] = 0;
      if (j == nc) break;
    }
  }
  if (!(mass.front() > 0))
    throw ContractError("estimate_leaf_profile: empty tube at r0 (x is not on a charged leaf for this sample)");
  LeafMassProfile prof;
  prof.radii = std::move(radii);
  prof.r0 = prof.radii.front();
  prof.tube_eps = tube_eps;
  prof.embedded_eps_limit = tube_embedding_limit(fr, rmax);
  prof.tube_overlaps = tube_eps > prof.embedded_eps_limit;
  prof.sample_size = sample.size();
  for (double m : mass) prof.masses.push_back(m / mass.front());
  return prof;
}

enum class FinitenessVerdict { finite, infinite_growth, inconclusive };

inline const char* to_string(FinitenessVerdict v) {
  switch (v) {
    case FinitenessVerdict::finite: return "finite";
    case FinitenessVerdict::infinite_growth: return "infinite-growth";
    default: return "inconclusive";
  }
}

struct FinitenessDiagnostic {
  FinitenessVerdict verdict = FinitenessVerdict::inconclusive;
  double exponent = 0;   // slope of log mass against log r
  double r_squared = 0;  // fit quality
  double residual = 0;   // root-mean-square residual of the fit
};

inline FinitenessDiagnostic finiteness_diagnostic(const LeafMassProfile& p) {
  if (p.radii.size() < 5 || p.radii.size() != p.masses.size())
    throw ContractError("finiteness_diagnostic: need at least 5 radii");
  if (p.radii.back() < 10 * p.radii.front()) throw ContractError("finiteness_diagnostic: radii must span a factor >= 10");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < p.radii.size(); ++i)
    if (p.masses[i] > 0) {
      lx.push_back(std::log(p.radii[i]));
      ly.push_back(std::log(p.masses[i]));
    }
  FinitenessDiagnostic d;
  const double k = static_cast<double>(lx.size());
  if (lx.size() >= 2) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
      syy += (ly[i] - my) * (ly[i] - my);
    }
    d.exponent = sxx > 0 ? sxy / sxx : 0;
    double ss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double e = ly[i] - (my + d.exponent * (lx[i] - mx));
      ss += e * e;
    }
    d.r_squared = syy > 0 ? 1 - ss / syy : 1;
    d.residual = std::sqrt(ss / k);
  }
  const double last = p.masses.back(), prev = p.masses[p.masses.size() - 2];
  if (prev > 0 && std::abs(last - prev) <= 0.05 * prev)
    d.verdict = FinitenessVerdict::finite;
  else if (d.exponent > 0.5 && d.r_squared >= 0.95)
    d.verdict = FinitenessVerdict::infinite_growth;
  else
    d.verdict = FinitenessVerdict::inconclusive;
  return d;
}

/// Center of mass with the measure-relative threshold: M = max ball mass
/// ρ(B(x, r)) over atoms, S = atoms with ball mass >= M/2, result the
/// ρ-weighted mean of S.
inline RealVector center_of_mass(const EuclideanMeasure& rho, double r) {
  if (rho.empty()) throw ContractError("center_of_mass: zero measure");
  if (!(r > 0)) throw ContractError("center_of_mass: r must be positive");
  const std::size_t m = rho.size();
  const std::size_t d = rho.support.front().size();
  std::vector<double> ball(m, 0.0);
  const double r2 = r * r;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < d; ++k) {
        const double t = rho.support[i][k] - rho.support[j][k];
        s += t * t;
      }
      if (s <= r2) ball[i] += rho.weights[j];
    }
  const double M = *std::max_element(ball.begin(), ball.end());
  const double eps = M / 2;
  RealVector acc(d, 0.0);
  double mass = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (ball[i] >= eps) {
      for (std::size_t k = 0; k < d; ++k) acc[k] += rho.weights[i] * rho.support[i][k];
      mass += rho.weights[i];
    }
  for (auto& v : acc) v /= mass;
  return acc;
}

inline CVector center_of_mass(const CentralMeasure& rho, double r) {
  EuclideanMeasure flat = rho.pushforward([](const CVector& w) { return flatten(w); });
  const RealVector c = center_of_mass(flat, r);
  CVector out(c.size() / 2);
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = {c[2 * v], c[2 * v + 1]};
  return out;
}

/// Leaf measures keyed by the exact coordinates of the base point.
using LeafMeasureMap = std::map<std::vector<double>, CentralMeasure>;

/// τ(x) = x + π(c_m(ρ_x)).
inline TorusPoint tau_map(const CentralFrame& fr, const LeafMeasureMap& leaf_measures, const TorusPoint& x,
                          double r = 1.0) {
  const auto it = leaf_measures.find(x.coords);
  if (it == leaf_measures.end()) throw ContractError("tau_map: no leaf measure for the given point");
  return leaf_point(fr, x, center_of_mass(it->second, r));
}

}  // namespace tordyn
