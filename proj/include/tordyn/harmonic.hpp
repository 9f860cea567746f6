// Characters, oscillatory integrals, fitted decay constants, energy integrals
// and Cesàro averages of character integrals along the central action.
#pragma once

#include "tordyn/classify.hpp"
#include "tordyn/measures.hpp"
#include "tordyn/rng.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <tuple>
#include <vector>

namespace tordyn {

using Character = std::vector<long long>;

inline std::complex<double> unit_phase(double turns) {
  const double f = turns - std::floor(turns);
  const double a = 2 * std::numbers::pi * f;
  return {std::cos(a), std::sin(a)};
}

/// e^{2πi a·x}
inline std::complex<double> eval_character(const Character& a, const TorusPoint& x) {
  if (a.size() != x.dim()) throw ContractError("eval_character: dimension mismatch");
  double t = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double p = static_cast<double>(a[i]) * x.coords[i];
    t += p - std::floor(p);
  }
  return unit_phase(t);
}

inline bool is_trivial(const Character& a) {
  return std::all_of(a.begin(), a.end(), [](long long v) { return v == 0; });
}

struct TrigTerm {
  long long m = 1;
  double a = 0;
  double b = 0;
  bool operator==(const TrigTerm&) const = default;
};

/// p(t) = Σ a_k cos(2π m_k t) + b_k sin(2π m_k t).
struct TrigPolynomial {
  std::vector<TrigTerm> terms;

  TrigPolynomial() = default;
  explicit TrigPolynomial(std::vector<TrigTerm> t) : terms(std::move(t)) {
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (terms[k].m <= 0) throw ContractError("trig polynomial: frequencies must be positive");
      if (k > 0 && terms[k].m <= terms[k - 1].m) throw ContractError("trig polynomial: frequencies must increase");
      if (!std::isfinite(terms[k].a) || !std::isfinite(terms[k].b))
        throw ContractError("trig polynomial: coefficients must be finite");
    }
  }

  int s() const { return static_cast<int>(terms.size()); }
  long long M() const { return terms.empty() ? 0 : terms.back().m; }
  double norm() const {
    double r = 0;
    for (const auto& t : terms) r = std::max(r, std::hypot(t.a, t.b));
    return r;
  }
  double operator()(double t) const {
    double v = 0;
    for (const auto& k : terms) {
      const double x = 2 * std::numbers::pi * static_cast<double>(k.m) * t;
      v += k.a * std::cos(x) + k.b * std::sin(x);
    }
    return v;
  }
  double derivative(double t) const {
    double v = 0;
    for (const auto& k : terms) {
      const double w = 2 * std::numbers::pi * static_cast<double>(k.m);
      v += w * (k.b * std::cos(w * t) - k.a * std::sin(w * t));
    }
    return v;
  }
  TrigPolynomial scaled(double c) const {
    TrigPolynomial out = *this;
    for (auto& k : out.terms) {
      k.a *= c;
      k.b *= c;
    }
    return out;
  }
};

struct QuadratureResult {
  std::complex<double> value;
  double error = 0;  // |I_2N - I_N|
  std::size_t points = 0;
};

/// Refusal threshold for the doubling delta, relative to the value. The small
/// absolute floor only matters for integrals that vanish to rounding level.
inline constexpr double kQuadratureRelTol = 1e-6;
inline constexpr double kQuadratureAbsFloor = 1e-12;

inline void check_doubling(const QuadratureResult& q, const char* what) {
  if (!(q.error <= kQuadratureRelTol * std::abs(q.value) + kQuadratureAbsFloor))
    throw ConvergenceError(std::string(what) + ": doubling delta " + std::to_string(q.error) +
                           " exceeds tolerance at " + std::to_string(q.points) + " points");
}

namespace detail {

// e^{2πi q/L} for L a power of two, from two tables of size about √L.
class RootTable {
 public:
  explicit RootTable(std::size_t L) : L_(L), shift_((std::bit_width(L) - 1) / 2), lo_(1ULL << shift_) {
    hi_.resize(L_ / lo_.size());
    for (std::size_t i = 0; i < lo_.size(); ++i) lo_[i] = root(i);
    for (std::size_t i = 0; i < hi_.size(); ++i) hi_[i] = root(i << shift_);
  }
  std::complex<double> operator()(std::uint64_t q) const {
    q &= L_ - 1;
    return hi_[q >> shift_] * lo_[q & (lo_.size() - 1)];
  }

 private:
  std::complex<double> root(std::size_t q) const {
    const double a = 2 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(L_);
    return {std::cos(a), std::sin(a)};
  }
  std::size_t L_;
  int shift_;
  std::vector<std::complex<double>> lo_, hi_;
};

inline std::size_t next_pow2(double x) {
  std::size_t n = 1;
  while (static_cast<double>(n) < x) n <<= 1;
  return n;
}

}  // namespace detail

/// Points past which the Fourier coefficients of e^{ip} are negligible.
inline std::size_t oscillatory_bandwidth(const TrigPolynomial& p) {
  double b = 0;
  for (const auto& k : p.terms) {
    const double c = std::hypot(k.a, k.b);
    b += static_cast<double>(k.m) * (c + 10 * std::cbrt(c) + 30);
  }
  return static_cast<std::size_t>(std::ceil(b));
}

/// Smallest power of two that is both admissible and past the bandwidth.
inline std::size_t suggested_points(const TrigPolynomial& p) {
  return detail::next_pow2(std::max<double>(static_cast<double>(64 * std::max<long long>(p.M(), 1)),
                                            static_cast<double>(oscillatory_bandwidth(p))));
}

/// ∫_0^1 e^{ip(t)} dt by the trapezoid rule at N and 2N points.
inline QuadratureResult oscillatory_integral(const TrigPolynomial& p, std::size_t quadrature_points) {
  if (p.terms.empty()) return {1.0, 0.0, quadrature_points};
  if (quadrature_points < static_cast<std::size_t>(64 * p.M()))
    throw ContractError("oscillatory_integral: need at least 64*M quadrature points");
  if (quadrature_points > (std::size_t(1) << 30)) throw BudgetError("oscillatory_integral: too many points");
  // Round the doubled grid up to a power of two so that the sample angles come
  // from an exact table; the N-point rule uses every other node.
  const std::size_t L = detail::next_pow2(2.0 * static_cast<double>(quadrature_points));
  const std::size_t N = L / 2;
  const detail::RootTable roots(L);
  std::vector<std::complex<double>> coef;
  for (const auto& k : p.terms) coef.emplace_back(k.a, -k.b);  // p = Re Σ (a - ib) e^{2πimt}
  std::complex<double> even = 0, odd = 0;
  for (std::uint64_t j = 0; j < L; ++j) {
    double phase = 0;
    for (std::size_t k = 0; k < coef.size(); ++k)
      phase += (coef[k] * roots(static_cast<std::uint64_t>(p.terms[k].m) * j)).real();
    const std::complex<double> e(std::cos(phase), std::sin(phase));
    if (j % 2 == 0) even += e;
    else odd += e;
  }
  QuadratureResult r;
  const std::complex<double> coarse = even / static_cast<double>(N);
  r.value = (even + odd) / static_cast<double>(L);
  r.error = std::abs(r.value - coarse);
  r.points = L;
  check_doubling(r, "oscillatory_integral");
  return r;
}

inline QuadratureResult oscillatory_integral(const TrigPolynomial& p) {
  return oscillatory_integral(p, suggested_points(p));
}

/// One sample of a constant fit: the probed norm, the observed value and the
/// bound c·norm^{-1/2s} implied by the final constant.
struct SweepRow {
  double norm = 0;
  double value = 0;
  double bound = 0;
};

struct FittedConstant {
  double constant = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::vector<SweepRow> rows;
};

/// Random trig polynomial with s terms, top frequency M and given norm.
inline TrigPolynomial random_trig_polynomial(int s, long long M, double norm, Rng& rng) {
  if (s < 1 || M < s) throw ContractError("random_trig_polynomial: need 1 <= s <= M");
  std::vector<long long> freqs{M};
  while (static_cast<int>(freqs.size()) < s) {
    const long long m = 1 + static_cast<long long>(rng.below(static_cast<std::uint64_t>(M - 1)));
    if (std::find(freqs.begin(), freqs.end(), m) == freqs.end()) freqs.push_back(m);
  }
  std::sort(freqs.begin(), freqs.end());
  std::vector<TrigTerm> terms;
  double top = 0;
  for (long long m : freqs) {
    TrigTerm t{m, rng.normal(), rng.normal()};
    top = std::max(top, std::hypot(t.a, t.b));
    terms.push_back(t);
  }
  for (auto& t : terms) {
    t.a *= norm / top;
    t.b *= norm / top;
  }
  return TrigPolynomial(std::move(terms));
}

/// max |∫e^{ip}|·‖p‖^{1/2s} over random p with ‖p‖ log-uniform in [1, 1e6].
inline FittedConstant fit_c2(int s, long long M, std::size_t trials, std::uint64_t seed,
                             double norm_lo = 1.0, double norm_hi = 1e6) {
  if (trials < 100) throw ContractError("fit_c2: need at least 100 trials");
  if (s < 1 || M < s) throw ContractError("fit_c2: need 1 <= s <= M");
  const Rng root(seed, "harmonic.fit_c2");
  FittedConstant out;
  out.seed = seed;
  out.samples = trials;
  const double e = 1.0 / (2.0 * s);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng = root.child(i);
    const double norm = rng.log_uniform(norm_lo, norm_hi);
    const TrigPolynomial p = random_trig_polynomial(s, M, norm, rng);
    const double v = std::abs(oscillatory_integral(p).value) * std::pow(p.norm(), e);
    out.rows.push_back({p.norm(), v, 0});
    out.constant = std::max(out.constant, v);
  }
  for (auto& r : out.rows) r.bound = out.constant * std::pow(r.norm, -e);
  return out;
}

/// Least-squares slope of log(running max of value) against log(norm), rows
/// taken in order of norm, fitted over the rows with norm >= from_norm.
/// Returns 0 when fewer than two rows qualify.
inline double running_max_slope(std::vector<SweepRow> rows, double from_norm) {
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.norm < b.norm; });
  std::vector<double> lx, ly;
  double run = 0;
  for (const auto& r : rows) {
    run = std::max(run, r.value);
    if (r.norm >= from_norm && run > 0) {
      lx.push_back(std::log(r.norm));
      ly.push_back(std::log(run));
    }
  }
  if (lx.size() < 2) return 0;
  const double k = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / k;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxx > 0 ? sxy / sxx : 0;
}

/// Grid estimate of λ{t ∈ [0,1] : |p'(t)| < A}.
inline double sublevel_measure(const TrigPolynomial& p, double A, std::size_t grid) {
  if (grid < 10'000) throw ContractError("sublevel_measure: grid must have at least 1e4 cells");
  std::size_t hits = 0;
  for (std::size_t j = 0; j < grid; ++j) {
    const double t = (static_cast<double>(j) + 0.5) / static_cast<double>(grid);
    if (std::abs(p.derivative(t)) < A) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(grid);
}

namespace detail {

inline double poly_value(const std::vector<double>& a, double t) {
  double v = 0;
  for (std::size_t l = a.size(); l-- > 0;) v = v * t + a[l];
  return v;
}

// sup over [-1,1] of |p|: sampled, then every local maximum polished by
// Newton steps on p'.
inline double sup_on_interval(const std::vector<double>& a) {
  std::vector<double> d1, d2;
  for (std::size_t l = 1; l < a.size(); ++l) d1.push_back(static_cast<double>(l) * a[l]);
  for (std::size_t l = 1; l < d1.size(); ++l) d2.push_back(static_cast<double>(l) * d1[l]);
  constexpr int G = 256;
  std::vector<double> v(G + 1);
  for (int i = 0; i <= G; ++i) v[i] = std::abs(poly_value(a, -1.0 + 2.0 * i / G));
  double best = std::max(v[0], v[G]);
  for (int i = 1; i < G; ++i) {
    if (v[i] < v[i - 1] || v[i] < v[i + 1]) continue;
    double t = -1.0 + 2.0 * i / G;
    for (int it = 0; it < 30; ++it) {
      const double h = poly_value(d2, t);
      if (h == 0) break;
      const double step = poly_value(d1, t) / h;
      t = std::clamp(t - step, -1.0 + 2.0 * (i - 1) / G, -1.0 + 2.0 * (i + 1) / G);
      if (std::abs(step) < 1e-15) break;
    }
    best = std::max({best, v[i], std::abs(poly_value(a, t))});
  }
  return best;
}

inline double sampled_sup(const std::vector<double>& a, const std::vector<double>& nodes) {
  double m = 0;
  for (double t : nodes) m = std::max(m, std::abs(poly_value(a, t)));
  return m;
}

inline double normalized_sup(const std::vector<double>& a) {
  double top = 0;
  for (double x : a) top = std::max(top, std::abs(x));
  return sup_on_interval(a) / top;
}

// Best grid point at resolution G, then pattern search on sup|p| / max|a_l|.
inline double estimate_A_s_level(int s, std::size_t G) {
  const std::size_t dim = static_cast<std::size_t>(2 * s);
  std::vector<double> nodes;
  for (int i = 0; i <= 64; ++i) nodes.push_back(std::cos(std::numbers::pi * i / 64));
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> a(dim), best_a;
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    bool on_boundary = false;
    for (std::size_t l = 0; l < dim; ++l) {
      a[l] = -1.0 + 2.0 * static_cast<double>(idx[l]) / static_cast<double>(G);
      on_boundary = on_boundary || idx[l] == 0 || idx[l] == G;
    }
    // p and -p are equivalent, so the leading nonzero coefficient may be taken positive
    const auto lead = std::find_if(a.rbegin(), a.rend(), [](double x) { return x != 0; });
    if (on_boundary && lead != a.rend() && *lead > 0) {
      const double v = sampled_sup(a, nodes);
      if (v < best) {
        best = v;
        best_a = a;
      }
    }
    std::size_t l = 0;
    while (l < dim && ++idx[l] > G) idx[l++] = 0;
    if (l == dim) break;
  }
  a = best_a;
  double f = normalized_sup(a);
  for (double h = 1.0 / static_cast<double>(G); h > 1e-9; h /= 2) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t l = 0; l < dim; ++l)
        for (double dir : {1.0, -1.0}) {
          auto b = a;
          b[l] += dir * h;
          const double fb = normalized_sup(b);
          if (fb < f) {
            f = fb;
            a = b;
            moved = true;
          }
        }
    }
  }
  return f;
}

}  // namespace detail

/// Upper estimate of A_s = min sup_{(-1,1)} |Σ_{l<2s} a_l t^l| over max|a_l| = 1.
/// The value at G is also minimized against G/2, G/4, ... so refining the
/// grid by doubling never increases it.
inline double estimate_A_s(int s, std::size_t coeff_grid) {
  if (s < 1 || s > 3) throw ContractError("estimate_A_s: s must be 1, 2 or 3");
  if (coeff_grid < 1) throw ContractError("estimate_A_s: coeff_grid must be positive");
  double v = detail::estimate_A_s_level(s, coeff_grid);
  for (std::size_t g = coeff_grid; g % 2 == 0 && g > 1;) {
    g /= 2;
    v = std::min(v, detail::estimate_A_s_level(s, g));
  }
  return std::min(v, 1.0);
}

/// Γ is modeled as the full torus of the central places; this holds only
/// when the central roots are multiplicatively independent.
inline bool gamma_is_full_torus(const CentralFrame& fr) {
  static std::mutex mu;
  static std::map<std::vector<BigInt>, bool> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(fr.f.coeffs());
  if (it == cache.end()) it = cache.emplace(fr.f.coeffs(), multiplicative_independence(fr.f)).first;
  return it->second;
}

/// k_v with a·L(w) = Σ_v Re(k_v w_v).
inline CVector character_coefficients(const CentralFrame& fr, const Character& a) {
  if (static_cast<int>(a.size()) != fr.n()) throw ContractError("character: dimension mismatch");
  CVector k(static_cast<std::size_t>(fr.s()));
  for (std::size_t v = 0; v < k.size(); ++v) {
    double g = 0, h = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      g += static_cast<double>(a[i]) * fr.basis_d(i, 2 * v);
      h += static_cast<double>(a[i]) * fr.basis_d(i, 2 * v + 1);
    }
    k[v] = {g, -h};
  }
  return k;
}

/// Per-angle node count that resolves the factor of a place with |k_v w_v| = c.
inline std::size_t gamma_points_for(double c) {
  const double phase = 2 * std::numbers::pi * c;
  return detail::next_pow2(std::max(64.0, phase + 10 * std::cbrt(phase) + 30));
}

/// ∫_Γ ⟨a, π(M_γ w)⟩ dγ by product trapezoid over (S^1)^s. The integrand is a
/// product over places, so the product rule is the product of the 1-d rules.
/// quadrature = 0 picks the per-angle count from the phase amplitude.
inline QuadratureResult gamma_character_average(const CentralFrame& fr, const Character& a, const CVector& w,
                                                std::size_t quadrature = 0) {
  if (static_cast<int>(w.size()) != fr.s()) throw ContractError("gamma_character_average: dimension mismatch");
  if (!gamma_is_full_torus(fr))
    throw ContractError("gamma_character_average: central roots are not multiplicatively independent");
  const CVector k = character_coefficients(fr, a);
  std::complex<double> fine = 1, coarse = 1;
  std::size_t used = 0;
  for (std::size_t v = 0; v < k.size(); ++v) {
    const std::complex<double> z = k[v] * w[v];
    const std::size_t N = quadrature ? quadrature : gamma_points_for(std::abs(z));
    if (N > (std::size_t(1) << 28)) throw BudgetError("gamma_character_average: too many points");
    std::complex<double> even = 0, odd = 0;
    for (std::size_t j = 0; j < 2 * N; ++j) {
      const double th = 2 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(2 * N);
      const double phase = 2 * std::numbers::pi * (z * std::complex<double>(std::cos(th), std::sin(th))).real();
      const std::complex<double> e(std::cos(phase), std::sin(phase));
      if (j % 2 == 0) even += e;
      else odd += e;
    }
    fine *= (even + odd) / static_cast<double>(2 * N);
    coarse *= even / static_cast<double>(N);
    used = std::max(used, 2 * N);
  }
  QuadratureResult r{fine, std::abs(fine - coarse), used};
  check_doubling(r, "gamma_character_average");
  return r;
}

/// Random central vector with norm log-uniform in [lo, hi] and uniform direction.
inline CVector random_central_vector(int s, double lo, double hi, Rng& rng) {
  CVector w(static_cast<std::size_t>(s));
  for (auto& z : w) z = {rng.normal(), rng.normal()};
  const double target = rng.log_uniform(lo, hi);
  const double n = central_norm(w);
  for (auto& z : w) z *= target / n;
  return w;
}

/// max |∫_Γ⟨a,π(M_γ w)⟩dγ|·max(1, ‖w‖^{1/2s}) over ‖w‖ log-uniform in [1, 1e4].
inline FittedConstant fit_ca(const CentralFrame& fr, const Character& a, std::size_t samples, std::uint64_t seed,
                             double norm_lo = 1.0, double norm_hi = 1e4) {
  if (is_trivial(a)) throw ContractError("fit_ca: character must be nontrivial");
  if (samples == 0) throw ContractError("fit_ca: need at least one sample");
  const Rng root(seed, "harmonic.fit_ca");
  const double e = 1.0 / (2.0 * fr.s());
  FittedConstant out;
  out.seed = seed;
  out.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng = root.child(i);
    const CVector w = random_central_vector(fr.s(), norm_lo, norm_hi, rng);
    const double norm = central_norm(w);
    const double v = std::abs(gamma_character_average(fr, a, w).value) * std::max(1.0, std::pow(norm, e));
    out.rows.push_back({norm, v, 0});
    out.constant = std::max(out.constant, v);
  }
  for (auto& r : out.rows) r.bound = out.constant * std::min(1.0, std::pow(r.norm, -e));
  return out;
}

/// fit_ca memoized on (f, a, samples, seed, norm range).
inline double fit_ca_cached(const CentralFrame& fr, const Character& a, std::size_t samples, std::uint64_t seed,
                            double norm_lo = 1.0, double norm_hi = 1e4) {
  using Key = std::tuple<std::vector<BigInt>, Character, std::size_t, std::uint64_t, double, double>;
  static std::mutex mu;
  static std::map<Key, double> cache;
  Key key{fr.f.coeffs(), a, samples, seed, norm_lo, norm_hi};
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double c = fit_ca(fr, a, samples, seed, norm_lo, norm_hi).constant;
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::move(key), c);
  return c;
}

inline void require_probability(const CentralMeasure& tau, const char* what) {
  if (tau.size() == 0 || std::abs(tau.total() - 1.0) > 1e-12)
    throw ContractError(std::string(what) + ": weights must sum to 1");
}

/// ∫∫ min(1, ‖w - w'‖^{-1/2s}) dτ(w) dτ(w'), summed exactly over pairs.
inline double energy_integral(const CentralMeasure& tau, int s) {
  require_probability(tau, "energy_integral");
  if (s < 1) throw ContractError("energy_integral: s must be positive");
  const double e = -1.0 / (2.0 * s);
  double sum = 0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    sum += tau.weights[i] * tau.weights[i];
    for (std::size_t j = i + 1; j < tau.size(); ++j) {
      CVector d(tau.support[i].size());
      for (std::size_t v = 0; v < d.size(); ++v) d[v] = tau.support[i][v] - tau.support[j][v];
      const double r = central_norm(d);
      sum += 2 * tau.weights[i] * tau.weights[j] * (r <= 1 ? 1.0 : std::pow(r, e));
    }
  }
  return sum;
}

/// ∫_Γ |∫⟨a,π(M_γ w)⟩dτ(w)|² dγ, expanded by Fubini into pair averages.
inline double gamma_mean_square(const CentralFrame& fr, const Character& a, const CentralMeasure& tau) {
  require_probability(tau, "gamma_mean_square");
  double sum = 0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    sum += tau.weights[i] * tau.weights[i];
    for (std::size_t j = i + 1; j < tau.size(); ++j) {
      CVector d(tau.support[i].size());
      for (std::size_t v = 0; v < d.size(); ++v) d[v] = tau.support[i][v] - tau.support[j][v];
      sum += 2 * tau.weights[i] * tau.weights[j] * gamma_character_average(fr, a, d).value.real();
    }
  }
  return sum;
}

struct CesaroResult {
  std::complex<double> average;  // ∫⟨a,·⟩ dρ_N
  double mean_square = 0;        // (1/N) Σ |∫⟨a,·⟩ dρα^i|²
  std::size_t N = 0;
  // maxima over n in [window_from, N] of |average_n|² and of mean_square_n
  double max_square_tail = 0;
  double max_mean_square_tail = 0;
};

inline constexpr double kCesaroBudget = 2e8;

namespace detail {

// i·φ/2π mod 1 in 64.64 fixed point, so long orbits carry no drift.
struct TurnCounter {
  unsigned __int128 step = 0;
  explicit TurnCounter(const HighFloat& phi) {
    HighFloat t = phi / (2 * boost::math::constants::pi<HighFloat>());
    t -= floor(t);
    t = ldexp(t, 128);
    const HighFloat hi = floor(ldexp(t, -64));
    const HighFloat lo = t - ldexp(hi, 64);
    step = (static_cast<unsigned __int128>(hi.convert_to<std::uint64_t>()) << 64) | lo.convert_to<std::uint64_t>();
  }
  double turns(std::uint64_t i) const {
    const unsigned __int128 v = step * i;
    return static_cast<double>(static_cast<std::uint64_t>(v >> 64) >> 11) * 0x1.0p-53;
  }
};

}  // namespace detail

/// Cesàro average of ρα^i for ρ = τ pushed to the leaf through x0. The i-th
/// term is ⟨a, α^{-i}x0⟩ · Σ_j τ_j ⟨a, π(ξ^{-i} w_j)⟩.
inline CesaroResult cesaro_character_average(const CentralFrame& fr, const Character& a, const CentralMeasure& tau,
                                             const TorusPoint& x0, std::size_t N, std::size_t window_from = 0) {
  require_probability(tau, "cesaro_character_average");
  if (static_cast<int>(x0.dim()) != fr.n() || static_cast<int>(a.size()) != fr.n())
    throw ContractError("cesaro_character_average: dimension mismatch");
  if (N == 0) throw ContractError("cesaro_character_average: N must be positive");
  if (static_cast<double>(N) * static_cast<double>(tau.size()) > kCesaroBudget)
    throw BudgetError("cesaro_character_average: N times support size exceeds budget");
  const auto n = static_cast<std::size_t>(fr.n());
  const auto s = static_cast<std::size_t>(fr.s());
  const CVector k = character_coefficients(fr, a);
  std::vector<CVector> z(tau.size(), CVector(s));
  for (std::size_t j = 0; j < tau.size(); ++j)
    for (std::size_t v = 0; v < s; ++v) z[j][v] = k[v] * tau.support[j][v];
  std::vector<detail::TurnCounter> turns;
  for (const auto& phi : fr.angles) turns.emplace_back(phi);

  const WrapMatrix inv = WrapMatrix::from(integer_inverse(fr.A));
  FixedTorusPoint x = to_fixed(x0);
  std::vector<std::uint64_t> tmp(n);
  CesaroResult r;
  r.N = N;
  std::complex<double> sum = 0;
  double sq = 0;
  CVector rot(s);
  for (std::size_t i = 0; i < N; ++i) {
    // a·x is exact modulo 1 in the 2^-64 fixed-point representation
    std::uint64_t ax = 0;
    for (std::size_t c = 0; c < n; ++c) ax += static_cast<std::uint64_t>(a[c]) * x.c[c];
    const std::complex<double> base = unit_phase(static_cast<double>(ax >> 11) * 0x1.0p-53);
    for (std::size_t v = 0; v < s; ++v) rot[v] = std::conj(unit_phase(turns[v].turns(i)));
    std::complex<double> S = 0;
    for (std::size_t j = 0; j < tau.size(); ++j) {
      double t = 0;
      for (std::size_t v = 0; v < s; ++v) t += (z[j][v] * rot[v]).real();
      S += tau.weights[j] * unit_phase(t);
    }
    sum += base * S;
    sq += std::norm(S);
    const std::size_t m = i + 1;
    if (m >= window_from) {
      r.max_square_tail = std::max(r.max_square_tail, std::norm(sum / static_cast<double>(m)));
      r.max_mean_square_tail = std::max(r.max_mean_square_tail, sq / static_cast<double>(m));
    }
    inv.apply(x.c, tmp);
    x.c.swap(tmp);
  }
  r.average = sum / static_cast<double>(N);
  r.mean_square = sq / static_cast<double>(N);
  return r;
}

}  // namespace tordyn
