// Partition of unity by tents, their Fourier data, the (R, K) recipe and the
// ε-density experiment for truncated inverse-orbit unions.
#pragma once

#include "tordyn/harmonic.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace tordyn {

inline constexpr std::size_t kMaxPartitionCells = 1'000'000;
inline constexpr std::size_t kMaxProbeCells = 20'000'000;

/// Tensor-product tents on the grid (Z/m)^n, half-width h = 1/m in every
/// coordinate, so each support has sup-norm diameter 2h <= ε.
struct PartitionOfUnity {
  int n = 0;
  std::size_t m = 0;  // grid points per axis
  double h = 0;
  double epsilon = 0;

  std::size_t count() const {
    std::size_t c = 1;
    for (int i = 0; i < n; ++i) c *= m;
    return c;
  }
  double l1_norm() const { return std::pow(h, n); }
  double support_diameter() const { return 2 * h; }

  std::vector<std::size_t> index(std::size_t i) const {
    std::vector<std::size_t> k(static_cast<std::size_t>(n));
    for (auto& v : k) {
      v = i % m;
      i /= m;
    }
    return k;
  }
  std::vector<double> center(std::size_t i) const {
    std::vector<double> c;
    for (auto k : index(i)) c.push_back(static_cast<double>(k) * h);
    return c;
  }
  double value(std::size_t i, const std::vector<double>& x) const {
    const auto c = center(i);
    double v = 1;
    for (std::size_t j = 0; j < c.size(); ++j) {
      double d = std::abs(x[j] - c[j]);
      d -= std::floor(d);
      d = std::min(d, 1 - d);
      v *= std::max(0.0, 1 - d / h);
    }
    return v;
  }
};

inline PartitionOfUnity build_partition(double epsilon, int n) {
  if (!(epsilon > 0 && epsilon <= 0.5)) throw ContractError("build_partition: ε must lie in (0, 1/2]");
  if (n < 1) throw ContractError("build_partition: dimension must be positive");
  PartitionOfUnity p;
  p.n = n;
  p.epsilon = epsilon;
  p.m = static_cast<std::size_t>(std::ceil(2 / epsilon - 1e-12));
  p.h = 1.0 / static_cast<double>(p.m);
  if (std::pow(static_cast<double>(p.m), n) > static_cast<double>(kMaxPartitionCells))
    throw BudgetError("build_partition: more than 1e6 tents");
  return p;
}

inline PartitionOfUnity build_partition(const CentralFrame& fr, double epsilon) {
  return build_partition(epsilon, fr.n());
}

namespace detail {

// Fourier coefficient of the periodized 1-d tent of half-width h at 0.
inline double tent_coefficient(long long k, double h) {
  if (k == 0) return h;
  const double t = static_cast<double>(k) * h;
  if (std::abs(t - std::round(t)) < 1e-12) return 0;
  const double x = std::numbers::pi * static_cast<double>(k) * h;
  const double s = std::sin(x) / x;
  return h * s * s;
}

// Σ_{|k|<=L} of the 1-d coefficients; the full sum is the peak value 1.
inline double tent_partial_mass(long long L, double h) {
  long double sum = h;
  for (long long k = 1; k <= L; ++k) sum += 2.0L * tent_coefficient(k, h);
  return static_cast<double>(sum);
}

}  // namespace detail

/// Truncated Fourier series of one tent, kept in product form. Frequencies
/// run over the box |a_j| <= cutoff; coefficients that vanish identically
/// are left out of Ξ.
struct TentFourier {
  std::vector<double> center;
  double h = 0;
  long long cutoff = 0;
  double sup_error = 0;  // certified bound on ‖f - f̃‖_∞
  double probe_error = 0;  // largest error seen on the probe points
  double tolerance = 0;

  int n() const { return static_cast<int>(center.size()); }

  std::complex<double> coefficient(const std::vector<long long>& a) const {
    if (static_cast<int>(a.size()) != n()) throw ContractError("tent coefficient: dimension mismatch");
    double mag = 1, phase = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (std::llabs(a[j]) > cutoff) return 0;
      mag *= detail::tent_coefficient(a[j], h);
      phase -= static_cast<double>(a[j]) * center[j];
    }
    return mag * unit_phase(phase);
  }

  /// Number of frequencies per axis with a nonzero coefficient.
  long long axis_support() const {
    long long c = 0;
    for (long long k = -cutoff; k <= cutoff; ++k) c += detail::tent_coefficient(k, h) != 0.0;
    return c;
  }
  double xi_size() const { return std::pow(static_cast<double>(axis_support()), n()); }

  /// Σ_{a∈Ξ} |u_a|; the coefficients are nonnegative multiples of phases.
  double coefficient_mass() const { return std::pow(detail::tent_partial_mass(cutoff, h), n()); }

  double evaluate(const std::vector<double>& x) const {
    double v = 1;
    for (int j = 0; j < n(); ++j) {
      // e^{2πik(x-c)} by rotation, resynchronized every 4096 steps
      const std::complex<double> step = unit_phase(x[j] - center[j]);
      std::complex<double> z = 1;
      long double s = h;
      for (long long k = 1; k <= cutoff; ++k) {
        z = (k % 4096 == 0) ? unit_phase(static_cast<double>(k) * (x[j] - center[j])) : z * step;
        s += 2.0L * detail::tent_coefficient(k, h) * z.real();
      }
      v *= static_cast<double>(s);
    }
    return v;
  }
};

inline constexpr long long kMaxFourierCutoff = 1LL << 31;

/// Smallest cutoff >= `cutoff` whose truncation error is below `tolerance`
/// (default ‖f‖_1 / 100). In one variable the error is largest at the peak,
/// where it equals the dropped coefficient mass; with factors bounded by 1
/// the product error is at most n times that.
inline TentFourier fourier_approximate(const std::vector<double>& center, double h, long long cutoff,
                                       std::optional<double> tolerance = std::nullopt) {
  if (cutoff < 1) throw ContractError("fourier_approximate: cutoff must be at least 1");
  if (!(h > 0 && h <= 1)) throw ContractError("fourier_approximate: tent half-width must lie in (0, 1]");
  if (center.empty()) throw ContractError("fourier_approximate: empty center");
  TentFourier t;
  t.center = center;
  t.h = h;
  const int n = static_cast<int>(center.size());
  t.tolerance = tolerance.value_or(std::pow(h, n) / 100);
  const bool constant = std::abs(h - 1.0) < 1e-15;  // only a = 0 survives
  // the dropped mass behaves like 1/(π² h L); refuse early when the cap is clearly too small
  if (!constant && n / (std::numbers::pi * std::numbers::pi * h * t.tolerance) > 4.0 * kMaxFourierCutoff)
    throw BudgetError("fourier_approximate: cutoff cap reached");
  // one pass upward: the dropped mass 1 - Σ_{|k|<=L} decreases in L
  long double mass = h;
  long long L = 0;
  auto err = [&] { return constant ? 0.0 : n * std::max(0.0, static_cast<double>(1.0L - mass)); };
  while (L < cutoff || err() >= t.tolerance) {
    if (L >= kMaxFourierCutoff) throw BudgetError("fourier_approximate: cutoff cap reached");
    ++L;
    mass += 2.0L * detail::tent_coefficient(L, h);
  }
  t.cutoff = L;
  t.sup_error = err();
  // probe: the peak (where the error is extremal) and a few offsets
  if (L * n <= 50'000'000) {
    for (double off : {0.0, h / 3, h, 0.5}) {
      std::vector<double> x = center;
      for (auto& v : x) v += off;
      const double f = h >= 1 ? 1.0 : off < h ? std::pow(1 - off / h, n) : 0.0;
      t.probe_error = std::max(t.probe_error, std::abs(t.evaluate(x) - f));
    }
    if (t.probe_error >= t.tolerance) throw ConvergenceError("fourier_approximate: probe error exceeds tolerance");
  }
  return t;
}

inline TentFourier fourier_approximate(const PartitionOfUnity& p, std::size_t i, long long cutoff = 1,
                                       std::optional<double> tolerance = std::nullopt) {
  return fourier_approximate(p.center(i), p.h, cutoff, tolerance);
}

struct CharacterConstant {
  Character a;
  double c = 0;
};

/// (R, K) from ε. c_a is fitted for a in the core box |a_j| <= core_cutoff;
/// beyond it the constant is bounded by norm_hi^{1/2s}, the largest value
/// max(1,‖w‖^{1/2s})·|avg| can take on the fitting domain.
struct RKResult {
  double epsilon = 0;
  int s = 0;
  double K_real = 0;
  double K = 0;        // ceil(K_real)
  double R = 0;        // K^{1/2s}
  double R_rounded = 0;  // ceil(R), used for separation
  long long xi_cutoff = 0;
  double xi_size = 0;
  double tent_l1 = 0;
  double fourier_error = 0;
  long long core_cutoff = 0;
  double c_tail = 0;
  double core_sum = 0;  // Σ_{core∖0} |u_a| c_a
  double tail_mass = 0;  // Σ_{Ξ∖core} |u_a|
  std::vector<CharacterConstant> constants;
  std::size_t fit_samples = 0;
  std::uint64_t seed = 0;
};

struct RKOptions {
  long long core_cutoff = 1;
  std::size_t fit_samples = 64;
  double norm_hi = 1e4;
  // replaces the in-process fit when set, e.g. a sidecar cache
  std::function<double(const Character&)> constant_source;
};

/// All characters of the core box, one of each ±a pair (|avg| is even in a).
inline std::vector<Character> core_characters(int n, long long cutoff) {
  std::vector<Character> out;
  Character a(static_cast<std::size_t>(n), -cutoff);
  for (;;) {
    const auto first = std::find_if(a.begin(), a.end(), [](long long v) { return v != 0; });
    if (first != a.end() && *first > 0) out.push_back(a);
    std::size_t j = 0;
    while (j < a.size() && ++a[j] > cutoff) a[j++] = -cutoff;
    if (j == a.size()) break;
  }
  return out;
}

inline RKResult compute_R_K(const CentralFrame& fr, double epsilon, std::uint64_t seed, const RKOptions& opt = {}) {
  if (!gamma_is_full_torus(fr)) throw ContractError("compute_R_K: central roots are not multiplicatively independent");
  if (opt.core_cutoff < 1) throw ContractError("compute_R_K: core cutoff must be at least 1");
  const PartitionOfUnity part = build_partition(fr, epsilon);
  // every tent is a translate of tent 0, so |u_{i,a}| and the max over i do not depend on i
  const TentFourier tf = fourier_approximate(part, 0, opt.core_cutoff);
  RKResult r;
  r.epsilon = epsilon;
  r.s = fr.s();
  r.xi_cutoff = tf.cutoff;
  r.xi_size = tf.xi_size();
  r.tent_l1 = part.l1_norm();
  r.fourier_error = tf.sup_error;
  r.core_cutoff = std::min(opt.core_cutoff, tf.cutoff);
  r.fit_samples = opt.fit_samples;
  r.seed = seed;
  r.c_tail = std::pow(opt.norm_hi, 1.0 / (2.0 * fr.s()));
  for (const auto& a : core_characters(fr.n(), r.core_cutoff)) {
    const double c = opt.constant_source ? opt.constant_source(a) : fit_ca_cached(fr, a, opt.fit_samples, seed, 1.0, opt.norm_hi);
    r.constants.push_back({a, c});
    r.core_sum += 2 * std::abs(tf.coefficient(a)) * c;  // a and -a
  }
  const double core_mass = std::pow(detail::tent_partial_mass(r.core_cutoff, part.h), fr.n());
  r.tail_mass = std::max(0.0, tf.coefficient_mass() - core_mass);
  r.K_real = 100 * (r.core_sum + r.c_tail * r.tail_mass) / r.tent_l1;
  r.K = std::ceil(r.K_real);
  r.R = std::pow(r.K, 1.0 / (2.0 * fr.s()));
  r.R_rounded = std::ceil(r.R);
  return r;
}

struct DensityCheck {
  bool dense = false;  // worst_gap <= 3ε/4, which certifies ε-density
  bool centers_within_eps = false;
  double worst_gap = 0;
  std::vector<double> witness;  // probe center attaining worst_gap
  double probe_spacing = 0;
  std::size_t probe_cells = 0;
};

/// Nearest-point queries from the probe-cell centers of a grid of spacing
/// at most ε/(2√n), points bucketed by the same grid.
class DensityChecker {
 public:
  DensityChecker(int n, double epsilon, int refine = 1) : n_(n), eps_(epsilon) {
    if (n < 1) throw ContractError("density check: dimension must be positive");
    if (!(epsilon > 0)) throw ContractError("density check: ε must be positive");
    if (refine < 1) throw ContractError("density check: refine must be positive");
    m_ = static_cast<std::size_t>(std::ceil(2 * std::sqrt(double(n)) / epsilon - 1e-12)) * static_cast<std::size_t>(refine);
    if (std::pow(static_cast<double>(m_), n) > static_cast<double>(kMaxProbeCells))
      throw BudgetError("density check: probe grid exceeds the memory cap");
    cells_ = 1;
    for (int i = 0; i < n; ++i) cells_ *= m_;
  }

  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(n_); }
  std::size_t probe_cells() const { return cells_; }
  double spacing() const { return 1.0 / static_cast<double>(m_); }

  void add(const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != n_) throw ContractError("density check: dimension mismatch");
    for (double v : x) {
      double c = v - std::floor(v);
      if (c >= 1.0) c = 0.0;
      coords_.push_back(static_cast<float>(c));
    }
  }

  DensityCheck evaluate() const {
    if (size() == 0) throw ContractError("density check: need at least one point");
    const auto n = static_cast<std::size_t>(n_);
    const std::size_t N = size();
    // counting sort of points into buckets, about one point per bucket
    std::size_t mb = 1;
    while (mb < m_ && std::pow(static_cast<double>(mb + 1), n_) <= static_cast<double>(N)) ++mb;
    std::size_t buckets = 1;
    for (std::size_t j = 0; j < n; ++j) buckets *= mb;
    std::vector<std::uint32_t> start(buckets + 1, 0);
    std::vector<std::size_t> cell_of(N);
    for (std::size_t p = 0; p < N; ++p) {
      cell_of[p] = bucket_index(&coords_[p * n], mb);
      ++start[cell_of[p] + 1];
    }
    for (std::size_t c = 0; c < buckets; ++c) start[c + 1] += start[c];
    std::vector<float> sorted(coords_.size());
    {
      std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
      for (std::size_t p = 0; p < N; ++p) {
        const std::size_t q = fill[cell_of[p]]++;
        std::copy_n(&coords_[p * n], n, &sorted[q * n]);
      }
    }
    const double db = 1.0 / static_cast<double>(mb);
    std::vector<long long> home(n);
    const double d = spacing();
    const bool brute = static_cast<double>(N) * static_cast<double>(cells_) <= 5e7;
    DensityCheck out;
    out.probe_spacing = d;
    out.probe_cells = cells_;
    std::vector<long long> idx(n, 0), off(n);
    std::vector<double> center(n);
    for (std::size_t c = 0; c < cells_; ++c) {
      for (std::size_t j = 0; j < n; ++j) center[j] = (static_cast<double>(idx[j]) + 0.5) * d;
      double best = std::numeric_limits<double>::infinity();
      if (brute) {
        for (std::size_t p = 0; p < N; ++p) best = std::min(best, dist2(&sorted[p * n], center));
      } else {
        for (std::size_t j = 0; j < n; ++j)
          home[j] = std::min(static_cast<long long>(center[j] * static_cast<double>(mb)), static_cast<long long>(mb) - 1);
        const long long rmax = static_cast<long long>(mb / 2);
        for (long long r = 0; r <= rmax; ++r) {
          const double lower = std::max(0.0, static_cast<double>(r - 1) * db);
          if (lower * lower >= best) break;
          scan_ring(home, r, mb, start, sorted, center, best, off);
        }
      }
      const double g = std::sqrt(best);
      if (c == 0 || g > out.worst_gap) {
        out.worst_gap = g;
        out.witness = center;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (++idx[j] < static_cast<long long>(m_)) break;
        idx[j] = 0;
      }
    }
    out.dense = out.worst_gap <= 0.75 * eps_;
    out.centers_within_eps = out.worst_gap <= eps_;
    return out;
  }

 private:
  std::size_t bucket_index(const float* x, std::size_t mb) const {
    std::size_t c = 0;
    for (int j = n_ - 1; j >= 0; --j) {
      auto k = static_cast<std::size_t>(static_cast<double>(x[j]) * static_cast<double>(mb));
      if (k >= mb) k = mb - 1;
      c = c * mb + k;
    }
    return c;
  }

  double dist2(const float* p, const std::vector<double>& c) const {
    double s = 0;
    for (int j = 0; j < n_; ++j) {
      double v = std::abs(static_cast<double>(p[j]) - c[j]);
      v = std::min(v, 1.0 - v);
      s += v * v;
    }
    return s;
  }

  // all cells at Chebyshev offset exactly r from idx (with wrap-around)
  void scan_ring(const std::vector<long long>& idx, long long r, std::size_t mb, const std::vector<std::uint32_t>& start,
                 const std::vector<float>& sorted, const std::vector<double>& center, double& best,
                 std::vector<long long>& off) const {
    const auto n = static_cast<std::size_t>(n_);
    const auto m = static_cast<long long>(mb);
    std::fill(off.begin(), off.end(), -r);
    for (;;) {
      bool on_ring = false;
      for (auto o : off) on_ring = on_ring || std::llabs(o) == r;
      if (on_ring) {
        std::size_t c = 0;
        for (std::size_t j = n; j-- > 0;) c = c * mb + static_cast<std::size_t>(((idx[j] + off[j]) % m + m) % m);
        for (std::uint32_t p = start[c]; p < start[c + 1]; ++p) best = std::min(best, dist2(&sorted[p * n], center));
      }
      std::size_t j = 0;
      while (j < n && ++off[j] > r) off[j++] = -r;
      if (j == n) break;
    }
  }

  int n_;
  double eps_;
  std::size_t m_ = 0;
  std::size_t cells_ = 0;
  std::vector<float> coords_;
};

inline DensityCheck check_epsilon_density(const std::vector<TorusPoint>& points, double epsilon, int refine = 1) {
  if (points.empty()) throw ContractError("check_epsilon_density: need at least one point");
  DensityChecker ch(static_cast<int>(points.front().dim()), epsilon, refine);
  for (const auto& p : points) ch.add(p.coords);
  return ch.evaluate();
}

struct DensityStep {
  std::size_t N = 0;
  std::size_t points = 0;
  double worst_gap = 0;
  bool dense = false;
  std::size_t empty_tents = 0;
};

struct ProofStepCheck {
  Character a;
  double measured = 0;  // |∫⟨a,x⟩dρ_N|²
  double bound = 0;     // 2 c_a (1/K + R^{-1/2s}) · 1.5
};

struct DensityReport {
  double epsilon = 0;
  int s = 0;
  std::string mode;  // "practical" or "lemma"
  double R = 0;
  std::size_t K = 0;
  RKResult lemma;
  std::size_t N_max = 0;
  std::size_t N_used = 0;
  std::optional<std::size_t> first_dense_N;
  std::optional<std::size_t> first_positive_N;  // every tent carries mass
  bool dense = false;
  double worst_gap = 0;
  std::vector<double> witness;
  std::vector<DensityStep> trace;
  double min_tent_mass_ratio = 0;  // min_i ∫f_i dρ_N / ‖f_i‖_1
  std::vector<ProofStepCheck> proof_steps;
  std::vector<double> x0;
  std::uint64_t seed = 0;
  double probe_spacing = 0;
  std::vector<TorusPoint> cloud;  // only when requested
};

struct DensityOptions {
  std::optional<double> practical_R;  // both set: practical mode
  std::optional<std::size_t> practical_K;
  RKOptions rk;
  std::size_t point_budget = kPointBudget;
  bool keep_cloud = false;
};

/// Doubles N from 1 to N_max, checking ε-density of ∪_{n<=N} α^{-n}(π(A) + x0)
/// at each step. Runs on past the first dense N until every tent of the
/// partition has positive mass, or N_max.
inline DensityReport density_experiment(const CentralFrame& fr, double epsilon, std::size_t N_max,
                                        const TorusPoint& x0, std::uint64_t seed, const DensityOptions& opt = {}) {
  if (N_max < 1) throw ContractError("density_experiment: N_max must be positive");
  if (static_cast<int>(x0.dim()) != fr.n()) throw ContractError("density_experiment: dimension mismatch");
  DensityReport rep;
  rep.epsilon = epsilon;
  rep.s = fr.s();
  rep.N_max = N_max;
  rep.x0 = x0.coords;
  rep.seed = seed;
  rep.lemma = compute_R_K(fr, epsilon, seed, opt.rk);
  if (opt.practical_R.has_value() != opt.practical_K.has_value())
    throw ContractError("density_experiment: practical mode needs both R and K");
  if (opt.practical_R) {
    if (!(*opt.practical_R > 0) || *opt.practical_K < 1) throw ContractError("density_experiment: R and K must be positive");
    rep.mode = "practical";
    rep.R = *opt.practical_R;
    rep.K = *opt.practical_K;
  } else {
    rep.mode = "lemma";
    rep.R = rep.lemma.R_rounded;
    if (rep.lemma.K > static_cast<double>(opt.point_budget))
      throw BudgetError("density_experiment: lemma K = " + std::to_string(rep.lemma.K) + " exceeds the point budget");
    rep.K = static_cast<std::size_t>(rep.lemma.K);
  }
  if (static_cast<double>(rep.K) * static_cast<double>(N_max) > static_cast<double>(opt.point_budget))
    throw BudgetError("density_experiment: K * N_max exceeds the point budget");

  const SeparatedSet set = make_separated(fr, rep.R, rep.K, SeparationStrategy::greedy_random, seed);
  const PartitionOfUnity part = build_partition(fr, epsilon);
  DensityChecker checker(fr.n(), epsilon);
  rep.probe_spacing = checker.spacing();
  std::vector<double> tent_mass(part.count(), 0.0);
  std::size_t empty_tents = part.count();
  std::vector<CharacterConstant> probes = rep.lemma.constants;
  std::vector<std::complex<double>> fourier(probes.size(), 0.0);
  const auto n = static_cast<std::size_t>(fr.n());

  auto visit = [&](std::size_t, std::size_t, const TorusPoint& p) {
    checker.add(p.coords);
    // tents whose support contains p: two grid neighbours per axis
    std::vector<std::size_t> lo(n);
    std::vector<double> wlo(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double u = p.coords[j] * static_cast<double>(part.m);
      const double f = std::floor(u);
      lo[j] = static_cast<std::size_t>(f) % part.m;
      wlo[j] = 1 - (u - f);
    }
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
      std::size_t i = 0;
      double v = 1;
      for (std::size_t j = n; j-- > 0;) {
        const bool up = (mask >> j) & 1;
        i = i * part.m + (up ? (lo[j] + 1) % part.m : lo[j]);
        v *= up ? 1 - wlo[j] : wlo[j];
      }
      if (v > 0 && tent_mass[i] == 0) --empty_tents;
      tent_mass[i] += v;
    }
    for (std::size_t q = 0; q < probes.size(); ++q) fourier[q] += eval_character(probes[q].a, p);
    if (opt.keep_cloud) rep.cloud.push_back(p);
  };

  std::size_t done = 0;
  for (std::size_t N = 1;; N = std::min(2 * N, N_max)) {
    for_each_inverse_orbit_point(fr, set, x0, done + 1, N, visit);
    done = N;
    const DensityCheck chk = checker.evaluate();
    rep.trace.push_back({N, checker.size(), chk.worst_gap, chk.dense, empty_tents});
    rep.N_used = N;
    rep.worst_gap = chk.worst_gap;
    rep.witness = chk.witness;
    rep.dense = chk.dense;
    if (chk.dense && !rep.first_dense_N) rep.first_dense_N = N;
    if (empty_tents == 0 && !rep.first_positive_N) rep.first_positive_N = N;
    if ((chk.dense && empty_tents == 0) || N == N_max) break;
  }

  const double total = static_cast<double>(checker.size());
  rep.min_tent_mass_ratio = std::numeric_limits<double>::infinity();
  for (double m : tent_mass) rep.min_tent_mass_ratio = std::min(rep.min_tent_mass_ratio, m / total / part.l1_norm());
  const double energy_bound = 1.0 / static_cast<double>(rep.K) + std::pow(rep.R, -1.0 / (2.0 * fr.s()));
  for (std::size_t q = 0; q < probes.size(); ++q)
    rep.proof_steps.push_back({probes[q].a, std::norm(fourier[q] / total), 2 * probes[q].c * energy_bound * 1.5});
  return rep;
}

}  // namespace tordyn
