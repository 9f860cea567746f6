// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [path/to/tordyn]   (the CLI is needed for criterion 14)
#include "tordyn.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tordyn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_s) {
    r.pass = false;
    r.detail += " [over time limit " + std::to_string(limit_s) + " s]";
  }
  if (!r.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", id, title, r.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

const IntPolynomial kExampleA{1, -1, -1, -1, 1};

const CentralFrame& frame_a() {
  static const CentralFrame fr = build_frame(kExampleA, 128);
  return fr;
}

// ---- 1 ----------------------------------------------------------------------

// (p + qi) with p, q rational; checks 5z^2 - 6z + 5 = 0 at z = 3/5 + 4i/5 exactly.
bool gaussian_root_check() {
  const BigRational p(3, 5), q(4, 5);
  const BigRational re = 5 * (p * p - q * q) - 6 * p + 5;
  const BigRational im = 5 * (2 * p * q) - 6 * q;
  return re == 0 && im == 0 && p * p + q * q == 1;
}

Outcome c1() {
  std::string why;
  const auto a = classify(kExampleA);
  if (!(a.irreducible && a.ergodic && !a.expansive && a.algebraic_unit && a.s0_count == 1)) why += " A wrong;";
  const auto b = classify(IntPolynomial{1, -1, -1, -1, -1, -1, 1});
  if (b.s0_count != 2) why += " sextic s0 != 2;";
  const auto c = classify(IntPolynomial{5, -6, 5});
  if (!(c.ergodic && !c.expansive && !c.algebraic_unit && c.s0_count == 1 &&
        c.finite_place_primes == std::vector<BigInt>{5}))
    why += " 5u^2-6u+5 wrong;";
  if (!gaussian_root_check()) why += " theta = 3/5 + 4i/5 not a root;";
  return {why.empty(), why.empty() ? "A: s0=1 unit ergodic nonexpansive; sextic: s0=2; 5u^2-6u+5: s0=1, primes {5}, theta=3/5+4i/5"
                                   : why};
}

// ---- 2 ----------------------------------------------------------------------

Outcome c2() {
  const auto r = classify(IntPolynomial{6, 6, 10, 3, 6});
  const bool noted = std::any_of(r.notes.begin(), r.notes.end(),
                                 [](const std::string& s) { return s.find("not self-inversive") != std::string::npos; });
  const bool ok = !r.is_self_inversive && r.s0_count == 0 && noted;
  return {ok, "is_self_inversive=" + std::string(r.is_self_inversive ? "true" : "false") +
                  ", s0_count=" + std::to_string(r.s0_count) + (noted ? ", note present" : ", note missing")};
}

// ---- 3 ----------------------------------------------------------------------

std::vector<IntPolynomial> degeneracy_fixtures() {
  std::vector<IntPolynomial> out = {
      {-1, 0, -1, 0, 1},  // u^4 - u^2 - 1
      {1, -1, -1, -1, 1},
      {1, -1, -1, -1, -1, -1, 1},
      {1, 1, 1},
      {5, -6, 5},
      {1, -3, 1},
      {-1, -1, 1},
      {1, 0, -1, 0, 1},
      {-2, 0, 1},
      {-2, 0, 0, 1},
      {-3, 0, 0, 0, 1},
      {2, 0, 0, 0, 0, 0, 1},
      {1, 0, -10, 0, 1},
      {-1, 0, 0, 1, 0, 1},
  };
  std::mt19937_64 gen(301);
  std::uniform_int_distribution<int> coef(-3, 3), deg(2, 8);
  while (out.size() < 60) {
    const int d = deg(gen);
    std::vector<BigInt> c(static_cast<std::size_t>(d) + 1);
    for (auto& v : c) v = coef(gen);
    c[static_cast<std::size_t>(d)] = 1;
    if (c[0] == 0) c[0] = -1;
    IntPolynomial f(c);
    // every third fixture substituted u -> u^2 or u^3, a common source of degeneracy
    if (out.size() % 3 == 0 && d <= 4) {
      const int k = 2 + static_cast<int>(out.size() % 2);
      std::vector<BigInt> s(static_cast<std::size_t>(k * d) + 1);
      for (int i = 0; i <= d; ++i) s[static_cast<std::size_t>(k * i)] = c[static_cast<std::size_t>(i)];
      f = IntPolynomial(s);
    }
    if (f.degree() <= 8 && is_irreducible(f)) out.push_back(f);
  }
  return out;
}

Outcome c3() {
  const auto fx = degeneracy_fixtures();
  int agree = 0, degenerate = 0;
  std::string bad;
  for (const auto& f : fx) {
    const auto r = degeneracy_by_resultant(f);
    const auto g = degeneracy_by_graeffe(f);
    if (r.degenerate == g.degenerate && (!r.degenerate || r.order == g.order))
      ++agree;
    else if (bad.empty())
      bad = " first disagreement: " + f.to_string();
    degenerate += r.degenerate;
  }
  const bool quartic = degeneracy_by_resultant(fx[0]).degenerate && degeneracy_by_graeffe(fx[0]).degenerate;
  const bool ok = agree == static_cast<int>(fx.size()) && fx.size() >= 50 && quartic;
  return {ok, std::to_string(agree) + "/" + std::to_string(fx.size()) + " agree, " + std::to_string(degenerate) +
                  " degenerate, u^4-u^2-1 " + (quartic ? "degenerate" : "NOT degenerate") + bad};
}

// ---- 4 ----------------------------------------------------------------------

Outcome c4() {
  std::mt19937_64 gen(401);
  std::uniform_int_distribution<int> coef(-5, 5), deg(2, 12);
  int match = 0, total = 0, pairs_seen = 0;
  std::string bad;
  while (total < 200) {
    const int n = deg(gen);
    std::vector<BigInt> c(static_cast<std::size_t>(n) + 1);
    const bool anti = gen() % 4 == 0;
    for (int i = 0; i <= n / 2; ++i) {
      const BigInt v = coef(gen);
      c[static_cast<std::size_t>(i)] = v;
      c[static_cast<std::size_t>(n - i)] = anti ? BigInt(-v) : v;
    }
    if (n % 2 == 0 && anti) c[static_cast<std::size_t>(n / 2)] = 0;
    if (c[0] == 0) continue;
    const IntPolynomial f(c);
    if (f.degree() != n || !is_self_inversive(f)) continue;
    ++total;
    const int sturm = count_unit_circle_roots(f).conjugate_pairs;
    // oracle: 256-bit roots of the squarefree part, upper half of the unit circle
    const IntPolynomial sq = squarefree_part(f);
    int numeric = 0;
    const HighFloat tol = pow2(-120);
    for (const auto& z : polynomial_roots(sq.coeffs(), 256))
      if (abs(abs(z) - 1) < tol && z.imag() > tol) ++numeric;
    if (numeric == sturm)
      ++match;
    else if (bad.empty())
      bad = " first mismatch: " + f.to_string() + " sturm=" + std::to_string(sturm) + " numeric=" + std::to_string(numeric);
    pairs_seen += sturm;
  }
  return {match == total, std::to_string(match) + "/" + std::to_string(total) + " match (" + std::to_string(pairs_seen) +
                              " unit-circle pairs in total)" + bad};
}

// ---- 5 ----------------------------------------------------------------------

Outcome c5() {
  const CentralFrame& fr = frame_a();
  std::mt19937_64 gen(501);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> scale(-2, 2);
  double worst_iso = 0, worst_trip = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double sc = std::pow(10.0, scale(gen));
    CVector w;
    for (int v = 0; v < fr.s(); ++v) w.emplace_back(sc * nd(gen), sc * nd(gen));
    const double nw = central_norm(fr, w);
    const auto x = lift(fr, w);
    const auto back = central_coordinates(fr, x);
    const auto wy = central_coordinates(fr, fr.A_d * x);
    worst_iso = std::max(worst_iso, std::abs(central_norm(fr, wy) - nw) / std::max(1.0, nw));
    for (int v = 0; v < fr.s(); ++v)
      worst_trip = std::max(worst_trip, std::abs(back[static_cast<std::size_t>(v)] - w[static_cast<std::size_t>(v)]) /
                                            std::max(1.0, nw));
  }
  const bool ok = worst_iso <= 1e-9 && worst_trip <= 1e-9;
  return {ok, "max |‖Aw‖-‖w‖| " + fmt(worst_iso) + ", max round trip " + fmt(worst_trip) + " (relative to max(1,‖w‖))"};
}

// ---- 6 ----------------------------------------------------------------------

Outcome c6() {
  std::string detail;
  bool ok = true;
  for (int s = 1; s <= 3; ++s) {
    const FittedConstant fit = fit_c2(s, 10, 500, 0, 1.0, 1e6);
    bool bounded = true;
    for (const auto& r : fit.rows) bounded = bounded && r.value <= fit.constant;
    const double slope = running_max_slope(fit.rows, 1e5);
    ok = ok && bounded && slope <= 0.02 && std::isfinite(fit.constant);
    detail += "s=" + std::to_string(s) + ": c2=" + fmt(fit.constant) + " slope=" + fmt(slope) + "; ";
  }
  return {ok, detail};
}

// ---- 7 ----------------------------------------------------------------------

// J0 by its power series in 256-bit arithmetic.
HighFloat bessel_j0_series(double a) {
  const HighFloat x = HighFloat(a) / 2, x2 = x * x;
  HighFloat term = 1, sum = 1;
  for (int k = 1; k < 400; ++k) {
    term *= -x2 / (HighFloat(k) * HighFloat(k));
    sum += term;
    if (abs(term) < pow2(-240)) break;
  }
  return sum;
}

Outcome c7() {
  double worst = 0;
  for (double a : {1.0, 2.404826, 10.0}) {
    const auto q = oscillatory_integral(TrigPolynomial({{1, a, 0}}));
    const double j0 = to_double(bessel_j0_series(a));
    worst = std::max(worst, std::abs(q.value - std::complex<double>(j0, 0)));
  }
  return {worst <= 1e-8, "max |I - J0| = " + fmt(worst)};
}

// ---- 8 ----------------------------------------------------------------------

Outcome c8() {
  std::mt19937_64 gen(801);
  std::uniform_int_distribution<int> kk(2, 150);
  std::uniform_real_distribution<double> logr(0, std::log(100.0));
  int holds = 0, agree = 0;
  double worst_ratio = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int s = 1 + trial % 2;
    const auto K = static_cast<std::size_t>(kk(gen));
    const double R = std::exp(logr(gen));
    const auto strategy = trial % 3 == 0 ? SeparationStrategy::grid : SeparationStrategy::greedy_random;
    const SeparatedSet set = make_separated(s, R, K, strategy, 1000 + static_cast<std::uint64_t>(trial));
    const CentralMeasure tau = CentralMeasure::uniform(set.points);
    // independent pair sum in the frame norm
    double oracle = 0;
    const double e = -1.0 / (2.0 * s);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j) {
        double d = 0;
        for (std::size_t v = 0; v < static_cast<std::size_t>(s); ++v)
          d = std::max(d, std::abs(set.points[i][v] - set.points[j][v]));
        oracle += (i == j ? 1.0 : std::min(1.0, std::pow(d, e))) / static_cast<double>(K * K);
      }
    const double got = energy_integral(tau, s);
    const double bound = 1.0 / static_cast<double>(K) + std::pow(R, e);
    agree += std::abs(got - oracle) <= 1e-12;
    holds += set.verify() && got <= bound;
    worst_ratio = std::max(worst_ratio, got / bound);
  }
  return {holds == 100 && agree == 100, std::to_string(holds) + "/100 within bound, " + std::to_string(agree) +
                                            "/100 match the pair-sum oracle, max energy/bound " + fmt(worst_ratio)};
}

// ---- 9 ----------------------------------------------------------------------

Outcome c9() {
  const CentralFrame& fr = frame_a();
  const Character a{1, 0, 0, 0};
  const SeparatedSet set = make_separated(fr, 10.0, 100, SeparationStrategy::greedy_random, 9);
  const CentralMeasure tau = CentralMeasure::uniform(set.points);
  const double ca = fit_ca(fr, a, 64, 9).constant;
  const CesaroResult r = cesaro_character_average(fr, a, tau, TorusPoint({0, 0, 0, 0}), 100000, 50000);
  const double bound = ca * (1e-2 + std::pow(10.0, -0.5)) * 2;
  return {set.verify() && r.max_square_tail <= bound,
          "limsup proxy " + fmt(r.max_square_tail) + " <= " + fmt(bound) + " (c_a = " + fmt(ca) + ")"};
}

// ---- 10 ---------------------------------------------------------------------

Outcome c10() {
  const CentralFrame& fr = frame_a();
  struct Fixture {
    Character a;
    std::vector<CVector> w;
    std::vector<double> tau;
  };
  const std::vector<Fixture> fixtures = {
      {{1, 0, 0, 0}, {{{0, 0}}, {{1.3, 0.4}}}, {0.5, 0.5}},
      {{0, 1, 0, 0}, {{{0, 0}}, {{0.2, -2.1}}, {{3, 1}}}, {0.2, 0.3, 0.5}},
      {{1, 1, 0, 0}, {{{0.5, 0.5}}, {{-0.7, 0.1}}}, {0.7, 0.3}},
      {{1, -1, 2, 0}, {{{0, 0}}, {{0.05, 0.02}}, {{0.1, -0.3}}, {{-0.2, 0}}}, {0.25, 0.25, 0.25, 0.25}},
      {{0, 0, 1, -1}, {{{2, 2}}, {{-1, 0.5}}}, {0.4, 0.6}},
  };
  double worst = 0;
  std::string detail;
  for (const auto& fx : fixtures) {
    const CentralMeasure tau(fx.w, fx.tau);
    const double ms = cesaro_character_average(fr, fx.a, tau, TorusPoint({0.1, 0.2, 0.3, 0.4}), 100000).mean_square;
    const double g = gamma_mean_square(fr, fx.a, tau);
    worst = std::max(worst, std::abs(ms - g));
    detail += fmt(ms) + " vs " + fmt(g) + "; ";
  }
  return {worst < 0.05, "max gap " + fmt(worst) + " [" + detail + "]"};
}

// ---- 11 ---------------------------------------------------------------------

// Frozen from the first certified run (Example A, ε = 0.25, seed 7, x0 = 0).
constexpr double kFrozenLemmaK = 40255334;
constexpr double kFrozenLemmaR = 6344.709134389062;
constexpr std::size_t kFrozenFirstDenseN = 16;

Outcome c11() {
  const CentralFrame& fr = frame_a();
  DensityOptions opt;
  opt.practical_R = 5;
  opt.practical_K = 100;
  const DensityReport rep = density_experiment(fr, 0.25, kPointBudget / 100, TorusPoint({0, 0, 0, 0}), 7, opt);
  bool strict = true;
  for (std::size_t i = 1; i < rep.trace.size(); ++i) strict = strict && rep.trace[i].worst_gap < rep.trace[i - 1].worst_gap;
  const std::size_t points = rep.trace.empty() ? 0 : rep.trace.back().points;
  const bool frozen = rep.lemma.K == kFrozenLemmaK && std::abs(rep.lemma.R - kFrozenLemmaR) <= 1e-9 * kFrozenLemmaR &&
                      rep.first_dense_N == kFrozenFirstDenseN;
  const bool ok = strict && rep.dense && rep.first_dense_N && points <= kPointBudget && frozen;
  std::string gaps;
  for (const auto& st : rep.trace) gaps += fmt(st.worst_gap) + " ";
  return {ok, "gaps " + gaps + "| first dense N " +
                  (rep.first_dense_N ? std::to_string(*rep.first_dense_N) : std::string("none")) + ", points " +
                  std::to_string(points) + ", lemma K " + fmt(rep.lemma.K) + ", R " + fmt(rep.lemma.R) +
                  (frozen ? "" : " (differs from frozen values)")};
}

// ---- 12 ---------------------------------------------------------------------

Outcome c12() {
  std::mt19937_64 gen(1201);
  std::uniform_int_distribution<int> dim(1, 4), atoms(1, 12);
  std::uniform_real_distribution<double> u(0, 1), pos(-5, 5), logt(std::log(1e-3), std::log(1e3));
  std::normal_distribution<double> nd;
  double worst = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto d = static_cast<std::size_t>(dim(gen));
    EuclideanMeasure rho;
    const int k = atoms(gen);
    for (int a = 0; a < k; ++a) {
      RealVector p(d);
      for (auto& x : p) x = pos(gen);
      rho.add(p, 0.05 + u(gen));
    }
    const double r = 0.5 + 3 * u(gen);
    // random orthogonal Q by Gram-Schmidt, reflections included
    std::vector<std::vector<double>> q;
    while (q.size() < d) {
      std::vector<double> v(d);
      for (auto& x : v) x = nd(gen);
      for (const auto& b : q) {
        double dot = 0;
        for (std::size_t i = 0; i < d; ++i) dot += v[i] * b[i];
        for (std::size_t i = 0; i < d; ++i) v[i] -= dot * b[i];
      }
      double nv = 0;
      for (double x : v) nv += x * x;
      nv = std::sqrt(nv);
      if (nv < 1e-8) continue;
      for (auto& x : v) x /= nv;
      q.push_back(v);
    }
    RealVector shift(d);
    for (auto& x : shift) x = pos(gen);
    auto F = [&](const RealVector& p) {
      RealVector y(shift);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) y[i] += q[i][j] * p[j];
      return y;
    };
    const double t = std::exp(logt(gen));
    const RealVector lhs = center_of_mass(rho.pushforward(F).scaled(t), r);
    const RealVector rhs = F(center_of_mass(rho, r));
    for (std::size_t i = 0; i < d; ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
  }
  return {worst <= 1e-9, "500 measures, max deviation " + fmt(worst)};
}

// ---- 13 ---------------------------------------------------------------------

Outcome c13() {
  const CentralFrame& fr = frame_a();
  const std::vector<double> radii{1, 2, 4, 8, 16};
  const double eps = std::min(0.02, tube_embedding_limit(fr, radii.back()));
  const auto haar = sample_invariant(fr, SampleKind::haar, {}, 1000000, 13);
  const auto hd = finiteness_diagnostic(estimate_leaf_profile(fr, haar, TorusPoint({0.3, 0.6, 0.1, 0.8}), radii, eps));
  const auto orb = sample_invariant(fr, SampleKind::central_orbit_closure, {}, 10000, 13);
  const TorusPoint xo = leaf_point(fr, TorusPoint({0, 0, 0, 0}), CVector{{1, 0}});
  const auto od = finiteness_diagnostic(estimate_leaf_profile(fr, orb, xo, radii, eps));
  const bool ok = hd.verdict == FinitenessVerdict::infinite_growth && std::abs(hd.exponent - 2.0 * fr.s()) <= 0.3 &&
                  od.verdict == FinitenessVerdict::finite;
  return {ok, std::string("Haar: ") + to_string(hd.verdict) + " exponent " + fmt(hd.exponent) +
                  "; orbit closure: " + to_string(od.verdict) + " (tube eps " + fmt(eps) + ")"};
}

// ---- 14 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c14(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  const fs::path dir = fs::temp_directory_path() / "tordyn_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string P = "\"u^4-u^3-u^2-u+1\"";
  const std::vector<std::string> commands = {
      "classify " + P + " --seed 1",
      "frame " + P + " --seed 1",
      "oscillatory --s 2 --M 5 --trials 100 --norm-hi 1e4 --seed 14",
      "energy --poly " + P + " --K 30 --N 20000 --fit-samples 16 --seed 14",
      "leafsim --poly " + P + " --points 50000 --seed 14",
      "tau --poly " + P + " --trials 100 --seed 14",
      "density --poly " + P + " --eps 0.25 --seed 7",
  };
  int identical = 0;
  std::string bad;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const fs::path out = dir / ("report" + std::to_string(i) + ".json");
    std::string first;
    bool ran = true;
    for (int k = 0; k < 2; ++k) {
      const std::string cmd = "\"" + cli + "\" " + commands[i] + " -o \"" + out.string() + "\"";
      if (std::system(cmd.c_str()) != 0) ran = false;
      if (k == 0) first = slurp(out);
    }
    if (ran && !first.empty() && first == slurp(out))
      ++identical;
    else if (bad.empty())
      bad = " first difference: " + commands[i];
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(commands.size()),
          std::to_string(identical) + "/" + std::to_string(commands.size()) + " subcommands byte-identical on rerun" + bad};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  criterion(1, "worked-example classification", 3, c1);
  criterion(2, "non-self-inversive quartic detected", 1, c2);
  criterion(3, "degeneracy routes agree", 30, c3);
  criterion(4, "unit-circle counting certificate", 60, c4);
  criterion(5, "central-frame isometry", 5, c5);
  criterion(6, "oscillatory decay bound", 300, c6);
  criterion(7, "s=1 Bessel cross-check", 1, c7);
  criterion(8, "energy bound", 10, c8);
  criterion(9, "limsup bound at desk scale", 120, c9);
  criterion(10, "unique-ergodicity convergence", 60, c10);
  criterion(11, "density experiment", 600, c11);
  criterion(12, "center-of-mass equivariance", 10, c12);
  criterion(13, "Haar vs orbit-closure separation", 180, c13);
  criterion(14, "reproducible reports", 300, [&] { return c14(cli); });
  std::printf("%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
