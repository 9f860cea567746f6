#include "tordyn/harmonic.hpp"

#include "catch_amalgamated.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace tordyn;

namespace {

const CentralFrame& frame_a() {
  static const CentralFrame fr = build_frame(IntPolynomial{1, -1, -1, -1, 1}, 128);
  return fr;
}

// Power series of J0 summed in 256-bit arithmetic.
double bessel_j0_series(double a) {
  const HighFloat x = HighFloat(a) / 2;
  const HighFloat x2 = x * x;
  HighFloat term = 1, sum = 1;
  for (int k = 1; k < 400; ++k) {
    term *= -x2 / (HighFloat(k) * HighFloat(k));
    sum += term;
    if (abs(term) < pow2(-240)) break;
  }
  return to_double(sum);
}

// Plain trapezoid with direct cos/sin evaluation, no tables.
std::complex<double> naive_integral(const TrigPolynomial& p, std::size_t N) {
  std::complex<double> sum = 0;
  for (std::size_t j = 0; j < N; ++j) {
    const double v = p(static_cast<double>(j) / static_cast<double>(N));
    sum += std::complex<double>(std::cos(v), std::sin(v));
  }
  return sum / static_cast<double>(N);
}

}  // namespace

TEST_CASE("eval_character", "[harmonic]") {
  const TorusPoint x({0.5, 0.25, 0.125});
  CHECK(eval_character({0, 0, 0}, x) == std::complex<double>(1, 0));
  CHECK(std::abs(eval_character({1, 0, 0}, x) - std::complex<double>(-1, 0)) < 1e-15);
  CHECK(std::abs(eval_character({0, 1, 0}, x) - std::complex<double>(0, 1)) < 1e-15);
  std::mt19937_64 gen(61);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<long long> k(-50, 50);
  for (int i = 0; i < 100; ++i) {
    const TorusPoint y({u(gen), u(gen), u(gen)});
    CHECK(std::abs(std::abs(eval_character({k(gen), k(gen), k(gen)}, y)) - 1.0) < 1e-14);
  }
  CHECK_THROWS_AS(eval_character({1, 2}, x), ContractError);
}

TEST_CASE("trig polynomial invariants", "[harmonic]") {
  CHECK_THROWS_AS(TrigPolynomial({{2, 1, 0}, {1, 1, 0}}), ContractError);
  CHECK_THROWS_AS(TrigPolynomial({{0, 1, 0}}), ContractError);
  const TrigPolynomial p({{1, 3, 4}, {5, 1, 0}});
  CHECK(p.norm() == 5.0);
  CHECK(p.M() == 5);
  CHECK(TrigPolynomial().norm() == 0.0);
}

TEST_CASE("oscillatory_integral", "[harmonic]") {
  CHECK(oscillatory_integral(TrigPolynomial(), 64).value == std::complex<double>(1, 0));
  for (double a : {1.0, 2.404826, 10.0, 50.0}) {
    const auto q = oscillatory_integral(TrigPolynomial({{1, a, 0}}), 256);
    CHECK(std::abs(q.value - bessel_j0_series(a)) < 1e-12);
    CHECK(q.error < 1e-12);
  }
  CHECK(std::abs(oscillatory_integral(TrigPolynomial({{1, 2.404826, 0}}), 64).value) < 1e-6);

  // against a table-free trapezoid and under conjugation symmetry
  Rng rng(62);
  for (int i = 0; i < 20; ++i) {
    const TrigPolynomial p = random_trig_polynomial(1 + i % 3, 7, rng.log_uniform(1, 300), rng);
    const auto q = oscillatory_integral(p);
    CHECK(std::abs(q.value - naive_integral(p, 1 << 16)) < 1e-11);
    const auto c = oscillatory_integral(p.scaled(-1));
    CHECK(std::abs(c.value - std::conj(q.value)) < 1e-12);
  }
  CHECK_THROWS_AS(oscillatory_integral(TrigPolynomial({{3, 1, 0}}), 100), ContractError);
  // too few nodes for the phase is refused rather than reported
  CHECK_THROWS_AS(oscillatory_integral(TrigPolynomial({{1, 5000, 0}}), 64), ConvergenceError);
}

TEST_CASE("oscillatory decay is bounded by the fitted constant", "[harmonic][property]") {
  const auto fit = fit_c2(1, 1, 200, 3);
  for (const auto& r : fit.rows) CHECK(r.value <= r.bound * std::sqrt(r.norm) + 1e-15);
  // oracle: sup of |J0(a)|·sqrt(a) over a log sweep of [1, 1e6]
  double sup = 0;
  for (double la = 0; la <= std::log(1e6); la += 1e-4) {
    const double a = std::exp(la);
    sup = std::max(sup, std::abs(std::cyl_bessel_j(0.0, a)) * std::sqrt(a));
  }
  CHECK(sup == Catch::Approx(std::sqrt(2 / std::numbers::pi)).epsilon(1e-4));
  CHECK(fit.constant <= sup + 1e-6);
  CHECK(fit.constant > 0.78);
  CHECK(fit_c2(1, 1, 200, 3).constant == fit.constant);
  CHECK_THROWS_AS(fit_c2(1, 1, 99, 3), ContractError);

  // scaling family: the normalized value stays under the constant fitted for it
  const TrigPolynomial base({{1, 0.6, 0.2}, {3, -0.3, 0.5}});
  const auto fam = fit_c2(2, 3, 100, 4, 1, 1e4);
  for (double lam = 1; lam <= 1e4; lam *= 3.7) {
    const TrigPolynomial p = base.scaled(lam / base.norm());
    const double v = std::abs(oscillatory_integral(p).value) * std::pow(p.norm(), 0.25);
    CHECK(v <= 2 * fam.constant);
  }
}

TEST_CASE("van der Corput bound", "[harmonic][property]") {
  // φ(t) = B t² on [1, 2] has φ' ≥ 2B and monotone
  for (double B : {5.0, 40.0, 300.0}) {
    auto re = [B](double t) { return std::cos(B * t * t); };
    auto im = [B](double t) { return std::sin(B * t * t); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double er = 0, ei = 0;
    const double ir = GK::integrate(re, 1.0, 2.0, 12, 1e-10, &er);
    const double ii = GK::integrate(im, 1.0, 2.0, 12, 1e-10, &ei);
    CHECK(er + ei < 1e-9);
    CHECK(std::hypot(ir, ii) <= 4.0 / (2 * B) + er + ei);
  }
}

TEST_CASE("sublevel_measure", "[harmonic]") {
  const TrigPolynomial c({{1, 1, 0}});
  CHECK(std::abs(sublevel_measure(c, std::numbers::pi, 30000) - 1.0 / 3) < 1e-4);
  // arcsine oracle: |sin 2πt| < y on a set of measure 2·asin(y)/π
  for (double y : {0.1, 0.5, 0.9}) {
    const double oracle = 2 * std::asin(y) / std::numbers::pi;
    CHECK(std::abs(sublevel_measure(c, 2 * std::numbers::pi * y, 100000) - oracle) < 1e-4);
  }
  CHECK(sublevel_measure(c, 1e9, 10000) == 1.0);
  CHECK(sublevel_measure(c, 0.0, 10000) == 0.0);
  CHECK_THROWS_AS(sublevel_measure(c, 1.0, 100), ContractError);
}

TEST_CASE("estimate_A_s", "[harmonic]") {
  // exhaustive oracle for s = 1: sup over (-1,1) of |a0 + a1 t| is |a0| + |a1|
  double oracle = 2;
  for (int i = -100; i <= 100; ++i)
    for (int j = -100; j <= 100; ++j) {
      const double a0 = i / 100.0, a1 = j / 100.0;
      if (std::max(std::abs(a0), std::abs(a1)) == 1.0) oracle = std::min(oracle, std::abs(a0) + std::abs(a1));
    }
  CHECK(estimate_A_s(1, 8) == Catch::Approx(oracle));
  // Chebyshev witness T3/4 = t³ - 3t/4 has sup 1/4
  const double a2 = estimate_A_s(2, 8);
  CHECK(a2 > 0);
  CHECK(a2 <= 0.25 + 1e-9);
  for (int s = 1; s <= 3; ++s) {
    double prev = 2;
    for (std::size_t g : {1u, 2u, 4u, 8u}) {
      const double v = estimate_A_s(s, g);
      CHECK(v > 0);
      CHECK(v <= 1.0);
      CHECK(v <= prev);
      prev = v;
    }
  }
  CHECK_THROWS_AS(estimate_A_s(4, 2), ContractError);
}

TEST_CASE("gamma_character_average", "[harmonic]") {
  const auto& fr = frame_a();
  CHECK(gamma_character_average(fr, {1, 0, 0, 0}, CVector{{0, 0}}).value == std::complex<double>(1, 0));
  CHECK(std::abs(gamma_character_average(fr, {0, 0, 0, 0}, CVector{{3, 7}}).value - 1.0) < 1e-15);
  // one central place: the average is J0(2π|k w|)
  const CVector k = character_coefficients(fr, {2, -1, 0, 3});
  Rng rng(63);
  for (int i = 0; i < 20; ++i) {
    const CVector w = random_central_vector(1, 1, 1e3, rng);
    const auto q = gamma_character_average(fr, {2, -1, 0, 3}, w);
    const double oracle = std::cyl_bessel_j(0.0, 2 * std::numbers::pi * std::abs(k[0] * w[0]));
    CHECK(std::abs(q.value - oracle) < 1e-9);
  }
  // k_v reproduces the lifted character phase
  const CVector w{{0.3, -1.7}};
  double direct = 0;
  const auto l = lift(fr, w);
  const Character a{2, -1, 0, 3};
  for (std::size_t i = 0; i < 4; ++i) direct += static_cast<double>(a[i]) * l[i];
  CHECK(std::abs(direct - (k[0] * w[0]).real()) < 1e-12);

  // a degenerate frame (roots ±√θ) is refused
  const CentralFrame deg = build_frame(IntPolynomial{1, 0, -1, 0, -1, 0, -1, 0, 1}, 128);
  CHECK_THROWS_AS(gamma_character_average(deg, {1, 0, 0, 0, 0, 0, 0, 0}, CVector{{1, 0}, {1, 0}}), ContractError);
}

TEST_CASE("gamma average on two central places", "[harmonic]") {
  const CentralFrame fr = build_frame(IntPolynomial{1, -1, -1, -1, -1, -1, 1}, 128);
  REQUIRE(fr.s() == 2);
  const Character a{1, 0, 0, 0, 0, 0};
  const CVector k = character_coefficients(fr, a);
  Rng rng(64);
  for (int i = 0; i < 10; ++i) {
    const CVector w = random_central_vector(2, 1, 100, rng);
    const auto q = gamma_character_average(fr, a, w);
    const double oracle = std::cyl_bessel_j(0.0, 2 * std::numbers::pi * std::abs(k[0] * w[0])) *
                          std::cyl_bessel_j(0.0, 2 * std::numbers::pi * std::abs(k[1] * w[1]));
    CHECK(std::abs(q.value - oracle) < 1e-9);
  }
}

TEST_CASE("fit_ca", "[harmonic]") {
  const auto& fr = frame_a();
  const Character a{1, 0, 0, 0};
  const auto fit = fit_ca(fr, a, 200, 7);
  for (const auto& r : fit.rows) CHECK(r.value <= r.bound * std::max(1.0, std::sqrt(r.norm)) + 1e-15);
  const CVector probe{{1e4, 0}};
  const double at_probe = std::abs(gamma_character_average(fr, a, probe).value);
  CHECK(at_probe <= fit.constant * std::pow(1e4, -0.5));
  CHECK(fit_ca(fr, a, 200, 7).constant == fit.constant);
  CHECK(fit_ca(fr, a, 200, 8).constant != fit.constant);
  CHECK_THROWS_AS(fit_ca(fr, {0, 0, 0, 0}, 10, 7), ContractError);
}

TEST_CASE("energy_integral", "[harmonic]") {
  CHECK(energy_integral(CentralMeasure({CVector{{2, 3}}}, {1.0}), 1) == 1.0);
  for (double d : {1.0, 4.0, 100.0}) {
    const CentralMeasure two({CVector{{0, 0}}, CVector{{d, 0}}}, {0.5, 0.5});
    CHECK(energy_integral(two, 1) == Catch::Approx(0.5 + 0.5 / std::sqrt(d)));
    CHECK(energy_integral(two, 2) == Catch::Approx(0.5 + 0.5 * std::pow(d, -0.25)));
  }
  CHECK_THROWS_AS(energy_integral(CentralMeasure({CVector{{0, 0}}}, {0.5}), 1), ContractError);

  Rng rng(65);
  for (int s : {1, 2}) {
    for (int trial = 0; trial < 10; ++trial) {
      const double R = rng.uniform(1, 20);
      const auto set = make_separated(s, R, 30, SeparationStrategy::greedy_random, 100 + trial);
      const auto tau = CentralMeasure::uniform(set.points);
      const double e = energy_integral(tau, s);
      CHECK(e <= 1.0 / 30 + std::pow(R, -1.0 / (2 * s)) + 1e-12);
      // invariance under translation and under rotation of every place
      const CVector shift = random_central_vector(s, 1, 50, rng);
      CVector gamma;
      for (int v = 0; v < s; ++v) gamma.push_back(std::polar(1.0, rng.uniform(0, 7)));
      const auto moved = tau.pushforward([&](const CVector& w) {
        CVector out = rotate(gamma, w);
        for (std::size_t v = 0; v < out.size(); ++v) out[v] += shift[v];
        return out;
      });
      CHECK(energy_integral(moved, s) == Catch::Approx(e).epsilon(1e-12));
    }
  }
}

TEST_CASE("cesaro_character_average", "[harmonic]") {
  const auto& fr = frame_a();
  const TorusPoint x0({0.1, 0.7, 0.35, 0.9});
  const auto set = make_separated(fr, 3.0, 6, SeparationStrategy::greedy_random, 5);
  const auto tau = CentralMeasure::uniform(set.points);

  const auto trivial = cesaro_character_average(fr, {0, 0, 0, 0}, tau, x0, 50);
  CHECK(std::abs(trivial.average - 1.0) < 1e-12);
  CHECK(trivial.mean_square == Catch::Approx(1.0));
  const auto single = cesaro_character_average(fr, {1, 2, 0, 0}, CentralMeasure({CVector{{0, 0}}}, {1.0}),
                                               TorusPoint({0, 0, 0, 0}), 1);
  CHECK(std::abs(single.average - 1.0) < 1e-15);

  // oracle: exact α^{-i} on each leaf point, character evaluated directly
  const Character a{1, -2, 0, 1};
  const std::size_t N = 25;
  std::complex<double> sum = 0;
  double sq = 0;
  for (std::size_t i = 0; i < N; ++i) {
    std::complex<double> term = 0;
    for (std::size_t j = 0; j < tau.size(); ++j) {
      const TorusPoint y = apply_alpha(fr, leaf_point(fr, x0, tau.support[j]), -static_cast<long long>(i));
      term += tau.weights[j] * eval_character(a, y);
    }
    sum += term;
    sq += std::norm(term);
  }
  const auto r = cesaro_character_average(fr, a, tau, x0, N);
  CHECK(std::abs(r.average - sum / double(N)) < 1e-9);
  CHECK(r.mean_square == Catch::Approx(sq / double(N)).epsilon(1e-9));
  CHECK(std::norm(r.average) <= r.mean_square + 1e-12);

  CHECK_THROWS_AS(cesaro_character_average(fr, a, tau, x0, 100'000'000), BudgetError);
}

TEST_CASE("unique ergodicity of the central rotation", "[harmonic][property]") {
  const auto& fr = frame_a();
  const Character a{1, 0, 0, 0};
  const auto set = make_separated(fr, 1.0, 8, SeparationStrategy::greedy_random, 9);
  const auto tau = CentralMeasure::uniform(set.points);
  const auto r = cesaro_character_average(fr, a, tau, TorusPoint({0, 0, 0, 0}), 20000);
  const double target = gamma_mean_square(fr, a, tau);
  CHECK(std::abs(r.mean_square - target) < 0.05);
  // the energy inequality; at w = w' the average is 1, so the constant used
  // over all pairs cannot be below 1
  const auto ca = fit_ca(fr, a, 200, 11);
  CHECK(target <= std::max(1.0, ca.constant) * energy_integral(tau, fr.s()) + 1e-9);
}
