#include "tordyn/measures.hpp"

#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace tordyn;

namespace {

const CentralFrame& frame_a() {
  static const CentralFrame fr = build_frame(IntPolynomial{1, -1, -1, -1, 1}, 128);
  return fr;
}

// Random orthogonal matrix by Gram-Schmidt on Gaussian columns.
std::vector<std::vector<double>> random_rotation(std::mt19937_64& gen, std::size_t d) {
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> q;
  while (q.size() < d) {
    std::vector<double> v(d);
    for (auto& x : v) x = nd(gen);
    for (const auto& u : q) {
      double dot = 0;
      for (std::size_t i = 0; i < d; ++i) dot += v[i] * u[i];
      for (std::size_t i = 0; i < d; ++i) v[i] -= dot * u[i];
    }
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    q.push_back(v);
  }
  return q;
}

}  // namespace

TEST_CASE("weighted point measures", "[measures]") {
  auto m = EuclideanMeasure::uniform({{0.0, 0.0}, {1.0, 0.0}, {1e-13, 0.0}});
  CHECK(m.is_probability());
  m.merge_close();
  CHECK(m.size() == 2);
  CHECK(m.is_probability());
  CHECK_THROWS_AS(EuclideanMeasure({{0.0}}, {0.0}), ContractError);
  CHECK_THROWS_AS(EuclideanMeasure({{0.0}}, {1.0, 2.0}), ContractError);
  CHECK(m.scaled(3).total() == Catch::Approx(3.0));
}

TEST_CASE("sample_invariant", "[measures]") {
  const auto& fr = frame_a();
  const auto haar = sample_invariant(fr, SampleKind::haar, {}, 100000, 5);
  for (std::size_t i = 0; i < 4; ++i) {
    double mean = 0;
    for (const auto& p : haar.support) mean += p.coords[i];
    mean /= static_cast<double>(haar.size());
    CHECK(std::abs(mean - 0.5) < 0.01);
  }
  const auto again = sample_invariant(fr, SampleKind::haar, {}, 100, 5);
  CHECK(again.support == sample_invariant(fr, SampleKind::haar, {}, 100, 5).support);

  SampleParams params;
  params.w0 = CVector{{0.6, 0.8}};
  const auto orb = sample_invariant(fr, SampleKind::central_orbit_closure, params, 2000, 0);
  for (std::size_t m = 0; m < orb.size(); ++m) {
    const CVector w = rotate(central_rotation(fr, static_cast<long long>(m)), *params.w0);
    CHECK(central_norm(fr, w) <= 1.0 + 1e-9);
    const auto l = lift(fr, w);
    for (std::size_t i = 0; i < 4; ++i) {
      const double k = l[i] - orb.support[m].coords[i];
      CHECK(std::abs(k - std::round(k)) < 1e-9);
    }
  }

  // exact oracle: α permutes the periodic orbit of (1/5, 0, 0, 0)
  const auto orbit = periodic_orbit(fr, 5, 100000);
  std::set<std::vector<BigRational>> as_set;
  for (const auto& p : orbit) as_set.insert(p.coords);
  CHECK(as_set.size() == orbit.size());
  for (const auto& p : orbit) CHECK(as_set.count(apply_alpha(fr, p, 1).coords) == 1);
  params.denominator = 5;
  const auto per = sample_invariant(fr, SampleKind::periodic_orbit, params, 0, 0);
  CHECK(per.size() == orbit.size());
  params.period_budget = 2;
  CHECK_THROWS_AS(sample_invariant(fr, SampleKind::periodic_orbit, params, 0, 0), BudgetError);
}

TEST_CASE("leaf profiles", "[measures]") {
  const auto& fr = frame_a();
  const TorusPoint x({0.3, 0.6, 0.1, 0.8});
  const std::vector<double> radii{1, 2, 4, 8, 16};
  // tubes wider than this start to see lattice returns of the leaf itself
  const double eps = std::min(0.02, tube_embedding_limit(fr, radii.back()));
  const auto delta = estimate_leaf_profile(fr, TorusMeasure::uniform({x}), x, radii, eps);
  for (double m : delta.masses) CHECK(m == 1.0);
  CHECK(delta.r0 == 1.0);
  CHECK_FALSE(delta.tube_overlaps);
  CHECK(estimate_leaf_profile(fr, TorusMeasure::uniform({x}), x, radii, 0.02).tube_overlaps);

  const auto haar = sample_invariant(fr, SampleKind::haar, {}, 200000, 3);
  const auto hp = estimate_leaf_profile(fr, haar, x, radii);
  CHECK(std::is_sorted(hp.masses.begin(), hp.masses.end()));
  const auto hd = finiteness_diagnostic(hp);
  CHECK(hd.verdict == FinitenessVerdict::infinite_growth);
  CHECK(std::abs(hd.exponent - 2.0) < 0.3);

  const auto orb = sample_invariant(fr, SampleKind::central_orbit_closure, {}, 5000, 0);
  const TorusPoint xo = leaf_point(fr, TorusPoint({0, 0, 0, 0}), CVector{{1, 0}});
  const auto op = estimate_leaf_profile(fr, orb, xo, radii, eps);
  CHECK(std::is_sorted(op.masses.begin(), op.masses.end()));
  CHECK(finiteness_diagnostic(op).verdict == FinitenessVerdict::finite);

  CHECK_THROWS_AS(estimate_leaf_profile(fr, TorusMeasure::uniform({TorusPoint({0.5, 0.5, 0.5, 0.5})}), x, radii),
                  ContractError);
  CHECK_THROWS_AS(estimate_leaf_profile(fr, haar, x, {2, 1}), ContractError);
}

TEST_CASE("finiteness_diagnostic on synthetic profiles", "[measures]") {
  LeafMassProfile p;
  p.radii = {1, 2, 4, 8, 16};
  p.masses = {1, 1, 1, 1, 1};
  CHECK(finiteness_diagnostic(p).verdict == FinitenessVerdict::finite);
  p.masses = {1, 4, 16, 64, 256};
  const auto d = finiteness_diagnostic(p);
  CHECK(d.verdict == FinitenessVerdict::infinite_growth);
  CHECK(d.exponent == Catch::Approx(2.0));
  p.masses = {1, 1.02, 1.6, 1.62, 1.9};
  CHECK(finiteness_diagnostic(p).verdict == FinitenessVerdict::inconclusive);
  p.radii = {1, 2, 3, 4, 5};
  CHECK_THROWS_AS(finiteness_diagnostic(p), ContractError);
  p.radii = {1, 100};
  p.masses = {1, 2};
  CHECK_THROWS_AS(finiteness_diagnostic(p), ContractError);
}

TEST_CASE("center_of_mass examples", "[measures]") {
  CHECK(center_of_mass(EuclideanMeasure({{2.0, 3.0}}, {1.0}), 1.0) == RealVector{2.0, 3.0});
  // threshold M/2 = 0.3 admits both atoms
  const auto both = center_of_mass(EuclideanMeasure({{0.0}, {10.0}}, {0.6, 0.4}), 1.0);
  CHECK(both[0] == Catch::Approx(4.0));
  // threshold 0.35 keeps only the heavy atom
  const auto heavy = center_of_mass(EuclideanMeasure({{0.0}, {10.0}}, {0.7, 0.3}), 1.0);
  CHECK(heavy[0] == 0.0);
  const auto mid = center_of_mass(EuclideanMeasure({{-1.0, 2.0}, {3.0, 4.0}}, {0.5, 0.5}), 0.5);
  CHECK(mid[0] == Catch::Approx(1.0));
  CHECK(mid[1] == Catch::Approx(3.0));
  CHECK_THROWS_AS(center_of_mass(EuclideanMeasure(), 1.0), ContractError);
}

TEST_CASE("center_of_mass is isometry and scale equivariant", "[measures][property]") {
  std::mt19937_64 gen(51);
  std::uniform_int_distribution<int> dim(1, 4), atoms(1, 12);
  std::uniform_real_distribution<double> u(0, 1), pos(-5, 5), logt(std::log(1e-3), std::log(1e3));
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = static_cast<std::size_t>(dim(gen));
    const int k = atoms(gen);
    EuclideanMeasure rho;
    for (int a = 0; a < k; ++a) {
      RealVector p(d);
      for (auto& x : p) x = pos(gen);
      rho.add(p, 0.05 + u(gen));
    }
    const double r = 0.5 + 3 * u(gen);
    const auto q = random_rotation(gen, d);
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
    for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(lhs[i] - rhs[i]) < 1e-9);
  }
}

TEST_CASE("tau_map fixtures", "[measures]") {
  const auto& fr = frame_a();
  const TorusPoint x({0.25, 0.5, 0.125, 0.75});
  LeafMeasureMap leaf;
  leaf[x.coords] = CentralMeasure({CVector{{0, 0}}}, {1.0});
  CHECK(torus_distance(tau_map(fr, leaf, x), x) < 1e-15);
  CHECK_THROWS_AS(tau_map(fr, leaf, TorusPoint({0, 0, 0, 0})), ContractError);

  // a measure on the leaf of x and its shifted copies at x + π(w)
  const CentralMeasure rho({CVector{{0.3, -0.2}}, CVector{{0.5, 0.1}}, CVector{{4.0, 4.0}}}, {0.45, 0.35, 0.2});
  leaf[x.coords] = rho;
  const TorusPoint tx = tau_map(fr, leaf, x);
  std::mt19937_64 gen(52);
  std::uniform_real_distribution<double> wd(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const CVector w{{wd(gen), wd(gen)}};
    const TorusPoint xw = leaf_point(fr, x, w);
    leaf[xw.coords] = rho.pushforward([&](const CVector& p) { return CVector{p[0] - w[0]}; });
    CHECK(torus_distance(tau_map(fr, leaf, xw), tx) < 1e-9);
  }

  // equivariance: ρ_{αx} is ρ_x rotated by ξ
  const TorusPoint ax = apply_alpha(fr, x, 1);
  const CVector xi = central_rotation(fr, 1);
  leaf[ax.coords] = rho.pushforward([&](const CVector& p) { return rotate(xi, p); });
  CHECK(torus_distance(tau_map(fr, leaf, ax), apply_alpha(fr, tx, 1)) < 1e-9);
}
