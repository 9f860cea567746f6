// tordyn: command-line front end. Every subcommand writes one report (JSON by
// default, CSV with --format csv) that embeds the full config and the library
// version. Exit codes: 0 success, 2 contract or budget violation, 1 otherwise.
#include "tordyn.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace tordyn;

namespace {

struct Options {
  std::string command;
  std::string poly;
  std::string poly_flag;
  std::string matrix;
  std::uint64_t seed = 0;
  int precision_bits = 128;
  std::size_t budget_points = kPointBudget;
  std::size_t budget_quadrature = std::size_t(1) << 30;
  std::size_t budget_trials = 100000;
  std::string output = "-";
  std::string format = "json";
  std::string constants;

  // density
  double eps = 0.25;
  std::size_t n_max = 0;
  std::string mode = "practical";
  double practical_R = 5;
  std::size_t practical_K = 100;
  std::string x0;
  std::size_t fit_samples = 64;
  long long core_cutoff = 1;
  double ca_norm_hi = 1e4;
  std::string cloud_csv;
  std::string probe_csv;

  // oscillatory
  int s = 1;
  long long M = 10;
  std::size_t trials = 500;
  double norm_lo = 1;
  double norm_hi = 1e6;

  // energy
  std::string character;
  double R = 10;
  std::size_t K = 100;
  std::string strategy = "greedy-random";
  std::size_t N = 100000;
  std::size_t window_from = 0;

  // leafsim
  std::string sample = "haar";
  std::size_t points = 1000000;
  std::string radii = "1,2,4,8,16";
  double tube_eps = 0.02;
  std::string x;
  long long denominator = 5;

  // tau
  std::size_t atoms = 8;
  double com_radius = 1.0;
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) {
    const auto a = cur.find_first_not_of(" \t"), b = cur.find_last_not_of(" \t");
    if (a == std::string::npos) throw ContractError("empty entry in list '" + text + "'");
    out.push_back(cur.substr(a, b - a + 1));
  }
  return out;
}

std::vector<double> parse_reals(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& t : split(text)) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || !std::isfinite(v)) throw ContractError(std::string(what) + ": bad number '" + t + "'");
    out.push_back(v);
  }
  return out;
}

Character parse_character(const std::string& text, int n) {
  Character a;
  for (const auto& t : split(text)) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) throw ContractError("character: bad integer '" + t + "'");
    a.push_back(v);
  }
  if (static_cast<int>(a.size()) != n) throw ContractError("character: expected " + std::to_string(n) + " entries");
  if (is_trivial(a)) throw ContractError("character: must be nontrivial");
  return a;
}

TorusPoint parse_point(const std::string& text, int n, const char* what) {
  if (text.empty()) return TorusPoint(std::vector<double>(static_cast<std::size_t>(n), 0.0));
  auto c = parse_reals(text, what);
  if (static_cast<int>(c.size()) != n) throw ContractError(std::string(what) + ": expected " + std::to_string(n) + " coordinates");
  return TorusPoint(std::move(c));
}

std::string polynomial_text(const Options& o) {
  if (!o.poly.empty() && !o.poly_flag.empty()) throw ContractError("give the polynomial once");
  return o.poly.empty() ? o.poly_flag : o.poly;
}

IntPolynomial input_polynomial(const Options& o) {
  const std::string text = polynomial_text(o);
  if (!o.matrix.empty()) {
    if (!text.empty()) throw ContractError("give either a polynomial or --matrix, not both");
    return characteristic_polynomial(read_matrix_file(o.matrix));
  }
  if (text.empty()) throw ContractError("no input polynomial (positional, --poly or --matrix)");
  return read_polynomial(text);
}

Json base_config(const Options& o) {
  Json c;
  c["command"] = o.command;
  c["input"] = polynomial_text(o);
  c["matrix"] = o.matrix;
  c["seed"] = o.seed;
  c["precision_bits"] = o.precision_bits;
  c["budgets"] = {{"points", o.budget_points}, {"quadrature", o.budget_quadrature}, {"trials", o.budget_trials}};
  c["output"] = o.output;
  c["format"] = o.format;
  return c;
}

void emit(const Options& o, const std::string& schema, const Json& config, Json result, const CsvTable& table) {
  if (o.format == "csv")
    write_text(o.output, table.str());
  else
    write_text(o.output, dump_report(make_report(schema, config, std::move(result))));
}

std::string big_to_string(const HighFloat& v, int digits) { return v.str(digits, std::ios_base::scientific); }

int digits_for(int bits) { return static_cast<int>(std::floor(bits * std::log10(2.0))); }

// ---- classify ---------------------------------------------------------------

void run_classify(const Options& o) {
  Json cfg = base_config(o);
  ClassificationReport r;
  if (!o.matrix.empty()) {
    if (!polynomial_text(o).empty()) throw ContractError("give either a polynomial or --matrix, not both");
    r = classify_matrix(read_matrix_file(o.matrix));
  } else {
    r = classify(input_polynomial(o));
  }
  Json j = report_json(r);
  CsvTable t({"field", "value", "provenance"});
  for (const auto& [k, v] : j.items()) {
    if (v.is_object())
      t.row(std::vector<std::string>{k, v["value"].dump(), v["provenance"].get<std::string>()});
    else
      t.row(std::vector<std::string>{k, v.is_string() ? v.get<std::string>() : v.dump(), ""});
  }
  emit(o, "tordyn.classify/1", cfg, std::move(j), t);
}

// ---- frame ------------------------------------------------------------------

void run_frame(const Options& o) {
  Json cfg = base_config(o);
  const CentralFrame fr = build_frame(input_polynomial(o), o.precision_bits);
  const int digits = digits_for(o.precision_bits);
  const auto n = static_cast<std::size_t>(fr.n());
  Json j;
  j["f"] = fr.f.to_string();
  j["coeffs"] = exact(coeffs_json(fr.f));
  j["n"] = exact(Json(fr.n()));
  j["s"] = exact(Json(fr.s()));
  j["digits"] = digits;
  Json A = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < n; ++k) row.push_back(integer_json(fr.A(i, k)));
    A.push_back(row);
  }
  j["matrix"] = exact(A);
  Json angles = Json::array(), reduced = Json::array();
  for (const auto& a : fr.angles) angles.push_back(big_to_string(a, digits));
  for (const auto& r : fr.reduced_roots) reduced.push_back(big_to_string(r, digits));
  j["angles"] = exact(angles);
  j["reduced_roots"] = exact(reduced);
  Json places = Json::array();
  for (const auto& p : fr.places)
    places.push_back({{"real", p.real},
                      {"central", p.central},
                      {"root_re", big_to_string(p.root.real(), digits)},
                      {"root_im", big_to_string(p.root.imag(), digits)}});
  j["places"] = places;
  auto columns = [&](const std::vector<std::vector<HighFloat>>& cols) {
    Json out = Json::array();
    for (const auto& c : cols) {
      Json v = Json::array();
      for (const auto& x : c) v.push_back(big_to_string(x, digits));
      out.push_back(v);
    }
    return out;
  };
  j["central_basis"] = exact(columns(fr.basis_W0()));
  j["complement_basis"] = exact(columns(fr.basis_complement()));

  std::vector<std::string> header{"column", "kind"};
  for (std::size_t i = 0; i < n; ++i) header.push_back("x" + std::to_string(i));
  CsvTable t(header);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::string> row{std::to_string(c), c < static_cast<std::size_t>(2 * fr.s()) ? "central" : "complement"};
    for (std::size_t i = 0; i < n; ++i) row.push_back(big_to_string(fr.basis(i, c), digits));
    t.row(row);
  }
  emit(o, "tordyn.frame/1", cfg, std::move(j), t);
}

// ---- oscillatory ------------------------------------------------------------

void run_oscillatory(const Options& o) {
  Json cfg = base_config(o);
  cfg["s"] = o.s;
  cfg["M"] = o.M;
  cfg["trials"] = o.trials;
  cfg["norm_lo"] = o.norm_lo;
  cfg["norm_hi"] = o.norm_hi;
  if (o.trials > o.budget_trials) throw BudgetError("oscillatory: trials exceed the trial budget");
  if (!(o.norm_lo >= 1) || !(o.norm_hi > o.norm_lo)) throw ContractError("oscillatory: need 1 <= norm_lo < norm_hi");
  // worst case over the sweep: every term at the top frequency and top norm
  const double worst = static_cast<double>(o.s) * static_cast<double>(o.M) *
                       (o.norm_hi + 10 * std::cbrt(o.norm_hi) + 30);
  if (2 * worst > static_cast<double>(o.budget_quadrature))
    throw BudgetError("oscillatory: quadrature points at norm_hi exceed the quadrature budget");
  const FittedConstant fit = fit_c2(o.s, o.M, o.trials, o.seed, o.norm_lo, o.norm_hi);
  const double slope = running_max_slope(fit.rows, o.norm_hi / 10);
  Json j;
  j["c2"] = fitted(fit.constant, fit.seed, fit.samples);
  j["top_decade_slope"] = fitted(slope, fit.seed, fit.samples);
  j["exponent"] = exact(Json(1.0 / (2.0 * o.s)));
  Json rows = Json::array();
  CsvTable t({"norm", "value", "bound"});
  for (const auto& r : fit.rows) {
    rows.push_back({{"norm", r.norm}, {"value", r.value}, {"bound", r.bound}});
    t.row(std::vector<double>{r.norm, r.value, r.bound});
  }
  j["rows"] = fitted(rows, fit.seed, fit.samples);
  emit(o, "tordyn.oscillatory/1", cfg, std::move(j), t);
}

// ---- energy -----------------------------------------------------------------

double constant_for(const Options& o, ConstantsCache& cache, const CentralFrame& fr, const Character& a,
                    std::size_t samples, double norm_hi) {
  const std::string key =
      ConstantsCache::key(fr.f, a, o.seed, samples, "norm=[1," + csv_number(norm_hi) + "]");
  return cache.get_or_fit(key, [&] { return fit_ca_cached(fr, a, samples, o.seed, 1.0, norm_hi); });
}

void run_energy(const Options& o) {
  Json cfg = base_config(o);
  const CentralFrame fr = build_frame(input_polynomial(o), o.precision_bits);
  Character a(static_cast<std::size_t>(fr.n()), 0);
  a[0] = 1;
  if (!o.character.empty()) a = parse_character(o.character, fr.n());
  const TorusPoint x0 = parse_point(o.x0, fr.n(), "x0");
  const std::size_t window = o.window_from ? o.window_from : o.N / 2;
  cfg["character"] = a;
  cfg["R"] = o.R;
  cfg["K"] = o.K;
  cfg["strategy"] = o.strategy;
  cfg["N"] = o.N;
  cfg["window_from"] = window;
  cfg["x0"] = x0.coords;
  cfg["fit_samples"] = o.fit_samples;
  cfg["ca_norm_hi"] = o.ca_norm_hi;
  cfg["constants"] = o.constants;
  if (o.fit_samples > o.budget_trials) throw BudgetError("energy: fit samples exceed the trial budget");
  if (static_cast<double>(o.N) * static_cast<double>(o.K) > static_cast<double>(o.budget_points))
    throw BudgetError("energy: N * K exceeds the point budget");
  if (window > o.N) throw ContractError("energy: window start beyond N");

  const SeparatedSet set = make_separated(fr, o.R, o.K, parse_strategy(o.strategy), o.seed);
  const CentralMeasure tau = CentralMeasure::uniform(set.points);
  const double e = energy_integral(tau, fr.s());
  const double bound = 1.0 / static_cast<double>(o.K) + std::pow(o.R, -1.0 / (2.0 * fr.s()));
  ConstantsCache cache(o.constants);
  const double ca = constant_for(o, cache, fr, a, o.fit_samples, o.ca_norm_hi);
  cache.save();
  const CesaroResult ces = cesaro_character_average(fr, a, tau, x0, o.N, window);
  const double gms = gamma_mean_square(fr, a, tau);
  const double limsup_bound = ca * bound * 2;

  Json j;
  j["s"] = exact(Json(fr.s()));
  j["separated_set_size"] = exact(Json(set.points.size()));
  j["separation_verified"] = set.verify();
  j["energy"] = exact(e);
  j["energy_bound"] = exact(bound);
  j["energy_within_bound"] = e <= bound;
  j["c_a"] = fitted(ca, o.seed, o.fit_samples);
  const std::string prov = provenance_fitted(o.seed, o.N);
  j["cesaro_average"] = tagged(Json::array({ces.average.real(), ces.average.imag()}), prov);
  j["cesaro_mean_square"] = tagged(ces.mean_square, prov);
  j["limsup_proxy"] = tagged(ces.max_square_tail, prov);
  j["limsup_bound"] = fitted(limsup_bound, o.seed, o.fit_samples);
  j["limsup_within_bound"] = ces.max_square_tail <= limsup_bound;
  j["gamma_mean_square"] = quadrature(gms, kQuadratureRelTol * std::abs(gms) + kQuadratureAbsFloor);
  j["mean_square_gap"] = tagged(std::abs(ces.mean_square - gms), prov);

  CsvTable t({"quantity", "value"});
  t.row(std::vector<std::string>{"energy", csv_number(e)});
  t.row(std::vector<std::string>{"energy_bound", csv_number(bound)});
  t.row(std::vector<std::string>{"c_a", csv_number(ca)});
  t.row(std::vector<std::string>{"limsup_proxy", csv_number(ces.max_square_tail)});
  t.row(std::vector<std::string>{"limsup_bound", csv_number(limsup_bound)});
  t.row(std::vector<std::string>{"cesaro_mean_square", csv_number(ces.mean_square)});
  t.row(std::vector<std::string>{"gamma_mean_square", csv_number(gms)});
  emit(o, "tordyn.energy/1", cfg, std::move(j), t);
}

// ---- leafsim ----------------------------------------------------------------

void run_leafsim(const Options& o) {
  Json cfg = base_config(o);
  const CentralFrame fr = build_frame(input_polynomial(o), o.precision_bits);
  const SampleKind kind = parse_sample_kind(o.sample);
  const std::vector<double> radii = parse_reals(o.radii, "radii");
  cfg["sample"] = o.sample;
  cfg["points"] = o.points;
  cfg["radii"] = radii;
  cfg["tube_eps"] = o.tube_eps;
  cfg["x"] = o.x;
  cfg["denominator"] = o.denominator;
  if (kind != SampleKind::periodic_orbit && o.points > o.budget_points)
    throw BudgetError("leafsim: sample size exceeds the point budget");
  SampleParams params;
  params.denominator = o.denominator;
  params.period_budget = o.budget_points;
  const TorusMeasure sample = sample_invariant(fr, kind, params, o.points, o.seed);
  const TorusPoint x = o.x.empty() ? sample.support.front() : parse_point(o.x, fr.n(), "x");
  if (radii.empty() || !(radii.front() > 0)) throw ContractError("leafsim: radii must be positive");
  // wider tubes would see lattice returns of the leaf itself
  const double limit = tube_embedding_limit(fr, radii.back());
  const double eps = std::min(o.tube_eps, limit);
  const LeafMassProfile coarse = estimate_leaf_profile(fr, sample, x, radii, eps);
  const LeafMassProfile fine = estimate_leaf_profile(fr, sample, x, radii, eps / 2);
  const FinitenessDiagnostic dc = finiteness_diagnostic(coarse);
  const FinitenessDiagnostic df = finiteness_diagnostic(fine);

  const std::string prov = provenance_fitted(o.seed, sample.size());
  auto profile_json = [&](const LeafMassProfile& p, const FinitenessDiagnostic& d) {
    Json j;
    j["tube_eps"] = exact(p.tube_eps);
    j["masses"] = tagged(reals_json(p.masses), prov);
    j["r0"] = exact(p.r0);
    j["tube_overlaps"] = p.tube_overlaps;
    j["verdict"] = to_string(d.verdict);
    j["exponent"] = tagged(d.exponent, prov);
    j["r_squared"] = tagged(d.r_squared, prov);
    j["residual"] = tagged(d.residual, prov);
    return j;
  };
  Json j;
  j["x"] = exact(reals_json(x.coords));
  j["radii"] = exact(reals_json(radii));
  j["sample_size"] = exact(Json(sample.size()));
  j["embedded_eps_limit"] = exact(limit);
  j["tube_eps_clamped"] = eps < o.tube_eps;
  j["coarse"] = profile_json(coarse, dc);
  j["fine"] = profile_json(fine, df);
  j["verdict"] = to_string(df.verdict);
  j["exponent"] = tagged(df.exponent, prov);
  j["verdicts_agree"] = dc.verdict == df.verdict;

  CsvTable t({"r", "mass", "mass_fine"});
  for (std::size_t i = 0; i < radii.size(); ++i) t.row(std::vector<double>{radii[i], coarse.masses[i], fine.masses[i]});
  emit(o, "tordyn.leafsim/1", cfg, std::move(j), t);
}

// ---- tau --------------------------------------------------------------------

// Random orthogonal matrix by Gram-Schmidt on Gaussian columns.
std::vector<std::vector<double>> random_rotation(Rng& rng, std::size_t d) {
  std::vector<std::vector<double>> q;
  while (q.size() < d) {
    std::vector<double> v(d);
    for (auto& x : v) x = rng.normal();
    for (const auto& u : q) {
      double dot = 0;
      for (std::size_t i = 0; i < d; ++i) dot += v[i] * u[i];
      for (std::size_t i = 0; i < d; ++i) v[i] -= dot * u[i];
    }
    double nrm = 0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-8) continue;
    for (auto& x : v) x /= nrm;
    q.push_back(v);
  }
  return q;
}

void run_tau(const Options& o) {
  Json cfg = base_config(o);
  const CentralFrame fr = build_frame(input_polynomial(o), o.precision_bits);
  cfg["trials"] = o.trials;
  cfg["atoms"] = o.atoms;
  cfg["com_radius"] = o.com_radius;
  if (o.trials > o.budget_trials) throw BudgetError("tau: trials exceed the trial budget");
  if (o.atoms < 1) throw ContractError("tau: need at least one atom");
  const auto s = static_cast<std::size_t>(fr.s());
  const Rng root(o.seed, "cli.tau");
  const CVector xi = central_rotation(fr, 1);
  double worst_translation = 0, worst_equivariance = 0, worst_com = 0;
  CsvTable t({"trial", "translation_error", "equivariance_error", "center_of_mass_error"});
  for (std::size_t trial = 0; trial < o.trials; ++trial) {
    Rng rng = root.child(trial);
    std::vector<double> xc(static_cast<std::size_t>(fr.n()));
    for (auto& v : xc) v = rng.uniform();
    const TorusPoint x(xc);
    CentralMeasure rho;
    for (std::size_t k = 0; k < o.atoms; ++k) {
      CVector w(s);
      for (auto& z : w) z = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
      rho.add(w, rng.uniform(0.05, 1.0));
    }
    LeafMeasureMap leaf;
    leaf[x.coords] = rho;
    const TorusPoint tx = tau_map(fr, leaf, x, o.com_radius);
    // τ(x + π(w)) = τ(x) when ρ_{x+π(w)} is ρ_x shifted by -w
    CVector w(s);
    for (auto& z : w) z = {rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const TorusPoint xw = leaf_point(fr, x, w);
    leaf[xw.coords] = rho.pushforward([&](const CVector& p) {
      CVector q(p);
      for (std::size_t v = 0; v < s; ++v) q[v] -= w[v];
      return q;
    });
    const double et = torus_distance(tau_map(fr, leaf, xw, o.com_radius), tx);
    // τ(αx) = α(τ(x)) when ρ_{αx} is ρ_x rotated by ξ
    const TorusPoint ax = apply_alpha(fr, x, 1);
    leaf[ax.coords] = rho.pushforward([&](const CVector& p) { return rotate(xi, p); });
    const double ee = torus_distance(tau_map(fr, leaf, ax, o.com_radius), apply_alpha(fr, tx, 1));
    // c(t·F_*ρ) = F(c(ρ)) for a random isometry F and scale t
    const EuclideanMeasure flat = rho.pushforward([](const CVector& p) { return flatten(p); });
    const std::size_t d = 2 * s;
    const auto q = random_rotation(rng, d);
    RealVector shift(d);
    for (auto& v : shift) v = rng.uniform(-5, 5);
    auto F = [&](const RealVector& p) {
      RealVector y(shift);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) y[i] += q[i][k] * p[k];
      return y;
    };
    const double scale = rng.log_uniform(1e-3, 1e3);
    const RealVector lhs = center_of_mass(flat.pushforward(F).scaled(scale), o.com_radius);
    const RealVector rhs = F(center_of_mass(flat, o.com_radius));
    double ec = 0;
    for (std::size_t i = 0; i < d; ++i) ec = std::max(ec, std::abs(lhs[i] - rhs[i]));
    worst_translation = std::max(worst_translation, et);
    worst_equivariance = std::max(worst_equivariance, ee);
    worst_com = std::max(worst_com, ec);
    t.row(std::vector<double>{static_cast<double>(trial), et, ee, ec});
  }
  Json j;
  j["trials"] = exact(Json(o.trials));
  j["max_translation_error"] = exact(worst_translation);
  j["max_equivariance_error"] = exact(worst_equivariance);
  j["max_center_of_mass_error"] = exact(worst_com);
  j["tolerance"] = exact(1e-9);
  j["consistent"] = worst_translation <= 1e-9 && worst_equivariance <= 1e-9 && worst_com <= 1e-9;
  emit(o, "tordyn.tau/1", cfg, std::move(j), t);
}

// ---- density ----------------------------------------------------------------

Json rk_json(const RKResult& r) {
  Json j;
  const auto fit = [&](double v) { return fitted(real_json(v), r.seed, r.fit_samples); };
  j["K_real"] = fit(r.K_real);
  j["K"] = fit(r.K);
  j["R"] = fit(r.R);
  j["R_rounded"] = fit(r.R_rounded);
  j["xi_cutoff"] = exact(Json(r.xi_cutoff));
  j["xi_size"] = exact(real_json(r.xi_size));
  j["tent_l1"] = exact(r.tent_l1);
  j["fourier_error"] = exact(r.fourier_error);
  j["core_cutoff"] = exact(Json(r.core_cutoff));
  j["c_tail"] = exact(r.c_tail);
  j["core_sum"] = fit(r.core_sum);
  j["tail_mass"] = exact(r.tail_mass);
  Json cs = Json::array();
  for (const auto& c : r.constants) cs.push_back({{"a", c.a}, {"c_a", fit(c.c)}});
  j["constants"] = cs;
  return j;
}

void run_density(const Options& o) {
  Json cfg = base_config(o);
  const CentralFrame fr = build_frame(input_polynomial(o), o.precision_bits);
  const TorusPoint x0 = parse_point(o.x0, fr.n(), "x0");
  if (o.mode != "practical" && o.mode != "lemma") throw ContractError("density: mode must be practical or lemma");
  DensityOptions opt;
  opt.point_budget = o.budget_points;
  opt.rk.fit_samples = o.fit_samples;
  opt.rk.core_cutoff = o.core_cutoff;
  opt.rk.norm_hi = o.ca_norm_hi;
  opt.keep_cloud = !o.cloud_csv.empty();
  if (o.fit_samples > o.budget_trials) throw BudgetError("density: fit samples exceed the trial budget");
  ConstantsCache cache(o.constants);
  if (!o.constants.empty())
    opt.rk.constant_source = [&](const Character& a) {
      return constant_for(o, cache, fr, a, o.fit_samples, o.ca_norm_hi);
    };
  std::size_t n_max = o.n_max;
  if (o.mode == "practical") {
    opt.practical_R = o.practical_R;
    opt.practical_K = o.practical_K;
    if (n_max == 0) n_max = std::max<std::size_t>(1, o.budget_points / std::max<std::size_t>(1, o.practical_K));
  } else if (n_max == 0) {
    n_max = 1;
  }
  cfg["eps"] = o.eps;
  cfg["mode"] = o.mode;
  cfg["practical_R"] = o.practical_R;
  cfg["practical_K"] = o.practical_K;
  cfg["N_max"] = n_max;
  cfg["x0"] = x0.coords;
  cfg["fit_samples"] = o.fit_samples;
  cfg["core_cutoff"] = o.core_cutoff;
  cfg["ca_norm_hi"] = o.ca_norm_hi;
  cfg["constants"] = o.constants;
  cfg["cloud_csv"] = o.cloud_csv;
  cfg["probe_csv"] = o.probe_csv;

  const DensityReport rep = density_experiment(fr, o.eps, n_max, x0, o.seed, opt);
  cache.save();
  const std::string prov = provenance_fitted(o.seed, rep.trace.empty() ? 0 : rep.trace.back().points);
  const bool lemma = rep.mode == "lemma";
  Json j;
  j["epsilon"] = exact(rep.epsilon);
  j["s"] = exact(Json(rep.s));
  j["mode"] = rep.mode;
  j["R"] = lemma ? fitted(rep.R, o.seed, o.fit_samples) : exact(rep.R);
  j["K"] = lemma ? fitted(Json(rep.K), o.seed, o.fit_samples) : exact(Json(rep.K));
  j["lemma"] = rk_json(rep.lemma);
  j["N_max"] = exact(Json(rep.N_max));
  j["N_used"] = exact(Json(rep.N_used));
  j["first_dense_N"] = rep.first_dense_N ? tagged(Json(*rep.first_dense_N), prov) : Json(nullptr);
  j["first_positive_N"] = rep.first_positive_N ? tagged(Json(*rep.first_positive_N), prov) : Json(nullptr);
  j["dense"] = rep.dense;
  j["worst_gap"] = tagged(rep.worst_gap, prov);
  j["witness"] = tagged(reals_json(rep.witness), prov);
  j["probe_spacing"] = exact(rep.probe_spacing);
  j["min_tent_mass_ratio"] = tagged(real_json(rep.min_tent_mass_ratio), prov);
  Json trace = Json::array();
  CsvTable probes({"N", "points", "worst_gap", "dense", "empty_tents"});
  for (const auto& st : rep.trace) {
    trace.push_back({{"N", st.N},
                     {"points", st.points},
                     {"worst_gap", st.worst_gap},
                     {"dense", st.dense},
                     {"empty_tents", st.empty_tents}});
    probes.row(std::vector<std::string>{std::to_string(st.N), std::to_string(st.points), csv_number(st.worst_gap),
                                        st.dense ? "true" : "false", std::to_string(st.empty_tents)});
  }
  j["trace"] = tagged(trace, prov);
  Json steps = Json::array();
  for (const auto& ps : rep.proof_steps)
    steps.push_back({{"a", ps.a},
                     {"measured", tagged(ps.measured, prov)},
                     {"bound", fitted(ps.bound, o.seed, o.fit_samples)},
                     {"holds", ps.measured <= ps.bound}});
  j["proof_steps"] = steps;
  j["x0"] = exact(reals_json(rep.x0));

  if (!o.probe_csv.empty()) write_text(o.probe_csv, probes.str());
  if (!o.cloud_csv.empty()) {
    std::vector<std::string> header;
    for (int i = 0; i < fr.n(); ++i) header.push_back("x" + std::to_string(i));
    CsvTable cloud(header);
    for (const auto& p : rep.cloud) cloud.row(p.coords);
    write_text(o.cloud_csv, cloud.str());
  }
  emit(o, "tordyn.density/1", cfg, std::move(j), probes);
}

// ---- command line -----------------------------------------------------------

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("polynomial", o.poly, "Polynomial text (\"u^4 - u^3 + 1\") or JSON {\"coeffs\": [c0, ..., cn]}");
  sub->add_option("--poly", o.poly_flag, "Same as the positional polynomial");
  sub->add_option("--matrix", o.matrix, "JSON file {\"matrix\": [[...], ...]} with integer entries; its characteristic polynomial is used")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "Seed for every random stream (default 0)");
  sub->add_option("--precision", o.precision_bits, "Working precision in bits for roots and frames")
      ->check(CLI::Range(53, 256));
  sub->add_option("--budget-points", o.budget_points, "Maximum number of torus points or samples")->check(CLI::PositiveNumber);
  sub->add_option("--budget-quadrature", o.budget_quadrature, "Maximum quadrature points per integral")
      ->check(CLI::PositiveNumber);
  sub->add_option("--budget-trials", o.budget_trials, "Maximum random trials or fit samples")->check(CLI::PositiveNumber);
  sub->add_option("-o,--output", o.output, "Report path, - for stdout");
  sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"tordyn: toral automorphisms, central leaves and density experiments"};
  app.set_version_flag("--version", std::string(kLibraryVersion));
  app.require_subcommand(1);

  auto* classify_cmd = app.add_subcommand("classify", "Classify a polynomial or integer matrix as a dynamical system");
  add_common(classify_cmd, o);

  auto* frame_cmd = app.add_subcommand("frame", "Central frame: angles, places and basis of an ergodic unit polynomial");
  add_common(frame_cmd, o);

  auto* osc = app.add_subcommand("oscillatory", "Fit the oscillatory-integral decay constant over random trig polynomials");
  add_common(osc, o);
  osc->add_option("--s", o.s, "Number of terms")->check(CLI::Range(1, 8));
  osc->add_option("--M", o.M, "Top frequency")->check(CLI::Range(1LL, 1000LL));
  osc->add_option("--trials", o.trials, "Random polynomials (at least 100)");
  osc->add_option("--norm-lo", o.norm_lo, "Smallest coefficient norm");
  osc->add_option("--norm-hi", o.norm_hi, "Largest coefficient norm");

  auto* energy = app.add_subcommand("energy", "Energy of a separated set, fitted c_a and Cesàro averages of a character");
  add_common(energy, o);
  energy->add_option("--char", o.character, "Character a as comma-separated integers (default e_1)");
  energy->add_option("--R", o.R, "Separation radius in the frame norm")->check(CLI::PositiveNumber);
  energy->add_option("--K", o.K, "Number of points in the separated set")->check(CLI::PositiveNumber);
  energy->add_option("--strategy", o.strategy, "Separated-set construction")->check(CLI::IsMember({"grid", "greedy-random"}));
  energy->add_option("--N", o.N, "Cesàro length")->check(CLI::PositiveNumber);
  energy->add_option("--window-from", o.window_from, "Start of the limsup window (default N/2)");
  energy->add_option("--x0", o.x0, "Base point as comma-separated coordinates (default 0)");
  energy->add_option("--fit-samples", o.fit_samples, "Samples for the c_a fit")->check(CLI::PositiveNumber);
  energy->add_option("--ca-norm-hi", o.ca_norm_hi, "Largest ‖w‖ in the c_a fit");
  energy->add_option("--constants", o.constants, "JSON sidecar caching fitted constants");

  auto* leaf = app.add_subcommand("leafsim", "Leaf-mass profile of a sampled invariant measure and its finiteness verdict");
  add_common(leaf, o);
  leaf->add_option("--sample", o.sample, "Sample kind")->check(CLI::IsMember({"haar", "central_orbit_closure", "periodic_orbit"}));
  leaf->add_option("--points", o.points, "Sample size (ignored for periodic_orbit)")->check(CLI::PositiveNumber);
  leaf->add_option("--radii", o.radii, "Increasing radii, comma separated");
  leaf->add_option("--tube-eps", o.tube_eps, "Tube width in complement coordinates (clamped to the embedding limit)")
      ->check(CLI::PositiveNumber);
  leaf->add_option("--x", o.x, "Leaf base point (default: first sample point)");
  leaf->add_option("--denominator", o.denominator, "q for the periodic orbit of (1/q, 0, ..., 0)");

  auto* tau = app.add_subcommand("tau", "Translation and equivariance checks of the center-of-mass map on synthetic leaf measures");
  add_common(tau, o);
  tau->add_option("--trials", o.trials, "Random fixtures");
  tau->add_option("--atoms", o.atoms, "Atoms per leaf measure");
  tau->add_option("--radius", o.com_radius, "Ball radius r of the center of mass")->check(CLI::PositiveNumber);

  auto* dens = app.add_subcommand("density", "ε-density of inverse orbits of a separated leaf set");
  add_common(dens, o);
  dens->add_option("--eps", o.eps, "ε in (0, 1/2]");
  dens->add_option("--N-max", o.n_max, "Largest N (default: point budget / K in practical mode)");
  dens->add_option("--mode", o.mode, "practical: given R, K; lemma: R, K from the fitted constants")
      ->check(CLI::IsMember({"practical", "lemma"}));
  dens->add_option("--R", o.practical_R, "Separation radius in practical mode")->check(CLI::PositiveNumber);
  dens->add_option("--K", o.practical_K, "Set size in practical mode")->check(CLI::PositiveNumber);
  dens->add_option("--x0", o.x0, "Base point as comma-separated coordinates (default 0)");
  dens->add_option("--fit-samples", o.fit_samples, "Samples per c_a fit")->check(CLI::PositiveNumber);
  dens->add_option("--core-cutoff", o.core_cutoff, "Characters with |a_j| <= cutoff get fitted constants")
      ->check(CLI::PositiveNumber);
  dens->add_option("--ca-norm-hi", o.ca_norm_hi, "Largest ‖w‖ in the c_a fits");
  dens->add_option("--constants", o.constants, "JSON sidecar caching fitted constants");
  dens->add_option("--cloud", o.cloud_csv, "Write the point cloud as CSV");
  dens->add_option("--probe-csv", o.probe_csv, "Write per-step probe-grid statistics as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (classify_cmd->parsed()) o.command = "classify", run_classify(o);
    else if (frame_cmd->parsed()) o.command = "frame", run_frame(o);
    else if (osc->parsed()) o.command = "oscillatory", run_oscillatory(o);
    else if (energy->parsed()) o.command = "energy", run_energy(o);
    else if (leaf->parsed()) o.command = "leafsim", run_leafsim(o);
    else if (tau->parsed()) o.command = "tau", run_tau(o);
    else if (dens->parsed()) o.command = "density", run_density(o);
  } catch (const ContractError& e) {
    std::cerr << "tordyn: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "tordyn: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "tordyn: internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
