// Report plumbing: polynomial and matrix input, provenance-tagged JSON values,
// CSV tables and the sidecar cache of fitted constants.
#pragma once

#include "tordyn/classify.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef TORDYN_VERSION
#define TORDYN_VERSION "0.0.0"
#endif

namespace tordyn {

using Json = nlohmann::ordered_json;

inline constexpr const char* kLibraryVersion = TORDYN_VERSION;

namespace detail {

inline BigInt json_integer(const Json& v, const char* what) {
  if (v.is_number_integer()) return BigInt(v.get<long long>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    const std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (s.size() == start || s.find_first_not_of("0123456789", start) != std::string::npos)
      throw ContractError(std::string(what) + ": '" + s + "' is not an integer");
    return BigInt(s[0] == '+' ? s.substr(1) : s);
  }
  throw ContractError(std::string(what) + ": entries must be integers");
}

inline Json parse_json(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ContractError(std::string(what) + ": " + e.what());
  }
}

}  // namespace detail

/// Polynomial from text ("u^4 - u^3 + 1") or JSON {"coeffs": [c0, ..., cn]}.
inline IntPolynomial read_polynomial(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') return poly_parse(text);
  const Json j = detail::parse_json(text, "polynomial");
  if (!j.contains("coeffs") || !j["coeffs"].is_array()) throw ContractError("polynomial: expected {\"coeffs\": [...]}");
  std::vector<BigInt> c;
  for (const auto& v : j["coeffs"]) c.push_back(detail::json_integer(v, "coeffs"));
  IntPolynomial p(std::move(c));
  if (p.is_zero()) throw ContractError("polynomial: zero polynomial");
  return p;
}

/// Square integer matrix from JSON {"matrix": [[...], ...]}.
inline IntMatrix parse_matrix(const std::string& text) {
  const Json j = detail::parse_json(text, "matrix");
  if (!j.contains("matrix") || !j["matrix"].is_array()) throw ContractError("matrix: expected {\"matrix\": [[...], ...]}");
  const auto& rows = j["matrix"];
  const std::size_t n = rows.size();
  if (n == 0) throw ContractError("matrix: empty");
  IntMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) throw ContractError("matrix: must be square");
    for (std::size_t k = 0; k < n; ++k) a(i, k) = detail::json_integer(rows[i][k], "matrix");
  }
  return a;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline IntMatrix read_matrix_file(const std::string& path) { return parse_matrix(read_file(path)); }

/// "-" writes to stdout.
inline void write_text(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ---- provenance-tagged values ------------------------------------------------

inline Json integer_json(const BigInt& v) {
  if (v >= BigInt(std::numeric_limits<long long>::min()) && v <= BigInt(std::numeric_limits<long long>::max()))
    return Json(static_cast<long long>(v));
  return Json(v.str());
}

inline std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::string provenance_quadrature(double err) { return "quadrature(" + short_number(err) + ")"; }
inline std::string provenance_fitted(std::uint64_t seed, std::size_t samples) {
  return "fitted(" + std::to_string(seed) + "," + std::to_string(samples) + ")";
}

inline Json tagged(Json value, const std::string& provenance) {
  Json j;
  j["value"] = std::move(value);
  j["provenance"] = provenance;
  return j;
}

inline Json exact(Json value) { return tagged(std::move(value), "exact"); }
inline Json exact(const BigInt& v) { return exact(integer_json(v)); }
inline Json quadrature(double value, double err) { return tagged(value, provenance_quadrature(err)); }
inline Json fitted(Json value, std::uint64_t seed, std::size_t samples) {
  return tagged(std::move(value), provenance_fitted(seed, samples));
}

/// Non-finite doubles become strings so the JSON stays valid.
inline Json real_json(double v) {
  if (std::isfinite(v)) return Json(v);
  if (std::isnan(v)) return Json("nan");
  return Json(v > 0 ? "inf" : "-inf");
}

inline Json reals_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(real_json(x));
  return a;
}

inline Json coeffs_json(const IntPolynomial& f) {
  Json a = Json::array();
  for (const auto& c : f.coeffs()) a.push_back(integer_json(c));
  return a;
}

inline Json report_json(const ClassificationReport& r) {
  Json j;
  j["input"] = r.input.to_string();
  j["coeffs"] = exact(coeffs_json(r.input));
  j["irreducible"] = r.irreducible;
  j["ergodic"] = r.ergodic;
  j["expansive"] = r.expansive;
  j["totally_irreducible"] = r.totally_irreducible;
  j["algebraic_unit"] = r.algebraic_unit;
  j["is_self_inversive"] = r.is_self_inversive;
  j["s0_count"] = exact(Json(r.s0_count));
  j["central_real_dim"] = exact(Json(r.central_real_dim));
  j["real_place_count"] = exact(Json(r.real_place_count));
  j["complex_place_count"] = exact(Json(r.complex_place_count));
  Json primes = Json::array();
  for (const auto& p : r.finite_place_primes) primes.push_back(integer_json(p));
  j["finite_place_primes"] = exact(primes);
  j["notes"] = r.notes;
  return j;
}

/// Envelope shared by every report: schema id, library version, full config.
inline Json make_report(const std::string& schema, const Json& config, Json result) {
  Json j;
  j["schema"] = schema;
  j["version"] = kLibraryVersion;
  j["config"] = config;
  j["result"] = std::move(result);
  return j;
}

inline std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

// ---- CSV ---------------------------------------------------------------------

inline std::string csv_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : width_(header.size()) { add(header); }

  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    for (double v : values) s.push_back(csv_number(v));
    add(s);
  }
  void row(const std::vector<std::string>& values) { add(values); }
  const std::string& str() const { return text_; }

 private:
  void add(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv: row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += quote(cells[i]);
    }
    text_ += '\n';
  }
  static std::string quote(const std::string& c) {
    if (c.find_first_of(",\"\n") == std::string::npos) return c;
    std::string q = "\"";
    for (char ch : c) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  }

  std::size_t width_;
  std::string text_;
};

// ---- fitted-constant sidecar -------------------------------------------------

/// JSON file of fitted constants keyed by (f, a, seed, samples). Values are
/// stored with round-trip precision, so a cache hit reproduces the fit exactly.
class ConstantsCache {
 public:
  ConstantsCache() = default;
  explicit ConstantsCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::ostringstream ss;
    ss << in.rdbuf();
    const Json j = detail::parse_json(ss.str(), "constants cache");
    if (j.contains("entries"))
      for (const auto& [k, v] : j["entries"].items()) entries_[k] = v.get<double>();
  }

  static std::string key(const IntPolynomial& f, const std::vector<long long>& a, std::uint64_t seed,
                         std::size_t samples, const std::string& extra = "") {
    std::string k = "f=[";
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) k += (i ? "," : "") + f.coeffs()[i].str();
    k += "];a=[";
    for (std::size_t i = 0; i < a.size(); ++i) k += (i ? "," : "") + std::to_string(a[i]);
    k += "];seed=" + std::to_string(seed) + ";samples=" + std::to_string(samples);
    if (!extra.empty()) k += ";" + extra;
    return k;
  }

  std::optional<double> find(const std::string& k) const {
    if (auto it = entries_.find(k); it != entries_.end()) return it->second;
    return std::nullopt;
  }
  void store(const std::string& k, double v) {
    auto [it, inserted] = entries_.emplace(k, v);
    if (!inserted && it->second != v) it->second = v;
    dirty_ = dirty_ || inserted;
  }
  std::size_t size() const { return entries_.size(); }
  std::size_t hits() const { return hits_; }

  double get_or_fit(const std::string& k, const std::function<double()>& fit) {
    if (auto v = find(k)) {
      ++hits_;
      return *v;
    }
    const double v = fit();
    store(k, v);
    return v;
  }

  void save() const {
    if (path_.empty() || !dirty_) return;
    Json j;
    j["schema"] = "tordyn.constants/1";
    Json e = Json::object();
    for (const auto& [k, v] : entries_) e[k] = v;  // std::map keeps keys sorted
    j["entries"] = e;
    write_text(path_, j.dump(2) + "\n");
  }

 private:
  std::string path_;
  std::map<std::string, double> entries_;
  std::size_t hits_ = 0;
  bool dirty_ = false;
};

}  // namespace tordyn
