#pragma once

// Multiplicative function specs: the built-in catalog, JSON-file parsing,
// bound normalization, and evaluation at factored integers. A spec's
// value_rule returns g(p^alpha) already normalized to |g| <= 1; the original
// scale survives in `bound` and is re-applied when mean values are reported.

#include "multmean/primes.hpp"
#include "multmean/series.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace multmean {

// Malformed or inconsistent spec documents / selectors.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DeclaredClass { auto_detect, convergent, divergent };
enum class ConvergenceClass { convergent, divergent, indeterminate };

inline const char* to_string(ConvergenceClass c) {
  switch (c) {
    case ConvergenceClass::convergent: return "convergent";
    case ConvergenceClass::divergent: return "divergent";
    case ConvergenceClass::indeterminate: return "indeterminate";
  }
  return "?";
}

struct MultiplicativeSpec {
  std::string name;
  double bound = 1.0;   // original scale C; value_rule is already divided by it
  std::function<double(uint64_t p, uint32_t alpha)> value_rule;
  bool strongly_multiplicative = false;   // g(p^alpha) = g(p) for all alpha
  bool completely_multiplicative = false;
  bool integer_valued = false;            // normalized values land in {-1, 0, 1} exactly
  std::optional<AlphaPolyRule> series_rule;
  DeclaredClass declared_class = DeclaredClass::auto_detect;

  // Bound-checked evaluation; the constructor-time checks only sample small
  // primes, so the guard stays on for everything reached later.
  double g(uint64_t p, uint32_t alpha) const {
    if (alpha == 0) return 1.0;
    double v = value_rule(p, alpha);
    if (!(std::abs(v) <= 1.0 + 1e-12))
      throw std::domain_error("MultiplicativeSpec: |g(p^alpha)| > 1 at p=" +
                              std::to_string(p) + ", alpha=" + std::to_string(alpha));
    return v;
  }
};

// g(m) for factored m (empty factorization = 1 -> product over nothing = 1).
inline double evaluate(const MultiplicativeSpec& spec, const Factorization& f) {
  double v = 1.0;
  for (auto [p, a] : f.factors) {
    v *= spec.g(p, a);
    if (v == 0.0) break;
  }
  return v;
}

namespace detail {

inline MultiplicativeSpec from_poly_rule(std::string name, AlphaPolyRule rule,
                                         DeclaredClass cls, bool strongly,
                                         bool completely, bool integer_valued) {
  MultiplicativeSpec s;
  s.name = std::move(name);
  s.bound = 1.0;
  s.value_rule = [r = rule](uint64_t p, uint32_t a) { return r.value(p, a); };
  s.strongly_multiplicative = strongly;
  s.completely_multiplicative = completely;
  s.integer_valued = integer_valued;
  s.series_rule = std::move(rule);
  s.declared_class = cls;
  return s;
}

}  // namespace detail

// The six stock functions. Values are defined through exact alpha-indexed
// polynomials in 1/p, so the series route and the pointwise route can never
// drift apart.
inline const std::vector<MultiplicativeSpec>& catalog() {
  static const std::vector<MultiplicativeSpec> entries = [] {
    std::vector<MultiplicativeSpec> v;
    const Rational one(1), zero(0);

    // mobius: -1 on primes, 0 on higher powers. X = 2t - t^2.
    v.push_back(detail::from_poly_rule(
        "mobius", AlphaPolyRule({{Rational(-1)}}, AlphaDefault::zero),
        DeclaredClass::divergent, false, false, true));

    // constant 1. X = 0.
    v.push_back(detail::from_poly_rule(
        "one", AlphaPolyRule({{one}}, AlphaDefault::repeat_last),
        DeclaredClass::convergent, true, true, true));

    // unit mass at m = 1. X = t.
    v.push_back(detail::from_poly_rule(
        "epsilon", AlphaPolyRule({{zero}}, AlphaDefault::zero),
        DeclaredClass::divergent, true, true, true));

    // squarefree indicator. X = t^2.
    v.push_back(detail::from_poly_rule(
        "squarefree", AlphaPolyRule({{one}}, AlphaDefault::zero),
        DeclaredClass::convergent, false, false, true));

    // powerful-number indicator (alpha = 1 excluded). X = t - t^2.
    v.push_back(detail::from_poly_rule(
        "powerful", AlphaPolyRule({{zero}, {one}}, AlphaDefault::repeat_last),
        DeclaredClass::divergent, false, false, true));

    // (phi(m)/m)^2: g(p^alpha) = (1 - 1/p)^2. X = 2t^2 - t^3.
    v.push_back(detail::from_poly_rule(
        "totient_ratio_squared",
        AlphaPolyRule({{one, Rational(-2), one}}, AlphaDefault::repeat_last),
        DeclaredClass::convergent, true, false, false));
    return v;
  }();
  return entries;
}

namespace detail {

inline std::string normalize_id(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c == '-') c = '_';
  return out;
}

}  // namespace detail

inline const MultiplicativeSpec* catalog_find(std::string_view id) {
  std::string key = detail::normalize_id(id);
  for (const auto& e : catalog())
    if (e.name == key) return &e;
  return nullptr;
}

inline const MultiplicativeSpec& catalog_lookup(std::string_view id) {
  const MultiplicativeSpec* e = catalog_find(id);
  if (!e) throw SpecError("unknown builtin function '" + std::string(id) + "'");
  return *e;
}

// Wraps a raw rule bounded by C into a unit-bounded spec carrying bound = C.
// Downstream mean values are multiplied by C at reporting time, so the
// C-scaled rule's mean is exactly C times the unit rule's.
inline std::pair<MultiplicativeSpec, double> rescale_bound(
    std::string name, std::function<double(uint64_t, uint32_t)> raw_rule,
    double bound_c) {
  if (!(bound_c > 0.0))
    throw std::invalid_argument("rescale_bound: bound must be positive");
  PrimeList sample = sieve_primes(100);
  for (uint64_t p : sample.primes)
    for (uint32_t a = 1; a <= 5; ++a) {
      double v = raw_rule(p, a);
      if (!(std::abs(v) <= bound_c * (1.0 + 1e-12)))
        throw std::domain_error("rescale_bound: |raw rule| exceeds the bound at p=" +
                                std::to_string(p) + ", alpha=" + std::to_string(a));
    }
  MultiplicativeSpec s;
  s.name = std::move(name);
  s.bound = bound_c;
  s.value_rule = [raw = std::move(raw_rule), bound_c](uint64_t p, uint32_t a) {
    return raw(p, a) / bound_c;
  };
  return {std::move(s), bound_c};
}

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) { ok = true; break; }
    if (!ok)
      throw SpecError(std::string("spec: unknown field '") + it.key() + "' in " + where);
  }
}

inline Rational json_rational(const json& v) {
  if (v.is_number_integer())
    return Rational(static_cast<long long>(v.get<int64_t>()));
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SpecError(std::string("spec: ") + e.what());
    }
  }
  throw SpecError("spec: rational entries must be integers or \"n/d\" strings");
}

inline AlphaDefault parse_alpha_default(const std::string& s) {
  if (s == "repeat_last") return AlphaDefault::repeat_last;
  if (s == "zero") return AlphaDefault::zero;
  if (s == "one") return AlphaDefault::one;
  if (s == "same_as_alpha1") return AlphaDefault::same_as_alpha1;
  throw SpecError("spec: unknown default mode '" + s + "'");
}

inline DeclaredClass parse_declared_class(const std::string& s) {
  if (s == "convergent") return DeclaredClass::convergent;
  if (s == "divergent") return DeclaredClass::divergent;
  if (s == "auto") return DeclaredClass::auto_detect;
  throw SpecError("spec: class must be \"convergent\", \"divergent\", or \"auto\"");
}

}  // namespace detail

// Parses a JSON spec document. Schema:
//   { "name": str?, "bound": num>0 (default 1),
//     "rule": {"type":"builtin","id":...}
//           | {"type":"alpha_poly","polys":[[rat,...],...],"default":mode?},
//     "class": "convergent"|"divergent"|"auto"?,
//     "strongly_multiplicative": bool? }
// Unknown fields anywhere are rejected.
inline MultiplicativeSpec parse_spec(std::string_view json_text) {
  detail::json doc;
  try {
    doc = detail::json::parse(json_text);
  } catch (const detail::json::parse_error& e) {
    throw SpecError(std::string("spec: JSON parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError("spec: document must be a JSON object");
  detail::reject_unknown_keys(
      doc, {"name", "bound", "rule", "class", "strongly_multiplicative"}, "document");

  if (!doc.contains("rule") || !doc["rule"].is_object())
    throw SpecError("spec: required object field 'rule' missing");
  const detail::json& rule = doc["rule"];
  if (!rule.contains("type") || !rule["type"].is_string())
    throw SpecError("spec: rule.type must be a string");
  std::string type = rule["type"].get<std::string>();

  double bound = 1.0;
  if (doc.contains("bound")) {
    if (!doc["bound"].is_number())
      throw SpecError("spec: bound must be a number");
    bound = doc["bound"].get<double>();
    if (!(bound > 0.0)) throw SpecError("spec: bound must be positive");
  }

  std::optional<DeclaredClass> declared;
  if (doc.contains("class")) {
    if (!doc["class"].is_string()) throw SpecError("spec: class must be a string");
    declared = detail::parse_declared_class(doc["class"].get<std::string>());
  }

  std::optional<bool> strongly;
  if (doc.contains("strongly_multiplicative")) {
    if (!doc["strongly_multiplicative"].is_boolean())
      throw SpecError("spec: strongly_multiplicative must be a boolean");
    strongly = doc["strongly_multiplicative"].get<bool>();
  }

  MultiplicativeSpec out;
  if (type == "builtin") {
    detail::reject_unknown_keys(rule, {"type", "id"}, "rule");
    if (!rule.contains("id") || !rule["id"].is_string())
      throw SpecError("spec: builtin rule needs a string 'id'");
    out = catalog_lookup(rule["id"].get<std::string>());
    if (strongly && *strongly != out.strongly_multiplicative)
      throw SpecError("spec: strongly_multiplicative contradicts builtin '" +
                      out.name + "'");
    if (doc.contains("name")) {
      if (!doc["name"].is_string()) throw SpecError("spec: name must be a string");
      out.name = doc["name"].get<std::string>();
    }
  } else if (type == "alpha_poly") {
    detail::reject_unknown_keys(rule, {"type", "polys", "default"}, "rule");
    if (!rule.contains("polys") || !rule["polys"].is_array() || rule["polys"].empty())
      throw SpecError("spec: alpha_poly rule needs a nonempty 'polys' array");
    std::vector<std::vector<Rational>> polys;
    for (const auto& poly : rule["polys"]) {
      if (!poly.is_array())
        throw SpecError("spec: each polys entry must be an array of rationals");
      std::vector<Rational> coeffs;
      for (const auto& c : poly) coeffs.push_back(detail::json_rational(c));
      polys.push_back(std::move(coeffs));
    }
    AlphaDefault mode = AlphaDefault::repeat_last;
    if (rule.contains("default")) {
      if (!rule["default"].is_string())
        throw SpecError("spec: rule default must be a string");
      mode = detail::parse_alpha_default(rule["default"].get<std::string>());
    }

    bool is_strong = strongly.value_or(false);
    if (is_strong &&
        (polys.size() != 1 || mode != AlphaDefault::repeat_last))
      throw SpecError(
          "spec: strongly_multiplicative requires a single polynomial with "
          "default repeat_last");

    AlphaPolyRule apr;
    try {
      apr = AlphaPolyRule(std::move(polys), mode);
    } catch (const std::exception& e) {
      throw SpecError(std::string("spec: ") + e.what());
    }
    // Wider exact sample than the constructor's: primes to 100, alpha to 8.
    PrimeList sample = sieve_primes(100);
    for (uint64_t p : sample.primes)
      for (uint32_t a = 1; a <= 8; ++a) {
        Rational v = apr.value_at(p, a);
        if (v > 1 || v < -1)
          throw SpecError("spec: |g(p^alpha)| exceeds 1 at p=" + std::to_string(p) +
                          ", alpha=" + std::to_string(a));
      }

    bool integer_valued = true;
    for (const auto& poly : apr.polys) {
      bool constant_unit = poly.size() <= 1;
      if (poly.size() == 1)
        constant_unit = (poly[0] == 1 || poly[0] == 0 || poly[0] == -1);
      if (!constant_unit) { integer_valued = false; break; }
    }

    std::string name = "custom";
    if (doc.contains("name")) {
      if (!doc["name"].is_string()) throw SpecError("spec: name must be a string");
      name = doc["name"].get<std::string>();
    }
    out = detail::from_poly_rule(std::move(name), std::move(apr),
                                 DeclaredClass::auto_detect, is_strong, false,
                                 integer_valued);
  } else {
    throw SpecError("spec: rule.type must be \"builtin\" or \"alpha_poly\"");
  }

  out.bound = bound;
  if (declared) out.declared_class = *declared;
  return out;
}

inline MultiplicativeSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("spec: cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

}  // namespace multmean
