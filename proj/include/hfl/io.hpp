#pragma once

// JSON interchange for constant bases and germ families.
//
//   { "schema_version": 1,
//     "constants": [ {"name": "alpha", "value": "sqrt(2)-1", "independent": true} ],
//     "products":  [ {"a": "alpha", "b": "alpha", "value": {"1": "3", "alpha": "-2"}} ],
//     "functions": [ {"name": "f1", "terms": [
//         {"coeff": {"alpha": "2"}, "t_exp": "1"},
//         {"coeff": "-1/2", "t_exp": "0", "log_exp": "1", "log_depth": 1} ]} ] }
//
// A rational is a string "p/q", a decimal string, or a JSON integer. A
// symbolic value (coefficient, or exponent of t) is a rational or an object
// {symbol: rational}. "log_exps": [r_1, r_2, ...] may replace the pair
// log_exp/log_depth.

#include <hfl/germ_analysis.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace hfl {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

struct FamilyDoc {
  BasisPtr basis;
  Family family;
  std::vector<std::string> names;
};

namespace detail {

[[noreturn]] inline void schema_fail(const std::string& path, const std::string& msg) {
  throw Error(Errc::schema_error, (path.empty() ? std::string("descriptor") : path) + ": " + msg);
}

inline const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_fail(path, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string sub(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
inline std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

}  // namespace detail

inline Rational parse_rational_json(const json& j, const std::string& path) {
  try {
    if (j.is_number_integer()) return Rational(BigInt(j.dump()));
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    detail::schema_fail(path, e.what());
  } catch (const std::exception& e) {
    detail::schema_fail(path, std::string("invalid rational: ") + e.what());
  }
  detail::schema_fail(path, "expected a rational as a string or integer");
}

inline json rational_to_json(const Rational& q) { return q.get_str(); }

inline SymbolicReal parse_symbolic_json(const json& j, const BasisPtr& basis, const std::string& path) {
  if (!j.is_object()) return SymbolicReal(parse_rational_json(j, path));
  Coords c;
  for (auto& [name, v] : j.items()) {
    int s = 0;
    if (name != "1") {
      if (!basis || !basis->index_of(name)) detail::schema_fail(path, "undeclared constant '" + name + "'");
      s = *basis->index_of(name);
    }
    c.emplace_back(s, parse_rational_json(v, detail::sub(path, name)));
  }
  return SymbolicReal(std::move(c), basis);
}

inline json symbolic_to_json(const SymbolicReal& x) {
  if (x.is_rational()) return rational_to_json(x.rational_value());
  json o = json::object();
  for (auto& [s, q] : x.coords()) o[x.basis()->symbol(s).name] = rational_to_json(q);
  return o;
}

inline BasisPtr parse_basis(const json& j, const std::string& path = "") {
  auto b = std::make_shared<ConstantBasis>();
  if (j.contains("constants")) {
    const json& cs = j.at("constants");
    if (!cs.is_array()) detail::schema_fail(detail::sub(path, "constants"), "expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      std::string p = detail::idx(detail::sub(path, "constants"), i);
      const json& name = detail::field(cs[i], "name", p);
      const json& value = detail::field(cs[i], "value", p);
      if (!name.is_string() || !value.is_string()) detail::schema_fail(p, "name and value must be strings");
      bool indep = true;
      if (cs[i].contains("independent")) {
        if (!cs[i]["independent"].is_boolean()) detail::schema_fail(detail::sub(p, "independent"), "expected a boolean");
        indep = cs[i]["independent"].get<bool>();
      }
      try {
        b->add(name.get<std::string>(), value.get<std::string>(), indep);
      } catch (const Error& e) {
        detail::schema_fail(p, e.what());
      }
    }
  }
  BasisPtr view = b;
  if (j.contains("products")) {
    const json& ps = j.at("products");
    if (!ps.is_array()) detail::schema_fail(detail::sub(path, "products"), "expected an array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      std::string p = detail::idx(detail::sub(path, "products"), i);
      auto sym = [&](const char* key) {
        const json& v = detail::field(ps[i], key, p);
        if (!v.is_string() || !b->index_of(v.get<std::string>()))
          detail::schema_fail(detail::sub(p, key), "expected a declared constant name");
        return *b->index_of(v.get<std::string>());
      };
      int a = sym("a"), c = sym("b");
      SymbolicReal v = parse_symbolic_json(detail::field(ps[i], "value", p), view, detail::sub(p, "value"));
      b->declare_product(a, c, v.coords());
    }
  }
  return b;
}

inline json basis_to_json(const BasisPtr& basis, json& out) {
  out["constants"] = json::array();
  out["products"] = json::array();
  if (!basis) return out;
  for (std::size_t i = 1; i < basis->size(); ++i) {
    auto& s = basis->symbol(static_cast<int>(i));
    out["constants"].push_back({{"name", s.name}, {"value", s.expr}, {"independent", s.independent}});
  }
  for (auto& [key, coords] : basis->products()) {
    json v = json::object();
    for (auto& [s, q] : coords) v[basis->symbol(s).name] = rational_to_json(q);
    out["products"].push_back(
        {{"a", basis->symbol(key.first).name}, {"b", basis->symbol(key.second).name}, {"value", v}});
  }
  return out;
}

inline HardyExpr parse_function(const json& j, const BasisPtr& basis, const std::string& path) {
  const json& terms = detail::field(j, "terms", path);
  if (!terms.is_array()) detail::schema_fail(detail::sub(path, "terms"), "expected an array");
  std::vector<GermTerm> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::string p = detail::idx(detail::sub(path, "terms"), i);
    const json& t = terms[i];
    SymbolicReal coeff = parse_symbolic_json(detail::field(t, "coeff", p), basis, detail::sub(p, "coeff"));
    SymbolicReal t_exp = t.contains("t_exp") ? parse_symbolic_json(t["t_exp"], basis, detail::sub(p, "t_exp")) : SymbolicReal();
    std::vector<Rational> logs;
    if (t.contains("log_exps")) {
      const json& le = t["log_exps"];
      if (!le.is_array()) detail::schema_fail(detail::sub(p, "log_exps"), "expected an array");
      for (std::size_t k = 0; k < le.size(); ++k)
        logs.push_back(parse_rational_json(le[k], detail::idx(detail::sub(p, "log_exps"), k)));
    } else if (t.contains("log_exp") || t.contains("log_depth")) {
      Rational r = t.contains("log_exp") ? parse_rational_json(t["log_exp"], detail::sub(p, "log_exp")) : Rational(0);
      int depth = 1;
      if (t.contains("log_depth")) {
        if (!t["log_depth"].is_number_integer() || t["log_depth"].get<int>() < 0)
          detail::schema_fail(detail::sub(p, "log_depth"), "expected a non-negative integer");
        depth = t["log_depth"].get<int>();
      }
      if (depth == 0 && r != 0) detail::schema_fail(p, "log_exp needs log_depth >= 1");
      if (depth > 0) {
        logs.assign(static_cast<std::size_t>(depth), Rational(0));
        logs.back() = r;
      }
    }
    if (logs.size() > 8) detail::schema_fail(p, "at most 8 iterated logarithms are supported");
    out.push_back({coeff, Signature(t_exp, logs)});
  }
  return HardyExpr(std::move(out), basis);
}

inline json function_to_json(const HardyExpr& f, const std::string& name) {
  json terms = json::array();
  for (auto& t : f.terms()) {
    json o{{"coeff", symbolic_to_json(t.coeff)}, {"t_exp", symbolic_to_json(t.sig.t_exp)}};
    if (t.sig.has_logs()) {
      json le = json::array();
      for (auto& r : t.sig.log_exps) le.push_back(rational_to_json(r));
      o["log_exps"] = le;
    }
    terms.push_back(o);
  }
  return {{"name", name}, {"terms", terms}};
}

inline FamilyDoc parse_family(const json& j, const std::string& path = "") {
  FamilyDoc doc;
  if (j.contains("schema_version") && j["schema_version"] != schema_version)
    detail::schema_fail(detail::sub(path, "schema_version"), "unsupported schema version");
  doc.basis = parse_basis(j, path);
  const json& fs = detail::field(j, "functions", path);
  if (!fs.is_array() || fs.empty()) detail::schema_fail(detail::sub(path, "functions"), "expected a nonempty array");
  for (std::size_t i = 0; i < fs.size(); ++i) {
    std::string p = detail::idx(detail::sub(path, "functions"), i);
    doc.family.push_back(parse_function(fs[i], doc.basis, p));
    doc.names.push_back(fs[i].contains("name") && fs[i]["name"].is_string() ? fs[i]["name"].get<std::string>()
                                                                              : "f" + std::to_string(i + 1));
  }
  return doc;
}

inline json family_to_json(const FamilyDoc& doc) {
  json out{{"schema_version", schema_version}};
  basis_to_json(doc.basis, out);
  out["functions"] = json::array();
  for (std::size_t i = 0; i < doc.family.size(); ++i)
    out["functions"].push_back(function_to_json(doc.family[i], i < doc.names.size() ? doc.names[i] : "f" + std::to_string(i + 1)));
  return out;
}

}  // namespace hfl
