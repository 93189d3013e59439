#pragma once

// Experiment descriptors, analysis dispatch and run reports.
//
// A descriptor is a JSON object:
//   { "schema_version": 1,
//     "analysis": "condition|avg|multicorr|seminorm|equi|pattern|return-set|probe",
//     "family":  {family document} | {"builtin": name, "params": {...}},
//     "system":  {"type": "cyclic", "m": 2, "a": 1} | {"type": "torus", "alpha": ["sqrt2_minus1"]}
//                | {"type": "skew", "alpha": "sqrt(2)-1"} | {"builtin": name, "params": {...}},
//     "set":     {"type": "cyclic", "elements": [0]} | {"type": "box", "arcs": [["0", "3/10"]]}
//                | {"type": "odds"} | {"type": "all"} | {"type": "explicit", "elements": [...], "n_max": N}
//                | {"type": "bohr", "alpha": [...], "windows": [["0", "1/8"], ...]}
//                | {"builtin": "odds|example2|example5", "params": {...}},
//     "weight":  "auto" | ladder name | {"germ": function},
//     "mode":    "floor|ceil|nearest",
//     "grid":    [1000, 10000],
//     "seed":    0,
//     "precision": 64,
//     "format":  "json|csv",
//     "params":  {analysis specific} }

#include <hfl/builtins.hpp>
#include <hfl/uniformity.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace hfl {

inline constexpr const char* tool_version = "0.1.0";

inline const std::vector<std::string>& analysis_kinds() {
  static const std::vector<std::string> kinds = {"condition", "avg",     "multicorr",  "seminorm",
                                                 "equi",      "pattern", "return-set", "probe"};
  return kinds;
}

struct Experiment {
  json descriptor;  // effective descriptor, echoed in the report
  std::string analysis;
  std::optional<FamilyDoc> family;
  std::optional<System> system;
  RoundingMode mode = RoundingMode::Floor;
  std::vector<std::uint64_t> grid{1000, 10000, 100000, 1000000};
  std::uint64_t seed = 0;
  unsigned digits = default_digits;
  std::string format = "json";
  json params = json::object();
};

struct RunOptions {
  unsigned threads = 1;
};

struct RunReport {
  json descriptor;
  json results;
  json csv_table;  // {"columns": [...], "rows": [[...]]}
  unsigned start_digits = default_digits;
  unsigned peak_digits = 0;
  double wall_seconds = 0;
};

namespace detail {

inline std::uint64_t get_u64(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) schema_fail(path, "expected a non-negative integer");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (v >= 0 && v < 0x1.0p63 && v == std::floor(v)) return static_cast<std::uint64_t>(v);
  }
  schema_fail(path, "expected a non-negative integer");
}

inline std::int64_t get_i64(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (std::abs(v) < 0x1.0p62 && v == std::floor(v)) return static_cast<std::int64_t>(v);
  }
  schema_fail(path, "expected an integer");
}

inline std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_fail(path, "expected a string");
  return j.get<std::string>();
}

inline double get_double(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_rational_json(j, path).get_d();
  schema_fail(path, "expected a number");
}

inline std::uint64_t param_u64(const json& p, const char* key, std::uint64_t def) {
  return p.contains(key) ? get_u64(p[key], sub("params", key)) : def;
}

inline Params get_params(const json& j, const std::string& path) {
  Params out;
  if (!j.contains("params")) return out;
  const json& p = j["params"];
  if (!p.is_object()) schema_fail(sub(path, "params"), "expected an object");
  for (auto& [k, v] : p.items()) {
    if (v.is_string()) out[k] = v.get<std::string>();
    else if (v.is_number()) out[k] = v.dump();
    else schema_fail(sub(sub(path, "params"), k), "expected a string or number");
  }
  return out;
}

inline void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  for (auto& [k, v] : j.items()) {
    bool known = false;
    for (auto* key : keys) known = known || k == key;
    if (!known) schema_fail(sub(path, k), "unknown field");
  }
}

inline BigFloat constant_in(const std::string& text, const BasisPtr& basis, const std::string& path,
                            mpfr_prec_t bits = 320) {
  try {
    if (basis)
      if (auto i = basis->index_of(text)) return basis->value(*i, bits);
    return constant_from_text(text, bits);
  } catch (const Error& e) {
    schema_fail(path, e.what());
  }
}

inline std::vector<std::string> string_list(const json& j, const std::string& path) {
  if (j.is_string()) return {j.get<std::string>()};
  if (!j.is_array()) schema_fail(path, "expected a string or an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_string(j[i], idx(path, i)));
  return out;
}

inline Arc parse_arc(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema_fail(path, "an arc is a pair [start, end]");
  Rational u = parse_rational_json(j[0], idx(path, 0)), v = parse_rational_json(j[1], idx(path, 1));
  if (v < u) schema_fail(path, "arc end precedes start");
  return Arc::from_rationals(u, v);
}

}  // namespace detail

inline FamilyDoc parse_family_spec(const json& j, const std::string& path = "family") {
  if (!j.is_object()) detail::schema_fail(path, "expected an object");
  if (j.contains("builtin")) {
    try {
      return builtin_family(detail::get_string(j["builtin"], detail::sub(path, "builtin")), detail::get_params(j, path));
    } catch (const Error& e) {
      if (e.code() == Errc::schema_error) throw;
      detail::schema_fail(path, e.what());
    }
  }
  return parse_family(j, path);
}

inline System parse_system(const json& j, const BasisPtr& basis, const std::string& path = "system") {
  if (!j.is_object()) detail::schema_fail(path, "expected an object");
  if (j.contains("builtin")) return builtin_system(detail::get_string(j["builtin"], detail::sub(path, "builtin")),
                                                   detail::get_params(j, path));
  std::string type = detail::get_string(detail::field(j, "type", path), detail::sub(path, "type"));
  if (type == "cyclic") {
    detail::check_keys(j, path, {"type", "m", "a"});
    std::uint64_t m = detail::get_u64(detail::field(j, "m", path), detail::sub(path, "m"));
    std::uint64_t a = j.contains("a") ? detail::get_u64(j["a"], detail::sub(path, "a")) : (m > 1 ? 1 : 0);
    if (m < 1) detail::schema_fail(detail::sub(path, "m"), "modulus must be >= 1");
    if (a >= m) detail::schema_fail(detail::sub(path, "a"), "shift must satisfy 0 <= a < m");
    return CyclicRotation{m, a};
  }
  if (type == "torus") {
    detail::check_keys(j, path, {"type", "alpha"});
    auto names = detail::string_list(detail::field(j, "alpha", path), detail::sub(path, "alpha"));
    if (names.empty()) detail::schema_fail(detail::sub(path, "alpha"), "torus dimension must be >= 1");
    TorusRotation t;
    for (std::size_t i = 0; i < names.size(); ++i)
      t.alpha.push_back(Phase::from_real(detail::constant_in(names[i], basis, detail::idx(detail::sub(path, "alpha"), i))));
    return t;
  }
  if (type == "skew") {
    detail::check_keys(j, path, {"type", "alpha"});
    auto names = detail::string_list(detail::field(j, "alpha", path), detail::sub(path, "alpha"));
    if (names.size() != 1) detail::schema_fail(detail::sub(path, "alpha"), "skew product takes one constant");
    return QuadraticSkew{Phase::from_real(detail::constant_in(names[0], basis, detail::sub(path, "alpha")))};
  }
  detail::schema_fail(detail::sub(path, "type"), "unknown system type '" + type + "'");
}

inline EventSet parse_event_set(const json& j, const std::string& path = "set") {
  if (!j.is_object()) detail::schema_fail(path, "expected an object");
  std::string type = detail::get_string(detail::field(j, "type", path), detail::sub(path, "type"));
  if (type == "cyclic") {
    const json& e = detail::field(j, "elements", path);
    if (!e.is_array()) detail::schema_fail(detail::sub(path, "elements"), "expected an array");
    CyclicSubset s;
    for (std::size_t i = 0; i < e.size(); ++i)
      s.elements.push_back(detail::get_u64(e[i], detail::idx(detail::sub(path, "elements"), i)));
    return s;
  }
  if (type == "box") {
    const json& a = detail::field(j, "arcs", path);
    if (!a.is_array() || a.empty()) detail::schema_fail(detail::sub(path, "arcs"), "expected a nonempty array");
    BoxSet b;
    for (std::size_t i = 0; i < a.size(); ++i) b.push_back(detail::parse_arc(a[i], detail::idx(detail::sub(path, "arcs"), i)));
    return b;
  }
  detail::schema_fail(detail::sub(path, "type"), "expected a cyclic subset or a box for this analysis");
}

inline IntegerSet parse_integer_set(const json& j, const BasisPtr& basis, const std::string& path = "set") {
  if (!j.is_object()) detail::schema_fail(path, "expected an object");
  if (j.contains("builtin")) {
    std::string name = detail::get_string(j["builtin"], detail::sub(path, "builtin"));
    Params p = detail::get_params(j, path);
    if (name == "odds") return IntegerSet::odds();
    if (name == "example2") return example2_set();
    if (name == "example5")
      return example5_set(detail::param(p, "alpha", "sqrt(2)-1"), detail::param(p, "eps", "1/100"));
    detail::schema_fail(detail::sub(path, "builtin"), "unknown builtin set '" + name + "'");
  }
  std::string type = detail::get_string(detail::field(j, "type", path), detail::sub(path, "type"));
  if (type == "odds") return IntegerSet::odds();
  if (type == "all") return IntegerSet::all();
  if (type == "explicit") {
    const json& e = detail::field(j, "elements", path);
    if (!e.is_array()) detail::schema_fail(detail::sub(path, "elements"), "expected an array");
    std::vector<std::uint64_t> elems;
    for (std::size_t i = 0; i < e.size(); ++i)
      elems.push_back(detail::get_u64(e[i], detail::idx(detail::sub(path, "elements"), i)));
    std::uint64_t n_max = detail::get_u64(detail::field(j, "n_max", path), detail::sub(path, "n_max"));
    return IntegerSet::explicit_set(std::move(elems), n_max);
  }
  if (type == "bohr") {
    auto names = detail::string_list(detail::field(j, "alpha", path), detail::sub(path, "alpha"));
    const json& w = detail::field(j, "windows", path);
    if (!w.is_array() || w.size() != names.size())
      detail::schema_fail(detail::sub(path, "windows"), "expected one window per constant");
    std::vector<BigFloat> alpha;
    std::vector<std::pair<Rational, Rational>> windows;
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::string wp = detail::idx(detail::sub(path, "windows"), i);
      alpha.push_back(detail::constant_in(names[i], basis, detail::idx(detail::sub(path, "alpha"), i)));
      if (!w[i].is_array() || w[i].size() != 2) detail::schema_fail(wp, "a window is a pair [lo, hi)");
      windows.emplace_back(parse_rational_json(w[i][0], detail::idx(wp, 0)), parse_rational_json(w[i][1], detail::idx(wp, 1)));
    }
    try {
      return IntegerSet::bohr(alpha, windows);
    } catch (const Error& e) {
      detail::schema_fail(path, e.what());
    }
  }
  detail::schema_fail(detail::sub(path, "type"), "expected an integer set (odds, all, explicit, bohr)");
}

inline Weight parse_weight(const json& j, const Experiment& ex, const std::string& path = "weight") {
  if (j.is_string()) {
    std::string name = j.get<std::string>();
    if (name == "auto") return choose_weight(ex.family ? ex.family->family : Family{});
    if (name == "cesaro") return Weight::cesaro();
    for (auto& W : weight_ladder())
      if (W.name == name) return W;
    detail::schema_fail(path, "unknown weight '" + name + "'");
  }
  if (j.is_object() && j.contains("germ")) {
    BasisPtr basis = ex.family ? ex.family->basis : nullptr;
    HardyExpr g = parse_function(j["germ"], basis, detail::sub(path, "germ"));
    return Weight::from_germ(g, j.contains("name") ? detail::get_string(j["name"], detail::sub(path, "name")) : "");
  }
  detail::schema_fail(path, "expected \"auto\", a ladder name, or {\"germ\": function}");
}

/// Validates a descriptor and resolves family and system.
inline Experiment parse_experiment(const json& j) {
  if (!j.is_object()) detail::schema_fail("", "descriptor must be a JSON object");
  detail::check_keys(j, "", {"schema_version", "analysis", "family", "system", "set", "weight", "mode", "grid", "seed",
                             "precision", "format", "params", "description"});
  Experiment ex;
  ex.descriptor = j;
  if (j.contains("schema_version") && j["schema_version"] != schema_version)
    detail::schema_fail("schema_version", "unsupported schema version");
  ex.descriptor["schema_version"] = schema_version;
  ex.analysis = detail::get_string(detail::field(j, "analysis", ""), "analysis");
  bool known = false;
  for (auto& k : analysis_kinds()) known = known || k == ex.analysis;
  if (!known) detail::schema_fail("analysis", "unknown analysis '" + ex.analysis + "'");
  if (j.contains("family")) ex.family = parse_family_spec(j["family"]);
  if (j.contains("system")) ex.system = parse_system(j["system"], ex.family ? ex.family->basis : nullptr);
  if (j.contains("mode")) {
    try {
      ex.mode = parse_rounding_mode(detail::get_string(j["mode"], "mode"));
    } catch (const Error& e) {
      detail::schema_fail("mode", e.what());
    }
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_array() || g.empty()) detail::schema_fail("grid", "expected a nonempty array");
    ex.grid.clear();
    for (std::size_t i = 0; i < g.size(); ++i) {
      ex.grid.push_back(detail::get_u64(g[i], detail::idx("grid", i)));
      if (ex.grid.back() < 1 || (i && ex.grid[i] <= ex.grid[i - 1]))
        detail::schema_fail(detail::idx("grid", i), "grid must be positive and strictly ascending");
    }
  }
  if (j.contains("seed")) ex.seed = detail::get_u64(j["seed"], "seed");
  if (j.contains("precision")) {
    std::uint64_t d = detail::get_u64(j["precision"], "precision");
    if (d < 1 || d > max_digits) detail::schema_fail("precision", "digits must be in [1, 512]");
    ex.digits = static_cast<unsigned>(d);
  }
  if (j.contains("format")) {
    ex.format = detail::get_string(j["format"], "format");
    if (ex.format != "json" && ex.format != "csv") detail::schema_fail("format", "expected json or csv");
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) detail::schema_fail("params", "expected an object");
    ex.params = j["params"];
  }
  return ex;
}

// ---------------------------------------------------------------------------
// Analyses

namespace detail {

inline const Family& need_family(const Experiment& ex) {
  if (!ex.family) schema_fail("family", "this analysis needs a family");
  return ex.family->family;
}

inline const System& need_system(const Experiment& ex) {
  if (!ex.system) schema_fail("system", "this analysis needs a system");
  return *ex.system;
}

inline const json& need_set(const Experiment& ex) {
  auto it = ex.descriptor.find("set");
  if (it == ex.descriptor.end()) schema_fail("set", "this analysis needs a set");
  return *it;
}

inline Weight resolve_weight(const Experiment& ex) {
  return parse_weight(ex.descriptor.contains("weight") ? ex.descriptor["weight"] : json("auto"), ex);
}

inline json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

inline json verdict_json(const ConditionVerdict& v) { return {{"verdict", to_string(v.kind)}, {"detail", v.detail}}; }

inline json witness_json(const std::optional<PatternWitness>& w) {
  if (!w) return nullptr;
  json elems = json::array({w->a});
  for (auto k : w->offsets) elems.push_back(static_cast<std::int64_t>(w->a) + k);
  return {{"a", w->a}, {"n", w->n}, {"offsets", w->offsets}, {"elements", elems}};
}

inline json search_json(const PatternSearchResult& r) {
  return {{"result", r.witness ? "witness" : "none"},
          {"witness", witness_json(r.witness)},
          {"searched_n", r.n_max},
          {"n_min", r.n_min},
          {"a_max", r.a_max}};
}

inline json correlation_table(const CorrelationReport& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.grid.size(); ++i)
    rows.push_back({r.grid[i], r.averages[i].real(), r.weight_totals[i], r.std_errors[i], r.averages[i].imag()});
  return {{"columns", {"N", "weighted_average", "weight_total", "stderr", "weighted_average_imag"}}, {"rows", rows}};
}

inline json correlation_json(const CorrelationReport& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.grid.size(); ++i)
    rows.push_back({{"N", r.grid[i]},
                    {"weighted_average", r.averages[i].real()},
                    {"weighted_average_imag", r.averages[i].imag()},
                    {"weight_total", r.weight_totals[i]},
                    {"stderr", r.std_errors[i]}});
  return {{"mode", r.mode}, {"weight", r.weight}, {"engine", r.engine}, {"rows", rows}};
}

/// e(x) for x given modulo 1 as a phase.
inline std::complex<double> unit_phase(Phase p) { return unit(p.to_double()); }

/// Phase of f(n) mod 1 from a multiprecision evaluation.
inline PhaseSequence germ_phases(const HardyExpr& f) {
  auto ev = std::make_shared<GermEvaluator>(f);
  return [ev](std::uint64_t n) {
    EvalResult r = ev->eval(BigInt(static_cast<unsigned long>(n)), 256);
    return Phase::from_real(r.value);
  };
}

/// A bounded sequence from params.sequence:
///   {"type": "constant", "value": "1"}            a(n) = value
///   {"type": "parity"}                            a(n) = (-1)^n
///   {"type": "linear", "theta": expr}             a(n) = e(n theta)
///   {"type": "germ", "function": i}               a(n) = e(f_i(n))
///   {"type": "rounded", "function": i, "theta": expr}  a(n) = e(theta [f_i(n)])
inline Sequence parse_sequence(const json& j, const Experiment& ex, const std::string& path) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  std::string type = get_string(field(j, "type", path), sub(path, "type"));
  BasisPtr basis = ex.family ? ex.family->basis : nullptr;
  auto fn = [&]() -> const HardyExpr& {
    std::uint64_t i = j.contains("function") ? get_u64(j["function"], sub(path, "function")) : 0;
    const Family& F = need_family(ex);
    if (i >= F.size()) schema_fail(sub(path, "function"), "no such family member");
    return F[i];
  };
  if (type == "constant") {
    double v = j.contains("value") ? get_double(j["value"], sub(path, "value")) : 1.0;
    return [v](std::uint64_t) { return SeqValue{v}; };
  }
  if (type == "parity") return [](std::uint64_t n) { return SeqValue{n % 2 ? -1.0 : 1.0}; };
  if (type == "linear") {
    Phase theta = Phase::from_real(constant_in(get_string(field(j, "theta", path), sub(path, "theta")), basis, sub(path, "theta")));
    return [theta](std::uint64_t n) { return SeqValue{unit_phase(theta.times_u128(n))}; };
  }
  if (type == "germ") {
    PhaseSequence x = germ_phases(fn());
    return [x](std::uint64_t n) { return SeqValue{unit_phase(x(n))}; };
  }
  if (type == "rounded") {
    Phase theta = Phase::from_real(constant_in(get_string(field(j, "theta", path), sub(path, "theta")), basis, sub(path, "theta")));
    auto r = std::make_shared<Rounder>(fn(), ex.digits);
    RoundingMode mode = ex.mode;
    return [theta, r, mode](std::uint64_t n) { return SeqValue{unit_phase(theta.times((*r)(n, mode)))}; };
  }
  schema_fail(sub(path, "type"), "unknown sequence type '" + type + "'");
}

inline PhaseSequence parse_phase_sequence(const json& j, const Experiment& ex, const std::string& path) {
  if (!j.is_object()) schema_fail(path, "expected an object");
  std::string type = get_string(field(j, "type", path), sub(path, "type"));
  BasisPtr basis = ex.family ? ex.family->basis : nullptr;
  if (type == "linear") {
    Phase theta = Phase::from_real(constant_in(get_string(field(j, "theta", path), sub(path, "theta")), basis, sub(path, "theta")));
    return [theta](std::uint64_t n) { return theta.times_u128(n); };
  }
  if (type == "germ") {
    std::uint64_t i = j.contains("function") ? get_u64(j["function"], sub(path, "function")) : 0;
    const Family& F = need_family(ex);
    if (i >= F.size()) schema_fail(sub(path, "function"), "no such family member");
    return germ_phases(F[i]);
  }
  schema_fail(sub(path, "type"), "equidistribution sequences are linear or germ");
}

inline json run_condition(const Experiment& ex, RunReport&) {
  const Family& F = need_family(ex);
  json out;
  ConditionVerdict inf = check_condition_INF(F);
  json ji = verdict_json(inf);
  if (inf.inf) {
    json c = json::array();
    for (auto& ci : inf.inf->c) c.push_back(ci.to_string());
    ji["witness"] = {{"c", c}, {"q", inf.inf->q.to_string()}, {"residual", inf.inf->residual.to_string()},
                     {"decay", inf.inf->decay.to_string()}};
    WitnessCheck chk = verify_inf_witness(F, *inf.inf);
    ji["check"] = {{"ok", chk.ok}, {"max_deviation", chk.max_deviation}, {"t", {1e3, 1e4, 1e5}}};
  }
  out["INF"] = ji;
  std::uint64_t M = param_u64(ex.params, "M", 10000);
  ConditionVerdict in = check_condition_INT(F, M);
  json jn = verdict_json(in);
  if (in.intersective) {
    json q = json::array();
    for (auto& p : in.intersective->q) q.push_back(p.to_string());
    jn["polynomials"] = q;
    jn["bound"] = in.intersective->report.bound;
    jn["all_pass"] = in.intersective->report.all_pass;
    if (!in.intersective->report.all_pass) jn["failing_modulus"] = in.intersective->report.failing_modulus;
    jn["shortcut"] = in.intersective->shortcut;
  }
  out["INT"] = jn;
  std::vector<int> cv = characteristic_vector(F);
  out["characteristic_vector"] = cv;
  try {
    Weight W = resolve_weight(ex);
    ConditionVerdict p = check_property_P(F, W);
    out["P"] = verdict_json(p);
    out["P"]["weight"] = W.name;
  } catch (const Error& e) {
    if (e.code() != Errc::no_compatible_weight) throw;
    out["P"] = {{"verdict", "Fails"}, {"detail", e.what()}, {"weight", nullptr}};
  }
  return out;
}

inline json run_avg(const Experiment& ex, RunReport& rep, unsigned threads) {
  Weight W = resolve_weight(ex);
  WeightFn wf(W);
  Sequence a = parse_sequence(field(ex.params, "sequence", "params"), ex, "params.sequence");
  CorrelationReport r = weighted_avg(a, wf, ex.grid, {threads});
  r.mode = to_string(ex.mode);
  r.weight = W.name;
  json out = correlation_json(r);
  if (ex.params.contains("ap")) {
    const json& ap = ex.params["ap"];
    std::uint64_t R = get_u64(field(ap, "R", "params.ap"), "params.ap.R");
    std::uint64_t N = ap.contains("N") ? get_u64(ap["N"], "params.ap.N") : ex.grid.back();
    out["ap"] = {{"R", R}, {"N", N}, {"residual", ap_decomposition_check(a, wf, R, N, threads)}};
  }
  rep.csv_table = correlation_table(r);
  return out;
}

inline json run_multicorr(const Experiment& ex, RunReport& rep, unsigned threads) {
  const Family& F = need_family(ex);
  const System& sys = need_system(ex);
  EventSet A = parse_event_set(need_set(ex));
  Weight W = resolve_weight(ex);
  WeightFn wf(W);
  MulticorrOptions opt;
  opt.threads = threads;
  opt.digits = ex.digits;
  opt.seed = ex.seed;
  opt.samples = param_u64(ex.params, "samples", opt.samples);
  CorrelationReport r = multicorrelation(sys, A, F, ex.mode, wf, ex.grid, opt);
  r.weight = W.name;
  json out = correlation_json(r);
  if (r.engine == "sampled") {
    out["samples"] = opt.samples;
    out["seed"] = opt.seed;
  }
  rep.csv_table = correlation_table(r);
  return out;
}

inline FiniteObservable parse_observable(const json& p) {
  std::uint64_t m = get_u64(field(p, "m", "params"), "params.m");
  if (m < 1) schema_fail("params.m", "modulus must be >= 1");
  FiniteObservable h;
  h.shift = param_u64(p, "shift", 1);
  h.values.assign(m, 0.0);
  const json& o = field(p, "observable", "params");
  std::string type = get_string(field(o, "type", "params.observable"), "params.observable.type");
  if (type == "constant") {
    double v = o.contains("value") ? get_double(o["value"], "params.observable.value") : 1.0;
    for (auto& x : h.values) x = v;
  } else if (type == "indicator") {
    const json& e = field(o, "elements", "params.observable");
    for (std::size_t i = 0; i < e.size(); ++i) {
      std::uint64_t x = get_u64(e[i], idx("params.observable.elements", i));
      if (x >= m) schema_fail(idx("params.observable.elements", i), "element outside Z_m");
      h.values[x] = 1.0;
    }
  } else if (type == "character") {
    std::int64_t freq = get_i64(field(o, "h", "params.observable"), "params.observable.h");
    auto M = static_cast<std::int64_t>(m);
    for (std::int64_t x = 0; x < M; ++x) {
      std::int64_t r = (freq % M) * x % M;
      h.values[static_cast<std::size_t>(x)] = unit(static_cast<double>(r < 0 ? r + M : r) / static_cast<double>(M));
    }
  } else if (type == "values") {
    const json& v = field(o, "values", "params.observable");
    if (!v.is_array() || v.size() != m) schema_fail("params.observable.values", "expected m values");
    for (std::size_t i = 0; i < m; ++i) {
      std::string vp = idx("params.observable.values", i);
      if (v[i].is_array() && v[i].size() == 2) h.values[i] = {get_double(v[i][0], vp), get_double(v[i][1], vp)};
      else h.values[i] = get_double(v[i], vp);
    }
  } else {
    schema_fail("params.observable.type", "unknown observable type '" + type + "'");
  }
  return h;
}

inline json run_seminorm(const Experiment& ex, RunReport& rep) {
  FiniteObservable h = parse_observable(ex.params);
  std::vector<std::uint64_t> orders{1, 2, 3};
  if (ex.params.contains("orders")) {
    orders.clear();
    for (std::size_t i = 0; i < ex.params["orders"].size(); ++i)
      orders.push_back(get_u64(ex.params["orders"][i], idx("params.orders", i)));
  }
  bool oracle = ex.params.value("oracle", true);
  json rows = json::array(), table = json::array();
  for (auto s : orders) {
    if (s > 16) schema_fail("params.orders", "order must be <= 16");
    json row{{"s", s}, {"seminorm", gowers_seminorm(h, static_cast<int>(s))}};
    double cost = std::pow(static_cast<double>(h.m()), static_cast<double>(s + 1)) * std::ldexp(1.0, static_cast<int>(s));
    if (oracle && s >= 1 && cost <= 1e8) row["oracle"] = gowers_box_oracle(h, static_cast<int>(s));
    else row["oracle"] = nullptr;
    table.push_back({s, row["seminorm"], row["oracle"]});
    rows.push_back(row);
  }
  rep.csv_table = {{"columns", {"s", "seminorm", "oracle"}}, {"rows", table}};
  return {{"m", h.m()}, {"shift", h.shift}, {"orders", rows}};
}

inline json run_equi(const Experiment& ex, RunReport& rep, unsigned threads) {
  Weight W = resolve_weight(ex);
  WeightFn wf(W);
  json out{{"weight", W.name}};
  json series = json::array(), table = json::array();
  if (ex.system) {
    int levels = static_cast<int>(param_u64(ex.params, "box_level", 4));
    for (auto N : ex.grid) {
      DiscrepancyReport d = joint_orbit_discrepancy(*ex.system, need_family(ex), ex.mode, wf, N, levels, threads, ex.digits);
      series.push_back({{"N", N}, {"values", d.values}, {"max", d.max_value}, {"argmax_level", d.argmax},
                        {"min_distance_to_identity", d.min_distance_to_identity}});
      for (std::size_t L = 0; L < d.values.size(); ++L) table.push_back({N, L + 1, d.values[L]});
    }
    out["kind"] = "joint_orbit";
    out["mode"] = to_string(ex.mode);
    rep.csv_table = {{"columns", {"N", "box_level", "value"}}, {"rows", table}};
  } else {
    PhaseSequence x = parse_phase_sequence(field(ex.params, "sequence", "params"), ex, "params.sequence");
    std::size_t H = param_u64(ex.params, "H", 10);
    for (auto N : ex.grid) {
      DiscrepancyReport d = weyl_discrepancy(x, wf, N, H, threads);
      series.push_back({{"N", N}, {"values", d.values}, {"max", d.max_value}, {"argmax_h", d.argmax}});
      for (std::size_t h = 0; h < d.values.size(); ++h) table.push_back({N, h + 1, d.values[h]});
    }
    out["kind"] = "weyl";
    out["H"] = H;
    rep.csv_table = {{"columns", {"N", "H", "value"}}, {"rows", table}};
  }
  out["series"] = series;
  return out;
}

inline json run_pattern(const Experiment& ex, RunReport&, unsigned threads) {
  const Family& F = need_family(ex);
  IntegerSet E = parse_integer_set(need_set(ex), ex.family->basis);
  std::uint64_t n_min = param_u64(ex.params, "n_min", 1);
  std::uint64_t n_max = param_u64(ex.params, "n_max", ex.grid.back());
  std::uint64_t a_max = param_u64(ex.params, "a_max", n_max);
  json out = search_json(find_pattern(E, F, ex.mode, n_min, n_max, a_max, threads, ex.digits));
  out["set"] = E.name();
  out["mode"] = to_string(ex.mode);
  return out;
}

inline json run_return_set(const Experiment& ex, RunReport&, unsigned threads) {
  const Family& F = need_family(ex);
  const System& sys = need_system(ex);
  EventSet A = parse_event_set(need_set(ex));
  std::uint64_t N = param_u64(ex.params, "N", ex.grid.back());
  auto R = return_set(sys, A, F, ex.mode, N, threads, ex.digits);
  json out{{"N", N}, {"size", R.size()}, {"mode", to_string(ex.mode)}};
  std::uint64_t list_max = param_u64(ex.params, "list_max", 10000);
  if (R.size() <= list_max) out["elements"] = R;
  else out["elements"] = json(std::vector<std::uint64_t>(R.begin(), R.begin() + static_cast<std::ptrdiff_t>(list_max)));
  out["density"] = N ? static_cast<double>(R.size()) / static_cast<double>(N) : 0.0;
  std::vector<std::uint64_t> windows;
  if (ex.params.contains("windows"))
    for (std::size_t i = 0; i < ex.params["windows"].size(); ++i)
      windows.push_back(get_u64(ex.params["windows"][i], idx("params.windows", i)));
  else if (N >= 1000)
    windows.push_back(1000);
  json probe = json::array();
  auto vals = banach_density_probe(R, N, windows);
  for (std::size_t i = 0; i < windows.size(); ++i) probe.push_back({{"window", windows[i]}, {"value", vals[i]}});
  out["banach_density_probe"] = probe;
  return out;
}

inline json run_probe(const Experiment& ex, RunReport&, unsigned threads) {
  const Family& F = need_family(ex);
  json out;
  if (ex.descriptor.contains("set")) {
    IntegerSet E = parse_integer_set(ex.descriptor["set"], ex.family->basis);
    std::uint64_t l = param_u64(ex.params, "l", 1);
    std::uint64_t n_min = param_u64(ex.params, "n_min", 1);
    std::uint64_t n_max = param_u64(ex.params, "n_max", ex.grid.back());
    std::uint64_t a_max = param_u64(ex.params, "a_max", n_max);
    out = search_json(cor_a4_probe(F, static_cast<int>(l), E, ex.mode, n_min, n_max, a_max, threads, ex.digits));
    out["l"] = l;
    out["set"] = E.name();
    out["mode"] = to_string(ex.mode);
  }
  if (ex.params.contains("combination")) {
    const json& c = ex.params["combination"];
    const json& terms = field(c, "terms", "params.combination");
    if (!terms.is_array() || terms.empty()) schema_fail("params.combination.terms", "expected a nonempty array");
    std::vector<ShiftTerm> st;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      std::string p = idx("params.combination.terms", i);
      std::uint64_t f = get_u64(field(terms[i], "function", p), sub(p, "function"));
      if (f >= F.size()) schema_fail(sub(p, "function"), "no such family member");
      st.push_back({f, static_cast<long>(get_i64(field(terms[i], "shift", p), sub(p, "shift"))),
                    parse_rational_json(field(terms[i], "coeff", p), sub(p, "coeff"))});
    }
    Rational t = parse_rational_json(field(c, "t", "params.combination"), "params.combination.t");
    Rational min_exp = c.contains("min_exp") ? parse_rational_json(c["min_exp"], "params.combination.min_exp") : Rational(0);
    ShiftedCombination r = shifted_combination(F, st, BigFloat(t, 320), min_exp);
    out["combination"] = {{"t", t.get_str()},
                          {"value", r.value.to_string(30)},
                          {"error", r.error},
                          {"expansion", r.expansion.to_string()},
                          {"remainder_coeff", r.remainder_coeff.get_str()},
                          {"remainder_exp", r.remainder_exp.get_str()}};
  }
  if (out.is_null()) schema_fail("params", "probe needs a set or params.combination");
  return out;
}

}  // namespace detail

inline RunReport run(const Experiment& ex, const RunOptions& opt = {}) {
  auto t0 = std::chrono::steady_clock::now();
  precision_peak().store(0);
  RunReport rep;
  rep.descriptor = ex.descriptor;
  rep.start_digits = ex.digits;
  unsigned threads = std::max(1u, opt.threads);
  const std::string& a = ex.analysis;
  if (a == "condition") rep.results = detail::run_condition(ex, rep);
  else if (a == "avg") rep.results = detail::run_avg(ex, rep, threads);
  else if (a == "multicorr") rep.results = detail::run_multicorr(ex, rep, threads);
  else if (a == "seminorm") rep.results = detail::run_seminorm(ex, rep);
  else if (a == "equi") rep.results = detail::run_equi(ex, rep, threads);
  else if (a == "pattern") rep.results = detail::run_pattern(ex, rep, threads);
  else if (a == "return-set") rep.results = detail::run_return_set(ex, rep, threads);
  else if (a == "probe") rep.results = detail::run_probe(ex, rep, threads);
  else detail::schema_fail("analysis", "unknown analysis '" + a + "'");
  rep.peak_digits = precision_peak().load();
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Full report; `results` is the reproducible payload.
inline json report_json(const RunReport& rep) {
  return {{"schema_version", schema_version},
          {"tool_version", tool_version},
          {"analysis", rep.descriptor.value("analysis", "")},
          {"descriptor", rep.descriptor},
          {"results", rep.results},
          {"precision", {{"start_digits", rep.start_digits}, {"ceiling_digits", max_digits}, {"peak_digits", rep.peak_digits}}},
          {"wall_time_seconds", rep.wall_seconds}};
}

namespace detail {

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

inline void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  if (v.is_object()) {
    for (auto& [k, x] : v.items()) flatten(x, prefix.empty() ? k : prefix + "." + k, out);
  } else if (v.is_array() && !v.empty() && (v[0].is_object() || v[0].is_array())) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
    out.emplace_back(prefix, s);
  } else {
    out.emplace_back(prefix, v);
  }
}

}  // namespace detail

/// Tabular analyses write their fixed columns; the others write field,value
/// rows of the flattened payload.
inline std::string report_csv(const RunReport& rep) {
  std::ostringstream os;
  if (!rep.csv_table.is_null()) {
    auto& cols = rep.csv_table["columns"];
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i].get<std::string>();
    os << "\n";
    for (auto& row : rep.csv_table["rows"]) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << detail::csv_cell(row[i]);
      os << "\n";
    }
    return os.str();
  }
  std::vector<std::pair<std::string, json>> rows;
  detail::flatten(rep.results, "", rows);
  os << "field,value\n";
  for (auto& [k, v] : rows) os << detail::csv_cell(k) << "," << detail::csv_cell(v) << "\n";
  return os.str();
}

/// Reads a descriptor file; JSON syntax errors report line and column.
inline json load_descriptor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::schema_error, "cannot open descriptor '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(Errc::schema_error,
                path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON (" + e.what() + ")");
  }
}

/// Process exit status for an error class.
inline int exit_code(Errc c) {
  switch (c) {
    case Errc::schema_error: return 2;
    case Errc::precondition_violation:
    case Errc::wrong_variant:
    case Errc::no_compatible_weight:
    case Errc::undeclared_product:
    case Errc::domain_error:
    case Errc::truncation_uncertified: return 3;
    case Errc::uncertifiable_rounding:
    case Errc::precision_exhausted: return 4;
  }
  return 1;
}

/// Exit status 5 marks a condition analysis whose verdicts include Unknown.
inline int report_status(const RunReport& rep) {
  if (rep.descriptor.value("analysis", "") != "condition") return 0;
  for (const char* k : {"INF", "INT", "P"})
    if (rep.results.contains(k) && rep.results[k].value("verdict", "") == "Unknown") return 5;
  return 0;
}

}  // namespace hfl
