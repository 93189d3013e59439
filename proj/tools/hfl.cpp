// hfl: experiment runner.
//
//   hfl <analysis> --spec FILE [--format csv|json] [--out PATH] [--precision D] [--threads T]
//   hfl builtins list [--filter TEXT]
//   hfl builtins dump NAME [--param key=value ...]

#include <hfl/experiment.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct AnalysisFlags {
  std::string spec;
  std::string format;
  std::string out;
  std::string mode;
  unsigned precision = 0;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) throw hfl::Error(hfl::Errc::precondition_violation, "cannot write '" + path + "'");
  os << text;
}

int run_analysis(const std::string& analysis, const AnalysisFlags& f) {
  hfl::json d = hfl::load_descriptor(f.spec);
  if (!d.is_object()) throw hfl::Error(hfl::Errc::schema_error, f.spec + ": descriptor must be a JSON object");
  if (d.contains("analysis") && d["analysis"] != analysis)
    throw hfl::Error(hfl::Errc::schema_error, "analysis: descriptor declares '" + d["analysis"].dump() +
                                                  "' but the subcommand is '" + analysis + "'");
  d["analysis"] = analysis;
  if (!f.format.empty()) d["format"] = f.format;
  if (f.precision) d["precision"] = f.precision;
  if (!f.mode.empty()) d["mode"] = f.mode;
  if (f.seed) d["seed"] = *f.seed;
  hfl::Experiment ex = hfl::parse_experiment(d);
  hfl::RunOptions opt;
  opt.threads = f.threads ? f.threads : hfl::default_threads();
  hfl::RunReport rep = hfl::run(ex, opt);
  write_output(f.out, ex.format == "csv" ? hfl::report_csv(rep) : hfl::report_json(rep).dump(2) + "\n");
  return hfl::report_status(rep);
}

hfl::json builtin_json(const hfl::BuiltinInfo& b) {
  hfl::json params = hfl::json::object();
  for (auto& [k, v] : b.params) params[k] = v;
  return {{"name", b.name}, {"kind", b.kind}, {"description", b.description}, {"params", params}};
}

int dump_builtin(const std::string& name, const std::vector<std::string>& kv) {
  hfl::Params p;
  for (auto& s : kv) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw hfl::Error(hfl::Errc::schema_error, "--param expects key=value, got '" + s + "'");
    p[s.substr(0, eq)] = s.substr(eq + 1);
  }
  for (auto& b : hfl::builtin_catalog()) {
    if (b.name != name) continue;
    hfl::json out = builtin_json(b);
    if (b.kind == "family") out["family"] = hfl::family_to_json(hfl::builtin_family(name, p));
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  throw hfl::Error(hfl::Errc::schema_error, "unknown builtin '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy-field multiple recurrence experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hfl::tool_version);

  std::map<std::string, AnalysisFlags> flags;
  std::map<std::string, CLI::App*> subs;
  for (auto& kind : hfl::analysis_kinds()) {
    auto& f = flags[kind];
    CLI::App* s = app.add_subcommand(kind, "run the " + kind + " analysis");
    s->add_option("--spec", f.spec, "experiment descriptor (JSON)")->required()->check(CLI::ExistingFile);
    s->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--out", f.out, "output path (default stdout)");
    s->add_option("--precision", f.precision, "starting decimal digits")->check(CLI::Range(1u, hfl::max_digits));
    s->add_option("--threads", f.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    s->add_option("--mode", f.mode, "rounding mode")->check(CLI::IsMember({"floor", "ceil", "nearest"}));
    s->add_option("--seed", f.seed, "seed for sampled engines");
    subs[kind] = s;
  }

  CLI::App* builtins = app.add_subcommand("builtins", "catalog of named constants, families, systems and sets");
  builtins->require_subcommand(1);
  std::string filter;
  CLI::App* list = builtins->add_subcommand("list", "list the catalog as JSON");
  list->add_option("--filter", filter, "substring of the name, or a kind");
  std::string dump_name;
  std::vector<std::string> dump_params;
  CLI::App* dump = builtins->add_subcommand("dump", "print one entry, with its family document");
  dump->add_option("name", dump_name)->required();
  dump->add_option("--param", dump_params, "parameter override key=value");

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& [kind, s] : subs)
      if (s->parsed()) return run_analysis(kind, flags[kind]);
    if (list->parsed()) {
      hfl::json out = hfl::json::array();
      for (auto& b : hfl::list_builtins(filter)) out.push_back(builtin_json(b));
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (dump->parsed()) return dump_builtin(dump_name, dump_params);
  } catch (const hfl::Error& e) {
    std::cerr << "hfl: " << e.what() << "\n";
    return hfl::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "hfl: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
