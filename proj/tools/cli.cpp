#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chemostokes/acceptance.hpp"
#include "chemostokes/config.hpp"
#include "chemostokes/errors.hpp"
#include "chemostokes/feasibility.hpp"
#include "chemostokes/parallel.hpp"
#include "chemostokes/run.hpp"
#include "chemostokes/studies.hpp"
#include "json.hpp"

namespace chemostokes {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Globals {
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

RunConfig load(const Globals& g, bool required) {
  RunConfig cfg;
  if (!g.config_path.empty()) cfg = load_config(g.config_path);
  else if (required) throw UsageError("--config PATH is required");
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out_dir.empty()) cfg.output.directory = g.out_dir;
  return cfg;
}

int exit_for(const RunResult& r) {
  if (r.failure) return kExitRejected;
  for (const auto& v : r.verdicts)
    if (v.check != "odi_monitor" && !v.pass) return kExitVerificationFailed;
  return kExitOk;
}

int simulate(const Globals& g, const std::string& restart, std::ostream& out) {
  const RunConfig cfg = load(g, true);
  const fs::path dir = cfg.output.directory;
  fs::create_directories(dir);
  write_text(dir / "config.ini", canonical_echo(cfg));
  RunOptions opts;
  opts.out_dir = dir;
  if (!restart.empty()) opts.restart_from = restart;
  const RunResult r = run(cfg, opts);
  out << "final_t " << format_double(r.final_state.t) << "  steps " << r.final_state.step
      << "  sup_n " << format_double(r.sup_n) << "\n";
  for (const auto& v : r.verdicts)
    out << "  " << v.check << ": " << (v.pass ? "pass" : "FAIL") << " (worst "
        << format_double(v.worst_value) << ", " << v.location << ")\n";
  if (r.failure) out << "rejected: " << r.failure->diagnosis << "\n";
  return exit_for(r);
}

std::vector<int> parse_selection(const std::string& text) {
  std::vector<int> ids;
  std::stringstream ss(text);
  std::string item;
  const auto& names = criterion_names();
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    const auto it = std::find(names.begin(), names.end(), item);
    if (it != names.end()) {
      ids.push_back(static_cast<int>(it - names.begin()) + 1);
      continue;
    }
    try {
      std::size_t used = 0;
      const int id = std::stoi(item, &used);
      if (used != item.size() || id < 1 || id > 9) throw std::invalid_argument(item);
      ids.push_back(id);
    } catch (const std::exception&) {
      throw UsageError("unknown acceptance check '" + item + "'");
    }
  }
  if (ids.empty()) throw UsageError("--only selects no checks");
  return ids;
}

int verify(const Globals& g, bool only_given, const std::string& only, const std::string& fault,
           std::ostream& out) {
  if (!g.config_path.empty()) load(g, false);  // validates; the suite has fixed scenarios
  AcceptanceOptions opts;
  if (only_given) opts.only = parse_selection(only);
  if (!fault.empty()) {
    if (fault != "mass-leak") throw UsageError("unknown fault '" + fault + "'");
    opts.flux_hook = mass_leak_hook();
  }
  const auto results = run_acceptance(opts);
  bool all = true;
  ordered_json report = ordered_json::array();
  char line[256];
  std::snprintf(line, sizeof line, "%-3s %-26s %-6s %9s  %s\n", "id", "check", "result", "seconds",
                "detail");
  out << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-3d %-26s %-6s %9.2f  ", r.id, r.name.c_str(),
                  r.pass ? "PASS" : "FAIL", r.seconds);
    out << line << r.detail << "\n";
    all = all && r.pass;
    report.push_back({{"id", r.id}, {"check", r.name}, {"pass", r.pass}, {"seconds", r.seconds},
                      {"detail", r.detail}});
  }
  if (!g.out_dir.empty()) write_text(fs::path(g.out_dir) / "verify.json", report.dump(2) + "\n");
  if (!all) {
    out << "failed:";
    for (const auto& r : results)
      if (!r.pass) out << " " << r.name;
    out << "\n";
  }
  return all ? kExitOk : kExitVerificationFailed;
}

int feasibility(const Globals& g, double l_min, double l_max, int points, double tol,
                std::ostream& out) {
  std::vector<FeasibilityRow> rows;
  try {
    rows = feasibility_table(l_min, l_max, points, tol);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string csv = feasibility_csv(rows);
  out << csv;
  if (!g.out_dir.empty()) write_text(fs::path(g.out_dir) / "feasibility.csv", csv);
  return kExitOk;
}

int sweep(const Globals& g, const std::vector<std::string>& vary, std::ostream& out) {
  const RunConfig base = load(g, true);
  if (vary.empty()) throw UsageError("sweep needs at least one --vary key=v1,v2,...");
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& spec : vary) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--vary expects key=v1,v2,...");
    std::vector<std::string> values;
    std::stringstream ss(spec.substr(eq + 1));
    std::string v;
    while (std::getline(ss, v, ',')) values.push_back(v);
    if (values.empty()) throw UsageError("--vary " + spec.substr(0, eq) + " lists no values");
    axes.emplace_back(spec.substr(0, eq), values);
  }
  // Cartesian product, last axis fastest; every config is validated before any run.
  std::vector<std::vector<std::string>> combos{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<std::string>> next;
    for (const auto& c : combos)
      for (const auto& v : axis.second) {
        auto e = c;
        e.push_back(v);
        next.push_back(e);
      }
    combos = std::move(next);
  }
  std::vector<RunConfig> configs;
  for (const auto& combo : combos) {
    RunConfig cfg = base;
    for (std::size_t a = 0; a < axes.size(); ++a) apply_override(cfg, axes[a].first, combo[a]);
    configs.push_back(cfg);
  }
  const fs::path root = base.output.directory;
  fs::create_directories(root);
  std::string table = "run";
  for (const auto& axis : axes) table += "," + axis.first;
  table += ",exit_code,final_t,steps\n";
  int worst = kExitOk;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    RunConfig cfg = configs[k];
    const fs::path dir = root / ("run_" + std::to_string(k));
    cfg.output.directory = dir.string();
    fs::create_directories(dir);
    write_text(dir / "config.ini", canonical_echo(cfg));
    RunOptions opts;
    opts.out_dir = dir;
    const RunResult r = run(cfg, opts);
    const int code = exit_for(r);
    worst = std::max(worst, code);
    table += "run_" + std::to_string(k);
    for (const auto& v : combos[k]) table += "," + v;
    table += "," + std::to_string(code) + "," + format_double(r.final_state.t) + "," +
             std::to_string(r.final_state.step) + "\n";
    out << "run_" << k << ": exit " << code << "\n";
  }
  write_text(root / "sweep.csv", table);
  return worst;
}

int convergence(const Globals& g, const std::string& study, std::ostream& out) {
  std::string csv;
  bool pass = true;
  if (study == "barenblatt") {
    const auto s = barenblatt_study();
    csv = convergence_csv(s);
    pass = *std::min_element(s.orders.begin(), s.orders.end()) >= 0.8;
  } else if (study == "heat") {
    const auto s = heat_study();
    csv = convergence_csv(s);
    pass = *std::min_element(s.orders.begin(), s.orders.end()) >= 1.8;
  } else if (study == "weak-residual") {
    const RunConfig base = g.config_path.empty() ? smoke_config() : load(g, false);
    const auto s = weak_residual_study(base);
    csv = weak_study_csv(s);
    pass = s.min_ratio >= 1.8;
  } else {
    throw UsageError("unknown study '" + study + "' (barenblatt, heat, weak-residual)");
  }
  out << csv;
  if (!g.out_dir.empty()) write_text(fs::path(g.out_dir) / (study + ".csv"), csv);
  return pass ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chemotaxis-Stokes porous-medium solver and verification driver", "chemostokes"};
  app.require_subcommand(1);
  Globals g;
  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--config", g.config_path, "Run configuration file");
    sub->add_option("--out", g.out_dir, "Output directory");
    sub->add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1, 256));
    sub->add_option("--seed", g.seed, "Random seed (overrides the config)");
  };

  auto* sim = app.add_subcommand("simulate", "Run one simulation and write its artifacts");
  add_globals(sim);
  std::string restart;
  sim->add_option("--restart", restart, "Continue from a checkpoint file");

  auto* ver = app.add_subcommand("verify", "Run the acceptance suite");
  add_globals(ver);
  std::string only;
  auto* only_opt = ver->add_option("--only", only, "Comma-separated check ids or names");
  std::string fault;
  ver->add_option("--inject-fault", fault)->group("");

  auto* fea = app.add_subcommand("feasibility", "Threshold comparison table");
  add_globals(fea);
  double l_min = 2.05, l_max = 4.0, tol = 1e-3;
  int points = 40;
  fea->add_option("--l-min", l_min, "Smallest l")->capture_default_str();
  fea->add_option("--l-max", l_max, "Largest l")->capture_default_str();
  fea->add_option("--points", points, "Number of l values")->capture_default_str();
  fea->add_option("--tol", tol, "Bisection tolerance")->capture_default_str();

  auto* swp = app.add_subcommand("sweep", "Run a parameter sweep into out/run_k");
  add_globals(swp);
  std::vector<std::string> vary;
  swp->add_option("--vary", vary, "key=v1,v2,... (repeatable)");

  auto* conv = app.add_subcommand("convergence", "Refinement study");
  add_globals(conv);
  std::string study;
  conv->add_option("study,--study", study, "barenblatt | heat | weak-residual")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    parallel::set_thread_count(g.threads);
    if (*sim) return simulate(g, restart, out);
    if (*ver) return verify(g, only_opt->count() > 0, only, fault, out);
    if (*fea) return feasibility(g, l_min, l_max, points, tol, out);
    if (*swp) return sweep(g, vary, out);
    return convergence(g, study, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const StepRejected& e) {
    err << "rejected: " << e.what() << "\n";
    return kExitRejected;
  }
}

}  // namespace chemostokes
