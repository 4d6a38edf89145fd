#include "chemostokes/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "chemostokes/errors.hpp"

namespace chemostokes {

namespace {

struct GridDraft {
  int dim = 2;
  std::vector<int> cells{48, 48};
  std::vector<double> lengths{4.0, 4.0};
};

struct Draft {
  GridDraft grid;
  RunConfig cfg;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("expected a number, got '" + std::string(v) + "'");
  if (!std::isfinite(out)) throw ConfigError("value must be finite");
  return out;
}

long to_long(std::string_view v) {
  v = trim(v);
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("expected an integer, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_u64(std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(std::string_view v) {
  v = trim(v);
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("expected true or false, got '" + std::string(v) + "'");
}

std::vector<double> to_doubles(std::string_view v) {
  std::vector<double> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(to_double(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::array<double, 3> to_vec3(std::string_view v, const char* what) {
  const auto xs = to_doubles(v);
  if (xs.size() < 2 || xs.size() > 3)
    throw ConfigError(std::string(what) + " needs 2 or 3 components");
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = xs[i];
  return out;
}

std::string join(const double* xs, int count) {
  std::string s;
  for (int i = 0; i < count; ++i) {
    if (i) s += ", ";
    s += format_double(xs[i]);
  }
  return s;
}

struct Key {
  const char* section;
  const char* name;
  std::function<void(Draft&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Key>& keys() {
  using NP = InitialSettings::NProfile;
  using CP = InitialSettings::CProfile;
  static const std::vector<Key> table = {
      {"", "seed", [](Draft& d, std::string_view v) { d.cfg.seed = to_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},

      {"grid", "dim",
       [](Draft& d, std::string_view v) { d.grid.dim = static_cast<int>(to_long(v)); },
       [](const RunConfig& c) { return std::to_string(c.grid.dim()); }},
      {"grid", "cells",
       [](Draft& d, std::string_view v) {
         d.grid.cells.clear();
         for (double x : to_doubles(v)) {
           if (x != std::floor(x)) throw ConfigError("grid.cells must be integers");
           d.grid.cells.push_back(static_cast<int>(x));
         }
       },
       [](const RunConfig& c) {
         std::string s;
         for (int a = 0; a < c.grid.dim(); ++a) s += (a ? ", " : "") + std::to_string(c.grid.cells(a));
         return s;
       }},
      {"grid", "lengths", [](Draft& d, std::string_view v) { d.grid.lengths = to_doubles(v); },
       [](const RunConfig& c) { return join(c.grid.lengths().data(), c.grid.dim()); }},

      {"model", "m", [](Draft& d, std::string_view v) { d.cfg.model.m = to_double(v); },
       [](const RunConfig& c) { return format_double(c.model.m); }},
      {"model", "l", [](Draft& d, std::string_view v) { d.cfg.model.l = to_double(v); },
       [](const RunConfig& c) { return format_double(c.model.l); }},
      {"model", "eps", [](Draft& d, std::string_view v) { d.cfg.model.eps = to_double(v); },
       [](const RunConfig& c) { return format_double(c.model.eps); }},
      {"model", "alpha_S", [](Draft& d, std::string_view v) { d.cfg.model.alpha_s = to_double(v); },
       [](const RunConfig& c) { return format_double(c.model.alpha_s); }},
      {"model", "beta_S", [](Draft& d, std::string_view v) { d.cfg.model.beta_s = to_double(v); },
       [](const RunConfig& c) { return format_double(c.model.beta_s); }},
      {"model", "s_law",
       [](Draft& d, std::string_view v) {
         v = trim(v);
         if (v == "constant") d.cfg.model.s_law = SensitivityLaw::Constant;
         else if (v == "affine") d.cfg.model.s_law = SensitivityLaw::Affine;
         else throw ConfigError("model.s_law must be constant or affine");
       },
       [](const RunConfig& c) {
         return std::string(c.model.s_law == SensitivityLaw::Constant ? "constant" : "affine");
       }},
      {"model", "s0", [](Draft& d, std::string_view v) { d.cfg.model.s0 = to_double(v); },
       [](const RunConfig& c) { return format_double(c.model.s0); }},
      {"model", "f_law",
       [](Draft& d, std::string_view v) {
         v = trim(v);
         if (v == "linear") d.cfg.model.f_law = ConsumptionLaw::Linear;
         else if (v == "saturating") d.cfg.model.f_law = ConsumptionLaw::Saturating;
         else throw ConfigError("model.f_law must be linear or saturating");
       },
       [](const RunConfig& c) {
         return std::string(c.model.f_law == ConsumptionLaw::Linear ? "linear" : "saturating");
       }},
      {"model", "grav", [](Draft& d, std::string_view v) { d.cfg.model.grav = to_vec3(v, "model.grav"); },
       [](const RunConfig& c) { return join(c.model.grav.data(), c.grid.dim()); }},
      {"model", "rotation_axis",
       [](Draft& d, std::string_view v) {
         d.cfg.model.rotation_axis = to_vec3(v, "model.rotation_axis");
       },
       [](const RunConfig& c) { return join(c.model.rotation_axis.data(), 3); }},

      {"solver", "safety", [](Draft& d, std::string_view v) { d.cfg.run.solver.safety = to_double(v); },
       [](const RunConfig& c) { return format_double(c.run.solver.safety); }},
      {"solver", "T_end", [](Draft& d, std::string_view v) { d.cfg.run.t_end = to_double(v); },
       [](const RunConfig& c) { return format_double(c.run.t_end); }},
      {"solver", "snap_interval",
       [](Draft& d, std::string_view v) { d.cfg.run.snap_interval = to_double(v); },
       [](const RunConfig& c) { return format_double(c.run.snap_interval); }},
      {"solver", "proj_tol", [](Draft& d, std::string_view v) { d.cfg.run.solver.proj_tol = to_double(v); },
       [](const RunConfig& c) { return format_double(c.run.solver.proj_tol); }},
      {"solver", "max_cg_iters",
       [](Draft& d, std::string_view v) {
         d.cfg.run.solver.max_cg_iters = static_cast<int>(to_long(v));
       },
       [](const RunConfig& c) { return std::to_string(c.run.solver.max_cg_iters); }},
      {"solver", "cg_rel_tol",
       [](Draft& d, std::string_view v) { d.cfg.run.solver.cg_rel_tol = to_double(v); },
       [](const RunConfig& c) { return format_double(c.run.solver.cg_rel_tol); }},
      {"solver", "preconditioner",
       [](Draft& d, std::string_view v) {
         v = trim(v);
         if (v == "spectral") d.cfg.run.solver.preconditioner = NeumannPoisson::Preconditioner::Spectral;
         else if (v == "none") d.cfg.run.solver.preconditioner = NeumannPoisson::Preconditioner::None;
         else throw ConfigError("solver.preconditioner must be spectral or none");
       },
       [](const RunConfig& c) {
         return std::string(c.run.solver.preconditioner == NeumannPoisson::Preconditioner::Spectral
                                ? "spectral"
                                : "none");
       }},
      {"solver", "energy_p", [](Draft& d, std::string_view v) { d.cfg.run.energy_p = to_double(v); },
       [](const RunConfig& c) { return format_double(c.run.energy_p); }},
      {"solver", "energy_q", [](Draft& d, std::string_view v) { d.cfg.run.energy_q = to_double(v); },
       [](const RunConfig& c) { return format_double(c.run.energy_q); }},

      {"initial", "n_profile",
       [](Draft& d, std::string_view v) {
         v = trim(v);
         if (v == "gaussian") d.cfg.initial.n_profile = NP::Gaussian;
         else if (v == "uniform") d.cfg.initial.n_profile = NP::Uniform;
         else if (v == "zero") d.cfg.initial.n_profile = NP::Zero;
         else throw ConfigError("initial.n_profile must be gaussian, uniform or zero");
       },
       [](const RunConfig& c) {
         switch (c.initial.n_profile) {
           case NP::Gaussian: return std::string("gaussian");
           case NP::Uniform: return std::string("uniform");
           default: return std::string("zero");
         }
       }},
      {"initial", "n_mass", [](Draft& d, std::string_view v) { d.cfg.initial.n_mass = to_double(v); },
       [](const RunConfig& c) { return format_double(c.initial.n_mass); }},
      {"initial", "n_width", [](Draft& d, std::string_view v) { d.cfg.initial.n_width = to_double(v); },
       [](const RunConfig& c) { return format_double(c.initial.n_width); }},
      {"initial", "n_center",
       [](Draft& d, std::string_view v) { d.cfg.initial.n_center = to_vec3(v, "initial.n_center"); },
       [](const RunConfig& c) { return join(c.initial.n_center.data(), c.grid.dim()); }},
      {"initial", "n_value", [](Draft& d, std::string_view v) { d.cfg.initial.n_value = to_double(v); },
       [](const RunConfig& c) { return format_double(c.initial.n_value); }},
      {"initial", "n_noise", [](Draft& d, std::string_view v) { d.cfg.initial.n_noise = to_double(v); },
       [](const RunConfig& c) { return format_double(c.initial.n_noise); }},
      {"initial", "c_profile",
       [](Draft& d, std::string_view v) {
         v = trim(v);
         if (v == "uniform") d.cfg.initial.c_profile = CP::Uniform;
         else if (v == "linear") d.cfg.initial.c_profile = CP::Linear;
         else throw ConfigError("initial.c_profile must be uniform or linear");
       },
       [](const RunConfig& c) {
         return std::string(c.initial.c_profile == CP::Uniform ? "uniform" : "linear");
       }},
      {"initial", "c_value", [](Draft& d, std::string_view v) { d.cfg.initial.c_value = to_double(v); },
       [](const RunConfig& c) { return format_double(c.initial.c_value); }},
      {"initial", "c_low", [](Draft& d, std::string_view v) { d.cfg.initial.c_low = to_double(v); },
       [](const RunConfig& c) { return format_double(c.initial.c_low); }},
      {"initial", "c_high", [](Draft& d, std::string_view v) { d.cfg.initial.c_high = to_double(v); },
       [](const RunConfig& c) { return format_double(c.initial.c_high); }},
      {"initial", "c_axis",
       [](Draft& d, std::string_view v) { d.cfg.initial.c_axis = static_cast<int>(to_long(v)); },
       [](const RunConfig& c) { return std::to_string(c.initial.c_axis); }},
      {"initial", "u_profile",
       [](Draft&, std::string_view v) {
         if (trim(v) != "rest") throw ConfigError("initial.u_profile must be rest");
       },
       [](const RunConfig&) { return std::string("rest"); }},

      {"output", "directory", [](Draft& d, std::string_view v) { d.cfg.output.directory = trim(v); },
       [](const RunConfig& c) { return c.output.directory; }},
      {"output", "snapshots",
       [](Draft& d, std::string_view v) { d.cfg.output.write_snapshots = to_bool(v); },
       [](const RunConfig& c) { return std::string(c.output.write_snapshots ? "true" : "false"); }},
      {"output", "series", [](Draft& d, std::string_view v) { d.cfg.output.write_series = to_bool(v); },
       [](const RunConfig& c) { return std::string(c.output.write_series ? "true" : "false"); }},
      {"output", "checkpoint_every",
       [](Draft& d, std::string_view v) { d.cfg.output.checkpoint_every = to_long(v); },
       [](const RunConfig& c) { return std::to_string(c.output.checkpoint_every); }},
  };
  return table;
}

const Key* find_key(std::string_view section, std::string_view name) {
  for (const Key& k : keys())
    if (section == k.section && name == k.name) return &k;
  return nullptr;
}

GridDraft draft_of(const GridSpec& g) {
  GridDraft d;
  d.dim = g.dim();
  d.cells.assign(g.cell_shape().begin(), g.cell_shape().begin() + g.dim());
  d.lengths.assign(g.lengths().begin(), g.lengths().begin() + g.dim());
  return d;
}

GridSpec build_grid(const GridDraft& d) {
  if (d.dim != 2 && d.dim != 3) throw ConfigError("grid.dim must be 2 or 3");
  if (static_cast<int>(d.cells.size()) != d.dim)
    throw ConfigError("grid.cells needs exactly dim entries");
  if (static_cast<int>(d.lengths.size()) != d.dim)
    throw ConfigError("grid.lengths needs exactly dim entries");
  std::array<int, 3> cells{1, 1, 1};
  std::array<double, 3> lengths{1.0, 1.0, 1.0};
  for (int a = 0; a < d.dim; ++a) {
    cells[a] = d.cells[a];
    lengths[a] = d.lengths[a];
  }
  try {
    return GridSpec(d.dim, cells, lengths);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

// Leading "section.key" of a validation message, used to attach a line number.
std::string subject_of(const std::string& msg) {
  const auto end = msg.find_first_of(" :");
  return msg.substr(0, end);
}

RunConfig finalize(Draft& d, const std::map<std::string, int>& lines) {
  try {
    RunConfig out = d.cfg;
    out.grid = build_grid(d.grid);
    out.validate();
    return out;
  } catch (const ConfigError& e) {
    if (e.line() > 0) throw;
    const std::string subject = subject_of(e.what());
    auto it = lines.find(subject);
    if (it == lines.end() && subject.rfind("grid", 0) == 0) it = lines.find("grid.cells");
    throw ConfigError(e.what(), it == lines.end() ? 0 : it->second);
  }
}

}  // namespace

void RunConfig::validate() const {
  const int dim = grid.dim();
  model.validate(dim);
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(run.solver.safety)) throw ConfigError("solver.safety must be > 0");
  if (!positive(run.t_end)) throw ConfigError("solver.T_end must be > 0");
  if (!positive(run.snap_interval)) throw ConfigError("solver.snap_interval must be > 0");
  if (!positive(run.solver.proj_tol)) throw ConfigError("solver.proj_tol must be > 0");
  if (run.solver.max_cg_iters < 1) throw ConfigError("solver.max_cg_iters must be >= 1");
  if (!positive(run.solver.cg_rel_tol) || run.solver.cg_rel_tol >= 1.0)
    throw ConfigError("solver.cg_rel_tol must lie in (0, 1)");
  if (!(run.energy_p > 1.0)) throw ConfigError("solver.energy_p must be > 1");
  if (!(run.energy_q > 1.0)) throw ConfigError("solver.energy_q must be > 1");
  if (!(initial.n_mass >= 0.0)) throw ConfigError("initial.n_mass must be >= 0");
  if (!positive(initial.n_width)) throw ConfigError("initial.n_width must be > 0");
  if (!(initial.n_value >= 0.0)) throw ConfigError("initial.n_value must be >= 0");
  if (!(initial.n_noise >= 0.0 && initial.n_noise < 1.0))
    throw ConfigError("initial.n_noise must lie in [0, 1)");
  for (int a = 0; a < dim; ++a) {
    const double x = initial.n_center[a];
    if (x >= 0.0 && x > grid.length(a)) throw ConfigError("initial.n_center lies outside the box");
  }
  if (!(initial.c_value >= 0.0)) throw ConfigError("initial.c_value must be >= 0");
  if (!(initial.c_low >= 0.0) || !(initial.c_high >= 0.0))
    throw ConfigError("initial.c_low and c_high must be >= 0");
  if (initial.c_axis < 0 || initial.c_axis >= dim)
    throw ConfigError("initial.c_axis must be an axis index below dim");
  if (output.directory.empty()) throw ConfigError("output.directory must not be empty");
  if (output.checkpoint_every < 0) throw ConfigError("output.checkpoint_every must be >= 0");
}

RunConfig parse_config(std::string_view text) {
  Draft d;
  std::map<std::string, int> lines;
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto hash = line.find_first_of("#;");
    line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"grid", "model", "solver", "initial", "output"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok) throw ConfigError("unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no);
    const std::string name(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const Key* key = find_key(section, name);
    const std::string full = section.empty() ? name : section + "." + name;
    if (!key) throw ConfigError("unknown key '" + full + "'", line_no);
    if (!lines.emplace(full, line_no).second)
      throw ConfigError("duplicate key '" + full + "'", line_no);
    try {
      key->set(d, value);
    } catch (const ConfigError& e) {
      throw ConfigError(full + ": " + e.what(), line_no);
    }
  }
  return finalize(d, lines);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(RunConfig& cfg, std::string_view key, std::string_view value) {
  std::string_view section;
  std::string_view name = key;
  if (const auto dot = key.find('.'); dot != std::string_view::npos) {
    section = key.substr(0, dot);
    name = key.substr(dot + 1);
  }
  const Key* found = nullptr;
  if (key.find('.') != std::string_view::npos) {
    found = find_key(section, name);
  } else {
    for (const Key& k : keys()) {
      if (name != k.name) continue;
      if (found) throw ConfigError("ambiguous key '" + std::string(key) + "'");
      found = &k;
    }
  }
  if (!found) throw ConfigError("unknown key '" + std::string(key) + "'");
  Draft d{draft_of(cfg.grid), cfg};
  try {
    found->set(d, value);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
  cfg = finalize(d, {});
}

std::string canonical_echo(const RunConfig& cfg) {
  std::string out;
  std::string section = "";
  for (const Key& k : keys()) {
    if (section != k.section) {
      section = k.section;
      out += "\n[" + section + "]\n";
    }
    out += k.name;
    out += " = ";
    out += k.get(cfg);
    out += '\n';
  }
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical_echo(cfg)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace chemostokes
