#include "chemostokes/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "chemostokes/errors.hpp"
#include "chemostokes/field_io.hpp"
#include "chemostokes/initial_data.hpp"
#include "json.hpp"

namespace chemostokes {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kSeriesColumns = 11;

std::string snap_name(const char* field, long k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05ld.fld", field, k);
  return buf;
}

void write_snapshot(const fs::path& dir, const SolverState& s, long k) {
  const fs::path snaps = dir / "snapshots";
  fs::create_directories(snaps);
  write_scalar_fld(snaps / snap_name("n", k), "n", "cells/volume", s.n, s.t);
  write_scalar_fld(snaps / snap_name("c", k), "c", "concentration", s.c, s.t);
  for (int a = 0; a < s.grid().dim(); ++a) {
    const std::string name = "u" + std::to_string(a);
    write_face_fld(snaps / snap_name(name.c_str(), k), name, "length/time", s.u, a, s.t);
  }
  write_scalar_fld(snaps / snap_name("P", k), "P", "pressure", s.P, s.t);
}

ordered_json verdict_json(const Verdict& v) {
  ordered_json j;
  j["check"] = v.check;
  j["pass"] = v.pass;
  j["worst_value"] = std::isfinite(v.worst_value) ? ordered_json(v.worst_value) : ordered_json();
  j["location"] = v.location;
  return j;
}

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

std::vector<double> series_to_doubles(const std::vector<InvariantReport>& series) {
  std::vector<double> out;
  out.reserve(series.size() * kSeriesColumns);
  for (const auto& r : series) {
    out.insert(out.end(), {static_cast<double>(r.step), r.t, r.dt, r.mass, r.n_min, r.n_max,
                           r.c_min, r.c_max, r.div_u_inf, r.energy, r.dissipation});
  }
  return out;
}

std::vector<InvariantReport> series_from_doubles(std::span<const double> v) {
  std::vector<InvariantReport> out;
  for (std::size_t i = 0; i + kSeriesColumns <= v.size(); i += kSeriesColumns) {
    InvariantReport r;
    r.step = static_cast<long>(v[i]);
    r.t = v[i + 1];
    r.dt = v[i + 2];
    r.mass = v[i + 3];
    r.n_min = v[i + 4];
    r.n_max = v[i + 5];
    r.c_min = v[i + 6];
    r.c_max = v[i + 7];
    r.div_u_inf = v[i + 8];
    r.energy = v[i + 9];
    r.dissipation = v[i + 10];
    out.push_back(r);
  }
  return out;
}

}  // namespace

void write_series_csv(const fs::path& path, const std::vector<InvariantReport>& series) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "step,t,dt,mass,n_min,n_max,c_min,c_max,div_u_inf,energy,dissipation\n";
  for (const auto& r : series) {
    os << r.step;
    for (double v : {r.t, r.dt, r.mass, r.n_min, r.n_max, r.c_min, r.c_max, r.div_u_inf, r.energy,
                     r.dissipation})
      os << ',' << format_double(v);
    os << '\n';
  }
}

void write_checkpoint(const fs::path& path, const RunConfig& cfg, const SolverState& s,
                      long next_snapshot, const std::vector<InvariantReport>& series) {
  const GridSpec& g = s.grid();
  ordered_json h;
  h["format"] = "chemostokes-checkpoint";
  h["version"] = 1;
  h["config_hash"] = config_hash(cfg);
  h["t"] = s.t;
  h["step"] = s.step;
  h["next_snapshot"] = next_snapshot;
  h["dim"] = g.dim();
  h["cells"] = std::vector<int>(g.cell_shape().begin(), g.cell_shape().begin() + g.dim());
  h["series_rows"] = series.size();
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << h.dump() << '\n';
    const double t = s.t;
    write_le_doubles(os, std::span<const double>(&t, 1));
    write_le_doubles(os, s.n.values());
    write_le_doubles(os, s.c.values());
    for (int a = 0; a < g.dim(); ++a) write_le_doubles(os, s.u.component(a));
    write_le_doubles(os, s.P.values());
    write_le_doubles(os, series_to_doubles(series));
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

Checkpoint read_checkpoint(const fs::path& path, const RunConfig& cfg) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open checkpoint '" + path.string() + "'");
  std::string line;
  std::getline(is, line);
  const auto h = nlohmann::json::parse(line, nullptr, false);
  if (h.is_discarded() || h.value("format", "") != "chemostokes-checkpoint")
    throw ConfigError("'" + path.string() + "' is not a checkpoint");
  if (h.at("config_hash").get<std::string>() != config_hash(cfg))
    throw ConfigError("checkpoint was written for a different config (hash " +
                      h.at("config_hash").get<std::string>() + ", expected " + config_hash(cfg) +
                      ")");
  Checkpoint ck{SolverState(cfg.grid), h.at("next_snapshot").get<long>(), {}};
  SolverState& s = ck.state;
  double t = 0.0;
  read_le_doubles(is, std::span<double>(&t, 1));
  s.t = t;
  s.step = h.at("step").get<long>();
  read_le_doubles(is, s.n.values());
  read_le_doubles(is, s.c.values());
  for (int a = 0; a < cfg.grid.dim(); ++a) read_le_doubles(is, s.u.component(a));
  read_le_doubles(is, s.P.values());
  std::vector<double> rows(h.at("series_rows").get<std::size_t>() * kSeriesColumns);
  read_le_doubles(is, rows);
  ck.series = series_from_doubles(rows);
  return ck;
}

std::vector<Verdict> standard_verdicts(const RunResult& r, const RunConfig& cfg) {
  std::vector<Verdict> v;
  v.push_back(check_mass(r.series));
  v.push_back(check_max_principle(r.series, r.c0_max));
  v.push_back(check_positivity(r.series));
  v.push_back(check_divergence(r.series, cfg.run.solver.proj_tol));
  if (r.series.size() >= 10) {
    const OdiReport odi = odi_monitor(r.series);
    v.push_back(Verdict{"odi_monitor", odi.verdict == "bounded", odi.y_final_half_max,
                        "y_mid=" + format_double(odi.y_mid) + " C=" + format_double(odi.C)});
  }
  return v;
}

RunResult run(const RunConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  Solver solver(cfg.grid, cfg.model, cfg.run.solver);
  if (opts.flux_hook) solver.set_flux_hook(opts.flux_hook);

  const SolverState initial = make_initial_state(cfg);
  RunResult result{{}, {cfg.run.snap_interval, {}}, initial, false, std::nullopt, 0.0, 0.0, 0.0, {}};
  result.n0_max = reduce_extrema(initial.n).second;
  result.c0_max = reduce_extrema(initial.c).second;

  SolverState s = initial;
  long next_snap = 0;
  if (opts.restart_from) {
    Checkpoint ck = read_checkpoint(*opts.restart_from, cfg);
    s = std::move(ck.state);
    next_snap = ck.next_snapshot;
    result.series = std::move(ck.series);
  }

  const auto& out = opts.out_dir;
  if (out) fs::create_directories(*out);
  const bool snapshots = out && cfg.output.write_snapshots;
  const double interval = cfg.run.snap_interval;
  const double t_end = cfg.run.t_end;
  auto snap_time = [&](long k) { return std::min(static_cast<double>(k) * interval, t_end); };
  auto record_frame = [&](const SolverState& st) {
    if (snapshots) write_snapshot(*out, st, next_snap);
    if (opts.keep_trajectory) result.trajectory.frames.push_back(st);
    ++next_snap;
  };

  if (!opts.restart_from) {
    result.series.push_back(
        make_report(s, 0.0, cfg.model, cfg.run.energy_p, cfg.run.energy_q));
    record_frame(s);
  }

  long steps_taken = 0;
  try {
    while (s.t < t_end) {
      if (opts.stop_after_steps >= 0 && steps_taken >= opts.stop_after_steps) break;
      const double target = snap_time(next_snap);
      Solver::StepInfo info;
      s = solver.advance(s, target, &info);
      ++steps_taken;
      result.series.push_back(
          make_report(s, info.dt, cfg.model, cfg.run.energy_p, cfg.run.energy_q));
      if (s.t == target && static_cast<double>(next_snap) * interval <= t_end * (1.0 + 1e-12)) record_frame(s);
      if (out && cfg.output.checkpoint_every > 0 && s.step % cfg.output.checkpoint_every == 0)
        write_checkpoint(*out / "checkpoint.bin", cfg, s, next_snap, result.series);
    }
    result.completed = s.t >= t_end;
  } catch (const StepRejected& e) {
    result.failure = RunFailure{e.stage(), e.what(), e.worst_value(), e.location(), s.step + 1, s.t};
  }
  result.final_state = s;
  for (const auto& r : result.series) result.sup_n = std::max(result.sup_n, r.n_max);
  result.verdicts = standard_verdicts(result, cfg);

  if (out) {
    if (cfg.output.write_series) write_series_csv(*out / "series.csv", result.series);
    ordered_json summary;
    summary["final_t"] = s.t;
    summary["steps"] = s.step;
    summary["sup_n"] = result.sup_n;
    summary["completed"] = result.completed;
    summary["config_hash"] = config_hash(cfg);
    summary["verdicts"] = ordered_json::array();
    for (const auto& v : result.verdicts) summary["verdicts"].push_back(verdict_json(v));
    write_json(*out / "summary.json", summary);
    if (result.failure) {
      const RunFailure& f = *result.failure;
      const auto ijk = cfg.grid.cell_coords(f.location);
      ordered_json j;
      j["status"] = "rejected";
      j["stage"] = f.stage;
      j["diagnosis"] = f.diagnosis;
      j["step"] = f.step;
      j["t"] = f.t;
      j["worst_value"] = std::isfinite(f.worst_value) ? ordered_json(f.worst_value) : ordered_json();
      j["location"] = {{"flat_index", f.location},
                       {"cell", std::vector<int>(ijk.begin(), ijk.begin() + cfg.grid.dim())}};
      write_json(*out / "failure.json", j);
    }
  }
  return result;
}

}  // namespace chemostokes
