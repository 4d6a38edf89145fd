#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chemostokes/config.hpp"
#include "chemostokes/invariants.hpp"
#include "chemostokes/solver.hpp"

namespace chemostokes {

/// States at uniformly spaced times: frames[k] is the state at t = k * interval.
struct Trajectory {
  double interval = 0.0;
  std::vector<SolverState> frames;
};

struct RunOptions {
  /// Artifacts go here when set: series.csv, snapshots/, summary.json,
  /// failure.json, checkpoint.bin.
  std::optional<std::filesystem::path> out_dir;
  bool keep_trajectory = false;
  FluxHook flux_hook;
  /// Continue from a checkpoint written by an earlier run of the same config.
  std::optional<std::filesystem::path> restart_from;
  /// Stop (successfully, without summary verdict semantics) after this many
  /// accepted steps; negative means run to T_end. Used to exercise restarts.
  long stop_after_steps = -1;
};

struct RunFailure {
  std::string stage;
  std::string diagnosis;
  double worst_value = 0.0;
  std::size_t location = 0;
  long step = 0;
  double t = 0.0;
};

struct RunResult {
  std::vector<InvariantReport> series;
  Trajectory trajectory;
  SolverState final_state;
  bool completed = false;
  std::optional<RunFailure> failure;
  double n0_max = 0.0;
  double c0_max = 0.0;
  double sup_n = 0.0;
  std::vector<Verdict> verdicts;
};

/// Integrates from the configured initial data (or a checkpoint) to T_end.
/// Snapshot times k * snap_interval and T_end are hit exactly. A rejected step
/// ends the run with `failure` set; it is not thrown.
RunResult run(const RunConfig& cfg, const RunOptions& opts = {});

/// The verdicts reported in summary.json: mass, maximum principle,
/// positivity, divergence and the ODI boundedness monitor.
std::vector<Verdict> standard_verdicts(const RunResult& r, const RunConfig& cfg);

void write_checkpoint(const std::filesystem::path& path, const RunConfig& cfg,
                      const SolverState& s, long next_snapshot,
                      const std::vector<InvariantReport>& series);

struct Checkpoint {
  SolverState state;
  long next_snapshot = 0;
  std::vector<InvariantReport> series;
};
/// Throws ConfigError when the checkpoint was written for a different config.
Checkpoint read_checkpoint(const std::filesystem::path& path, const RunConfig& cfg);

/// CSV with header step,t,dt,mass,n_min,n_max,c_min,c_max,div_u_inf,energy,dissipation.
void write_series_csv(const std::filesystem::path& path, const std::vector<InvariantReport>& series);

}  // namespace chemostokes
