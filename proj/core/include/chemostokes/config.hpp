#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "chemostokes/grid.hpp"
#include "chemostokes/model.hpp"
#include "chemostokes/solver.hpp"

namespace chemostokes {

/// Initial-data profiles.
///   n: gaussian (n_mass, n_width, n_center) | uniform (n_value) | zero, plus
///      optional multiplicative noise n_noise in [0, 1) drawn from the seed
///   c: uniform (c_value) | linear from c_low to c_high along c_axis
///   u: rest
struct InitialSettings {
  enum class NProfile { Gaussian, Uniform, Zero };
  enum class CProfile { Uniform, Linear };

  NProfile n_profile = NProfile::Gaussian;
  double n_mass = 1.0;
  double n_width = 0.4;
  std::array<double, 3> n_center{-1.0, -1.0, -1.0};  // negative: box centre
  double n_value = 1.0;
  double n_noise = 0.0;

  CProfile c_profile = CProfile::Uniform;
  double c_value = 1.0;
  double c_low = 0.0;
  double c_high = 1.0;
  int c_axis = 0;
};

struct RunSettings {
  SolverSettings solver;
  double t_end = 5.0;
  double snap_interval = 0.5;
  double energy_p = 2.0;
  double energy_q = 1.5;
};

struct OutputSettings {
  std::string directory = "out";
  bool write_snapshots = true;
  bool write_series = true;
  long checkpoint_every = 0;  // steps between checkpoints, 0 = never
};

struct RunConfig {
  GridSpec grid{2, {48, 48, 1}, {4.0, 4.0, 1.0}};
  ModelParams model;
  RunSettings run;
  InitialSettings initial;
  OutputSettings output;
  std::uint64_t seed = 0;

  /// Checks every cross-key constraint; throws ConfigError.
  void validate() const;
};

/// Parses the sectioned key = value format (see configs/README in the repo).
/// Unknown keys, duplicate keys, malformed values and invalid parameters are
/// reported with the line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Sets one key, addressed as "section.key" or as a bare key when unambiguous.
/// The result is re-validated.
void apply_override(RunConfig& cfg, std::string_view key, std::string_view value);

/// Every key in a fixed order with round-trip number formatting.
std::string canonical_echo(const RunConfig& cfg);

/// FNV-1a 64 of the canonical echo, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Shortest decimal that reads back as the same double.
std::string format_double(double v);

}  // namespace chemostokes
