#pragma once

#include <span>
#include <string>
#include <vector>

#include "chemostokes/solver.hpp"

namespace chemostokes {

/// One row of the invariant series.
struct InvariantReport {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double n_min = 0.0;
  double n_max = 0.0;
  double c_min = 0.0;
  double c_max = 0.0;
  double div_u_inf = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;
};

/// Outcome of one check: {check, pass, worst_value, location}.
struct Verdict {
  std::string check;
  bool pass = false;
  double worst_value = 0.0;
  std::string location;
};

struct EnergyDissipation {
  double y = 0.0;
  double D = 0.0;
};

/// y = int (n+eps)^p + int |grad c|^(2q) + int |grad u|^2
/// D = int |grad (n+eps)^((m+p-1)/2)|^2 + int |grad c|^(2q-2) |D^2 c|^2 + int |lap_h u|^2
///
/// grad c and D^2 c live at cell centres (face gradients averaged, diagonal
/// second derivatives from face-gradient differences, mixed ones from centred
/// differences with mirrored neighbours). int |grad u|^2 uses the wall ghost
/// -u, so it equals -face_inner(u, vector_laplacian(u)).
EnergyDissipation energy_functional(const SolverState& s, double p_exp, double q_exp, double m,
                                    double eps = 0.0);

InvariantReport make_report(const SolverState& s, double dt, const ModelParams& p, double p_exp,
                            double q_exp);

/// Fails iff the relative mass drift exceeds 1e-12 per 1000 steps
/// (rel_tol * max(1, steps / 1000)).
Verdict check_mass(std::span<const InvariantReport> series, double rel_tol = 1e-12);

/// Fails iff some c_max > c0_max (1 + 1e-12) or c_min < -1e-12.
Verdict check_max_principle(std::span<const InvariantReport> series, double c0_max);

/// Fails iff some n_min < 0.
Verdict check_positivity(std::span<const InvariantReport> series);

/// Fails iff some div_u_inf > tol.
Verdict check_divergence(std::span<const InvariantReport> series, double tol = 1e-8);

struct OdiReport {
  std::string verdict;   // "bounded" or "unbounded"
  double C = 0.0;        // smallest C with dy/dt + D/C <= C on every row
  double C_damp = 0.0;
  double C_src = 0.0;
  double y_sup = 0.0;
  double y_mid = 0.0;
  double y_final_half_max = 0.0;
};

/// Needs at least 10 rows; throws std::invalid_argument otherwise. dy/dt is
/// a centred difference (one-sided at the ends). "bounded" means every y is
/// finite and y never exceeds 2 y(t_mid) on the final half of the run.
OdiReport odi_monitor(std::span<const InvariantReport> series);

}  // namespace chemostokes
