#pragma once

#include <string>
#include <vector>

#include "chemostokes/config.hpp"
#include "chemostokes/weak_residual.hpp"

namespace chemostokes {

/// 48^2 box of side 4, m = 2, l = 2.5, eps = 0.01, Gaussian n0 of mass 1,
/// c0 = 1, u0 = 0, buoyancy along -y, T = 5. Same as configs/smoke.ini.
RunConfig smoke_config();

struct ConvergenceStudy {
  std::string name;
  std::vector<int> resolutions;
  std::vector<double> errors;      // L1 error at the final time
  std::vector<double> orders;      // log2(e_k / e_{k+1})
  double fitted_order = 0.0;       // least-squares slope of log e against log h
  double seconds = 0.0;
};

/// Porous medium (m = 2, no chemotaxis, no flow) on a strip of length 8 that
/// is 4 cells tall, started from the Barenblatt profile
/// t^(-1/3) (1/2 - x^2 / (12 t^(2/3)))_+ at t = 1 and compared at t = 2 with
/// cell averages of the exact solution.
ConvergenceStudy barenblatt_study(const std::vector<int>& resolutions = {64, 128, 256});

/// Oxygen only (n = 0): c = 1 + cos(pi x / 8) exp(-pi^2 t / 64) / 2 from t = 0 to 1.
ConvergenceStudy heat_study(const std::vector<int>& resolutions = {64, 128, 256});

struct WeakRefinementStudy {
  std::vector<int> resolutions;        // {coarse, fine}
  std::vector<double> intervals;       // snapshot interval per run
  WeakResidualReport coarse;
  WeakResidualReport fine;
  std::vector<double> ratios;          // |coarse| / |fine| per (test function, identity)
  double min_ratio = 0.0;
  double seconds = 0.0;
};

/// Runs `base` at cells^dim for each resolution up to `horizon`, with the
/// snapshot interval halved together with h, and evaluates the default test
/// battery on both trajectories.
WeakRefinementStudy weak_residual_study(const RunConfig& base, int coarse = 32, int fine = 64,
                                        double horizon = 2.0, double coarse_interval = 0.02);

/// study,resolution,l1_error,order (order empty on the first row).
std::string convergence_csv(const ConvergenceStudy& s);
/// name,identity,coarse,fine,ratio
std::string weak_study_csv(const WeakRefinementStudy& s);

}  // namespace chemostokes
