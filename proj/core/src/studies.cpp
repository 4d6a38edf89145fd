#include "chemostokes/studies.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "chemostokes/run.hpp"

namespace chemostokes {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void finish_orders(ConvergenceStudy& s) {
  const std::size_t n = s.errors.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    s.orders.push_back(std::log2(s.errors[k] / s.errors[k + 1]) /
                       std::log2(static_cast<double>(s.resolutions[k + 1]) / s.resolutions[k]));
  // Slope of log e against log N (h ~ 1/N).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::log(static_cast<double>(s.resolutions[k]));
    const double y = std::log(s.errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  s.fitted_order = n > 1 ? -(dn * sxy - sx * sy) / (dn * sxx - sx * sx) : 0.0;
}

// Strip [0, length] x [0, 4h] with N x 4 cells.
RunConfig strip_config(int N, double length) {
  RunConfig cfg;
  const double h = length / N;
  cfg.grid = GridSpec(2, {N, 4, 1}, {length, 4 * h, 1.0});
  cfg.model.m = 2.0;
  cfg.model.eps = 0.0;
  cfg.model.s0 = 0.0;
  cfg.model.grav = {0.0, 0.0, 0.0};
  cfg.initial.n_profile = InitialSettings::NProfile::Zero;
  cfg.initial.c_value = 0.0;
  return cfg;
}

// Cell averages along x of g, by a 64-point midpoint rule inside each cell.
std::vector<double> cell_averages(int N, double length, const std::function<double(double)>& g) {
  constexpr int kSub = 64;
  const double h = length / N;
  std::vector<double> out(N);
  for (int i = 0; i < N; ++i) {
    double acc = 0.0;
    for (int s = 0; s < kSub; ++s) acc += g((i + (s + 0.5) / kSub) * h);
    out[i] = acc / kSub;
  }
  return out;
}

double strip_l1(const ScalarField& f, const std::vector<double>& exact) {
  const GridSpec& g = f.grid();
  double err = 0.0;
  for (int i = 0; i < g.cells(0); ++i)
    for (int j = 0; j < g.cells(1); ++j) err += std::abs(f.at(i, j) - exact[i]) * g.cell_volume();
  return err / g.length(1);
}

void fill_strip(ScalarField& f, const std::vector<double>& values) {
  const GridSpec& g = f.grid();
  for (int i = 0; i < g.cells(0); ++i)
    for (int j = 0; j < g.cells(1); ++j) f.at(i, j) = values[i];
}

SolverState integrate_to(Solver& solver, SolverState s, double t_end) {
  while (s.t < t_end) s = solver.advance(s, t_end);
  return s;
}

}  // namespace

RunConfig smoke_config() {
  RunConfig cfg;
  cfg.grid = GridSpec(2, {48, 48, 1}, {4.0, 4.0, 1.0});
  cfg.model = ModelParams{};
  cfg.model.grav = {0.0, 1.0, 0.0};
  cfg.run.t_end = 5.0;
  cfg.run.snap_interval = 0.5;
  cfg.initial = InitialSettings{};
  cfg.output.directory = "out/smoke";
  return cfg;
}

ConvergenceStudy barenblatt_study(const std::vector<int>& resolutions) {
  const auto t0 = Clock::now();
  ConvergenceStudy study;
  study.name = "barenblatt";
  constexpr double kLength = 8.0;
  auto exact = [](double t) {
    return [t](double x) {
      const double y = x - 0.5 * kLength;
      const double v = 0.5 - y * y / (12.0 * std::cbrt(t * t));
      return v > 0.0 ? v / std::cbrt(t) : 0.0;
    };
  };
  for (int N : resolutions) {
    RunConfig cfg = strip_config(N, kLength);
    Solver solver(cfg.grid, cfg.model, cfg.run.solver);
    SolverState s(cfg.grid);
    fill_strip(s.n, cell_averages(N, kLength, exact(1.0)));
    s.t = 1.0;
    s = integrate_to(solver, std::move(s), 2.0);
    study.resolutions.push_back(N);
    study.errors.push_back(strip_l1(s.n, cell_averages(N, kLength, exact(2.0))));
  }
  finish_orders(study);
  study.seconds = seconds_since(t0);
  return study;
}

ConvergenceStudy heat_study(const std::vector<int>& resolutions) {
  const auto t0 = Clock::now();
  ConvergenceStudy study;
  study.name = "heat";
  constexpr double kLength = 8.0;
  const double pi = std::numbers::pi;
  // Exact cell average of 1 + a cos(pi x / L) over [x0, x1].
  auto averages = [&](int N, double t) {
    const double h = kLength / N;
    const double a = 0.5 * std::exp(-pi * pi * t / (kLength * kLength));
    std::vector<double> out(N);
    for (int i = 0; i < N; ++i) {
      const double s1 = std::sin(pi * (i + 1) * h / kLength);
      const double s0 = std::sin(pi * i * h / kLength);
      out[i] = 1.0 + a * kLength / (pi * h) * (s1 - s0);
    }
    return out;
  };
  for (int N : resolutions) {
    RunConfig cfg = strip_config(N, kLength);
    Solver solver(cfg.grid, cfg.model, cfg.run.solver);
    SolverState s(cfg.grid);
    fill_strip(s.c, averages(N, 0.0));
    s = integrate_to(solver, std::move(s), 1.0);
    study.resolutions.push_back(N);
    study.errors.push_back(strip_l1(s.c, averages(N, 1.0)));
  }
  finish_orders(study);
  study.seconds = seconds_since(t0);
  return study;
}

WeakRefinementStudy weak_residual_study(const RunConfig& base, int coarse, int fine,
                                        double horizon, double coarse_interval) {
  const auto t0 = Clock::now();
  WeakRefinementStudy study;
  study.resolutions = {coarse, fine};
  WeakResidualReport* reports[] = {&study.coarse, &study.fine};
  for (int idx = 0; idx < 2; ++idx) {
    const int N = study.resolutions[idx];
    RunConfig cfg = base;
    std::array<int, 3> cells{N, N, base.grid.dim() == 3 ? N : 1};
    cfg.grid = GridSpec(base.grid.dim(), cells, base.grid.lengths());
    cfg.run.t_end = horizon;
    cfg.run.snap_interval = coarse_interval * coarse / N;
    study.intervals.push_back(cfg.run.snap_interval);
    RunOptions opts;
    opts.keep_trajectory = true;
    const RunResult r = run(cfg, opts);
    if (!r.completed)
      throw std::runtime_error("weak-residual study run at " + std::to_string(N) +
                               " cells failed: " + (r.failure ? r.failure->diagnosis : "incomplete"));
    *reports[idx] = weak_residual(r.trajectory, cfg.model, default_battery(cfg.grid, horizon));
  }
  study.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < study.coarse.rows.size(); ++k) {
    const auto& c = study.coarse.rows[k];
    const auto& f = study.fine.rows[k];
    for (auto [a, b] : {std::pair{c.cell, f.cell}, std::pair{c.oxygen, f.oxygen},
                        std::pair{c.velocity, f.velocity}}) {
      const double ratio = std::abs(a) / std::abs(b);
      study.ratios.push_back(ratio);
      study.min_ratio = std::min(study.min_ratio, ratio);
    }
  }
  study.seconds = seconds_since(t0);
  return study;
}

std::string convergence_csv(const ConvergenceStudy& s) {
  std::string out = "study,resolution,l1_error,order\n";
  for (std::size_t k = 0; k < s.resolutions.size(); ++k) {
    out += s.name + "," + std::to_string(s.resolutions[k]) + "," + format_double(s.errors[k]) + ",";
    if (k > 0) out += format_double(s.orders[k - 1]);
    out += "\n";
  }
  return out;
}

std::string weak_study_csv(const WeakRefinementStudy& s) {
  std::string out = "name,identity,coarse,fine,ratio\n";
  const char* ids[] = {"density", "concentration", "velocity"};
  for (std::size_t k = 0; k < s.coarse.rows.size(); ++k) {
    const auto& c = s.coarse.rows[k];
    const auto& f = s.fine.rows[k];
    const double cv[] = {c.cell, c.oxygen, c.velocity};
    const double fv[] = {f.cell, f.oxygen, f.velocity};
    for (int i = 0; i < 3; ++i)
      out += c.name + "," + ids[i] + "," + format_double(cv[i]) + "," + format_double(fv[i]) + "," +
             format_double(s.ratios[k * 3 + i]) + "\n";
  }
  return out;
}

}  // namespace chemostokes
