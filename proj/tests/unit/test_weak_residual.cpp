#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "chemostokes/run.hpp"
#include "chemostokes/studies.hpp"
#include "chemostokes/weak_residual.hpp"

using namespace chemostokes;

namespace {

constexpr double kPi = M_PI;

GridSpec unit(int n) { return GridSpec(2, {n, n, 1}, {1.0, 1.0, 1.0}); }

using Fill = std::function<void(SolverState&, double t)>;

// Frames at t = k * ds on [0, 1] filled from closed-form fields.
Trajectory manufactured(const GridSpec& g, double ds, const Fill& fill) {
  Trajectory tr;
  tr.interval = ds;
  const int frames = static_cast<int>(std::lround(1.0 / ds));
  for (int k = 0; k <= frames; ++k) {
    SolverState s(g);
    s.t = k * ds;
    fill(s, s.t);
    tr.frames.push_back(std::move(s));
  }
  return tr;
}

void fill_cells(ScalarField& f, const std::function<double(double, double)>& fn) {
  const GridSpec& g = f.grid();
  for (int i = 0; i < g.cells(0); ++i)
    for (int j = 0; j < g.cells(1); ++j) {
      const auto x = g.cell_center(i, j, 0);
      f.at(i, j) = fn(x[0], x[1]);
    }
}

// Face velocity as the discrete curl of a node streamfunction.
void fill_curl(FaceVectorField& u, const std::function<double(double, double)>& psi) {
  const GridSpec& g = u.grid();
  const double h0 = g.spacing(0), h1 = g.spacing(1);
  for (int i = 0; i <= g.cells(0); ++i)
    for (int j = 0; j < g.cells(1); ++j)
      u.at(0, i, j) = (psi(i * h0, (j + 1) * h1) - psi(i * h0, j * h1)) / h1;
  for (int i = 0; i < g.cells(0); ++i)
    for (int j = 0; j <= g.cells(1); ++j)
      u.at(1, i, j) = -(psi((i + 1) * h0, j * h1) - psi(i * h0, j * h1)) / h0;
}

double max_abs_identity(const WeakResidualReport& r, int which) {
  double m = 0.0;
  for (const auto& row : r.rows) {
    const double v = which == 0 ? row.cell : which == 1 ? row.oxygen : row.velocity;
    m = std::max(m, std::abs(v));
  }
  return m;
}

// Residual of one identity at N = 16, 32, 64 with ds = h.
std::vector<double> refine(const ModelParams& p, int which, const Fill& fill) {
  std::vector<double> out;
  for (int n : {16, 32, 64}) {
    const GridSpec g = unit(n);
    const Trajectory tr = manufactured(g, 1.0 / n, fill);
    out.push_back(max_abs_identity(weak_residual(tr, p, default_battery(g, 1.0)), which));
  }
  return out;
}

void expect_order(const std::vector<double>& e, double min_order) {
  ASSERT_GT(e[0], 0.0);
  for (std::size_t k = 0; k + 1 < e.size(); ++k)
    EXPECT_GE(std::log2(e[k] / e[k + 1]), min_order) << e[k] << " -> " << e[k + 1];
}

}  // namespace

TEST(WeakResidual, ZeroTrajectory) {
  const GridSpec g = unit(16);
  const Trajectory tr = manufactured(g, 0.05, [](SolverState&, double) {});
  ModelParams p;
  p.grav = {0, 1, 0};
  const auto r = weak_residual(tr, p, default_battery(g, 1.0));
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.cell, 0.0);
    EXPECT_EQ(row.oxygen, 0.0);
    EXPECT_EQ(row.velocity, 0.0);
  }
}

TEST(WeakResidual, RotationalChemotaxisOnUniformDensity) {
  // n = 1 with S = R: div(R grad c) = 0, so the density identity holds exactly
  // in the continuum for any c.
  ModelParams p;
  p.alpha_s = 0.0;
  p.beta_s = 1.0;
  p.l = 3.0;
  p.eps = 0.01;
  p.grav = {0, 0, 0};
  const auto e = refine(p, 0, [](SolverState& s, double t) {
    for (double& v : s.n.values()) v = 1.0;
    fill_cells(s.c, [t](double x, double y) {
      return 0.5 + 0.3 * std::sin(kPi * x) * std::cos(2 * kPi * y) * (1 + t);
    });
  });
  expect_order(e, 0.8);
}

TEST(WeakResidual, HeatSolutionForOxygen) {
  ModelParams p;
  const auto e = refine(p, 1, [](SolverState& s, double t) {
    fill_cells(s.c, [t](double x, double) { return 1.0 + 0.5 * std::cos(kPi * x) * std::exp(-kPi * kPi * t); });
  });
  expect_order(e, 0.8);
}

TEST(WeakResidual, ForcedStokesFlow) {
  // u = a(t) curl Psi with Psi = sin^2(pi x) sin^2(pi y) and a = exp(-t).
  // With grad(phi) = (gamma, 0) the vorticity balance fixes n:
  // n_y = (a' Lap Psi - a Lap^2 Psi) / gamma.
  const double gamma = 2.0, k = 2 * kPi;
  ModelParams p;
  p.grav = {-gamma, 0.0, 0.0};
  auto A = [k](double x) { return 1 - std::cos(k * x); };
  auto A2 = [k](double x) { return k * k * std::cos(k * x); };
  auto A4 = [k](double x) { return -k * k * k * k * std::cos(k * x); };
  auto Bint = [k](double y) { return y - std::sin(k * y) / k; };
  const auto e = refine(p, 2, [&](SolverState& s, double t) {
    const double a = std::exp(-t);
    fill_curl(s.u, [a](double x, double y) {
      const double sx = std::sin(kPi * x), sy = std::sin(kPi * y);
      return a * sx * sx * sy * sy;
    });
    fill_cells(s.n, [&](double x, double y) {
      const double N1 = (A2(x) * Bint(y) + A(x) * k * std::sin(k * y)) / 4;
      const double N2 = (A4(x) * Bint(y) + 2 * A2(x) * k * std::sin(k * y) - A(x) * k * k * k * std::sin(k * y)) / 4;
      return 5.0 + (-a * N1 - a * N2) / gamma;
    });
  });
  expect_order(e, 0.8);
}

TEST(WeakResidual, PressureNeverEnters) {
  RunConfig cfg = smoke_config();
  cfg.grid = unit(16);
  cfg.run.t_end = 0.2;
  cfg.run.snap_interval = 0.02;
  RunOptions opt;
  opt.keep_trajectory = true;
  const RunResult r = run(cfg, opt);
  ASSERT_TRUE(r.completed);
  const auto tests = default_battery(cfg.grid, 0.2);
  const auto before = weak_residual(r.trajectory, cfg.model, tests);

  Trajectory regauged = r.trajectory;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  for (auto& f : regauged.frames) {
    const double shift = d(rng);
    for (double& v : f.P.values()) v += shift + 0.1 * d(rng);
  }
  const auto after = weak_residual(regauged, cfg.model, tests);
  for (std::size_t i = 0; i < before.rows.size(); ++i) {
    EXPECT_EQ(before.rows[i].cell, after.rows[i].cell);
    EXPECT_EQ(before.rows[i].oxygen, after.rows[i].oxygen);
    EXPECT_EQ(before.rows[i].velocity, after.rows[i].velocity);
  }
}

TEST(WeakResidual, RejectsTestFunctionsOutlivingTrajectory) {
  const GridSpec g = unit(8);
  const Trajectory tr = manufactured(g, 0.1, [](SolverState&, double) {});
  const auto late = make_test_function("late", 1.5, {0.5, 0.5, 0}, 0.3);
  EXPECT_THROW(weak_residual(tr, ModelParams{}, {late}), std::invalid_argument);

  TestFunction never_ends = make_test_function("flat", 0.5, {0.5, 0.5, 0}, 0.3);
  never_ends.time = [](double) { return 1.0; };
  EXPECT_THROW(weak_residual(tr, ModelParams{}, {never_ends}), std::invalid_argument);
}

TEST(WeakResidual, RejectsBadFrames) {
  const GridSpec g = unit(8);
  Trajectory tr = manufactured(g, 0.1, [](SolverState&, double) {});
  const auto tests = default_battery(g, 1.0);
  Trajectory one = tr;
  one.frames.erase(one.frames.begin() + 1, one.frames.end());
  EXPECT_THROW(weak_residual(one, ModelParams{}, tests), std::invalid_argument);
  tr.frames[4].t += 0.01;
  EXPECT_THROW(weak_residual(tr, ModelParams{}, tests), std::invalid_argument);
}

TEST(TestFunctions, BumpShape) {
  const auto tf = make_test_function("b", 2.0, {0.5, 0.5, 0.0}, 0.25);
  EXPECT_EQ(tf.time(0.0), 1.0);
  EXPECT_EQ(tf.time(2.0), 0.0);
  EXPECT_EQ(tf.time(3.0), 0.0);
  EXPECT_EQ(tf.space({0.5, 0.5, 0.0}), 1.0);
  EXPECT_EQ(tf.space({0.5, 0.75, 0.0}), 0.0);
  const double h = 1e-6, t = 0.7;
  EXPECT_NEAR(tf.time_rate(t), (tf.time(t + h) - tf.time(t - h)) / (2 * h), 1e-8);
}

TEST(TestFunctions, BatteryStaysAwayFromWalls) {
  const GridSpec g(2, {32, 32, 1}, {4, 4, 1});
  for (const auto& tf : default_battery(g, 2.0)) {
    EXPECT_LE(tf.time_support_end, 1.5);
    for (int i = 0; i <= 64; ++i) {
      const double s = 4.0 * i / 64;
      EXPECT_EQ(tf.space({s, 0.0, 0.0}), 0.0);
      EXPECT_EQ(tf.space({s, 4.0, 0.0}), 0.0);
      EXPECT_EQ(tf.space({0.0, s, 0.0}), 0.0);
      EXPECT_EQ(tf.space({4.0, s, 0.0}), 0.0);
    }
  }
}

TEST(ResidualCsv, Header) {
  WeakResidualReport r;
  r.rows.push_back({"wide", 0.5, -1.0, 2.0});
  EXPECT_EQ(residual_csv(r), "name,density,concentration,velocity\nwide,0.5,-1,2\n");
}
