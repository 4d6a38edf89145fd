#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "chemostokes/acceptance.hpp"
#include "chemostokes/initial_data.hpp"
#include "chemostokes/invariants.hpp"
#include "chemostokes/studies.hpp"

using namespace chemostokes;

namespace {

// Smooth random state: a few low Fourier modes plus a divergence-free
// velocity from a streamfunction that vanishes on the walls.
SolverState smooth_state(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1, 1);
  double a[6];
  for (double& x : a) x = d(rng);
  SolverState s(g);
  const double Lx = g.length(0), Ly = g.length(1);
  for (int i = 0; i < g.cells(0); ++i)
    for (int j = 0; j < g.cells(1); ++j)
      for (int k = 0; k < g.cells(2); ++k) {
        const auto x = g.cell_center(i, j, k);
        const double X = x[0] / Lx, Y = x[1] / Ly, Z = g.dim() == 3 ? x[2] / g.length(2) : 0.0;
        s.n.at(i, j, k) = 1.0 + 0.3 * std::sin(2 * M_PI * X + a[0]) * std::cos(M_PI * Y + a[1]) + 0.1 * Z;
        s.c.at(i, j, k) = 0.5 + 0.2 * std::cos(M_PI * X * (1 + a[2] * 0.5)) + 0.15 * std::sin(3 * Y + a[3]) +
                          0.05 * std::cos(2 * Z);
      }
  auto psi = [&](double x, double y) {
    return 0.4 * std::pow(std::sin(M_PI * x / Lx) * std::sin(M_PI * y / Ly), 2) * (1 + 0.3 * a[4] * x);
  };
  for (int i = 0; i <= g.cells(0); ++i)
    for (int j = 0; j < g.cells(1); ++j)
      for (int k = 0; k < g.cells(2); ++k) {
        const double x = i * g.spacing(0), y0 = j * g.spacing(1), y1 = (j + 1) * g.spacing(1);
        s.u.at(0, i, j, k) = (psi(x, y1) - psi(x, y0)) / g.spacing(1);
      }
  for (int i = 0; i < g.cells(0); ++i)
    for (int j = 0; j <= g.cells(1); ++j)
      for (int k = 0; k < g.cells(2); ++k) {
        const double y = j * g.spacing(1), x0 = i * g.spacing(0), x1 = (i + 1) * g.spacing(0);
        s.u.at(1, i, j, k) = -(psi(x1, y) - psi(x0, y)) / g.spacing(0);
      }
  s.u.zero_boundary_normals();
  return s;
}

// Independent evaluation of y and D straight from the documented stencils.
EnergyDissipation oracle(const SolverState& s, double p, double q, double m, double eps) {
  const GridSpec& g = s.grid();
  const int dim = g.dim();
  const int N[3] = {g.cells(0), g.cells(1), g.cells(2)};
  const double h[3] = {g.spacing(0), g.spacing(1), g.spacing(2)};
  const double vol = g.cell_volume();
  auto C = [&](int i, int j, int k) {
    return s.c.at(std::clamp(i, 0, N[0] - 1), std::clamp(j, 0, N[1] - 1), std::clamp(k, 0, N[2] - 1));
  };
  long double y = 0, D = 0;
  for (int i = 0; i < N[0]; ++i)
    for (int j = 0; j < N[1]; ++j)
      for (int k = 0; k < N[2]; ++k) {
        y += std::pow(s.n.at(i, j, k) + eps, p) * vol;
        int c[3] = {i, j, k};
        double grad[3] = {}, H[3][3] = {};
        for (int a = 0; a < dim; ++a) {
          int up[3] = {i, j, k}, dn[3] = {i, j, k};
          up[a] += 1;
          dn[a] -= 1;
          const double cu = C(up[0], up[1], up[2]), cd = C(dn[0], dn[1], dn[2]), c0 = C(i, j, k);
          grad[a] = (cu - cd) / (2 * h[a]);
          H[a][a] = (cu - 2 * c0 + cd) / (h[a] * h[a]);
          for (int b = 0; b < dim; ++b) {
            if (b == a) continue;
            int pp[3] = {c[0], c[1], c[2]}, pm[3] = {c[0], c[1], c[2]}, mp[3] = {c[0], c[1], c[2]},
                mm[3] = {c[0], c[1], c[2]};
            pp[a] += 1, pp[b] += 1, pm[a] += 1, pm[b] -= 1, mp[a] -= 1, mp[b] += 1, mm[a] -= 1, mm[b] -= 1;
            H[a][b] = (C(pp[0], pp[1], pp[2]) - C(pm[0], pm[1], pm[2]) - C(mp[0], mp[1], mp[2]) +
                       C(mm[0], mm[1], mm[2])) /
                      (4 * h[a] * h[b]);
          }
        }
        double g2 = 0, h2 = 0;
        for (int a = 0; a < dim; ++a) {
          g2 += grad[a] * grad[a];
          for (int b = 0; b < dim; ++b) h2 += H[a][b] * H[a][b];
        }
        y += std::pow(g2, q) * vol;
        D += std::pow(g2, q - 1) * h2 * vol;
        // |grad (n+eps)^((m+p-1)/2)|^2 on the right-hand faces.
        const double kexp = 0.5 * (m + p - 1);
        for (int a = 0; a < dim; ++a) {
          int r[3] = {i, j, k};
          r[a] += 1;
          if (r[a] >= N[a]) continue;
          const double d = (std::pow(s.n.at(r[0], r[1], r[2]) + eps, kexp) - std::pow(s.n.at(i, j, k) + eps, kexp)) / h[a];
          D += d * d * vol;
        }
      }
  // Velocity: ghost -u across walls, boundary-normal entries are zero.
  for (int a = 0; a < dim; ++a) {
    auto shape = g.face_shape(a);
    auto U = [&](int f0, int f1, int f2) -> double {
      int f[3] = {f0, f1, f2};
      if (f[a] <= 0 || f[a] >= N[a]) return 0.0;
      double sign = 1.0;
      for (int b = 0; b < dim; ++b) {
        if (b == a) continue;
        if (f[b] < 0) f[b] = 0, sign = -1.0;
        if (f[b] >= N[b]) f[b] = N[b] - 1, sign = -1.0;
      }
      return sign * s.u.at(a, f[0], f[1], f[2]);
    };
    for (int i = 0; i < shape[0]; ++i)
      for (int j = 0; j < shape[1]; ++j)
        for (int k = 0; k < shape[2]; ++k) {
          const int f[3] = {i, j, k};
          // Along the component's own axis: whole cells between consecutive faces.
          if (f[a] < N[a]) {
            int n[3] = {i, j, k};
            n[a] += 1;
            const double d = (U(n[0], n[1], n[2]) - U(i, j, k)) / h[a];
            y += d * d * vol;
          }
          if (f[a] == 0 || f[a] == N[a]) continue;
          double lap = 0;
          for (int b = 0; b < dim; ++b) {
            int up[3] = {i, j, k}, dn[3] = {i, j, k};
            up[b] += 1;
            dn[b] -= 1;
            lap += (U(up[0], up[1], up[2]) - 2 * U(i, j, k) + U(dn[0], dn[1], dn[2])) / (h[b] * h[b]);
            if (b == a) continue;
            // Tangential pairs: interior ones once, wall ghost pairs with half weight.
            const double d_up = (U(up[0], up[1], up[2]) - U(i, j, k)) / h[b];
            y += (up[b] >= N[b] ? 0.5 : 1.0) * d_up * d_up * vol;
            if (dn[b] < 0) {
              const double d_dn = (U(i, j, k) - U(dn[0], dn[1], dn[2])) / h[b];
              y += 0.5 * d_dn * d_dn * vol;
            }
          }
          D += lap * lap * vol;
        }
  }
  return {static_cast<double>(y), static_cast<double>(D)};
}

std::vector<InvariantReport> rows(std::initializer_list<std::pair<long, double>> step_mass) {
  std::vector<InvariantReport> out;
  for (auto [step, mass] : step_mass) {
    InvariantReport r;
    r.step = step;
    r.t = step * 0.01;
    r.mass = mass;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Energy, ZeroState) {
  const SolverState s(GridSpec(2, {8, 8, 1}, {1, 1, 1}));
  const auto e = energy_functional(s, 2.0, 1.5, 2.0, 0.0);
  EXPECT_EQ(e.y, 0.0);
  EXPECT_EQ(e.D, 0.0);
}

TEST(Energy, UnitDensityGivesVolume) {
  const GridSpec g(2, {16, 12, 1}, {2.0, 1.5, 1.0});
  SolverState s(g);
  for (double& v : s.n.values()) v = 1.0;
  for (double& v : s.c.values()) v = 0.4;
  const auto e = energy_functional(s, 2.0, 1.5, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(e.y, g.volume());
  EXPECT_EQ(e.D, 0.0);
}

TEST(Energy, MatchesIndependentOracle) {
  for (int dim : {2, 3}) {
    const GridSpec g = dim == 2 ? GridSpec(2, {24, 20, 1}, {2.0, 1.6, 1.0})
                                : GridSpec(3, {10, 8, 6}, {1.0, 0.8, 0.6});
    for (unsigned seed : {1u, 2u, 3u}) {
      const SolverState s = smooth_state(g, seed);
      for (auto [p, q] : {std::pair{2.0, 1.5}, std::pair{3.0, 1.25}, std::pair{1.7, 2.0}}) {
        const auto e = energy_functional(s, p, q, 2.2, 0.01);
        const auto ref = oracle(s, p, q, 2.2, 0.01);
        EXPECT_NEAR(e.y, ref.y, 1e-10 * ref.y) << dim << "D seed " << seed;
        EXPECT_NEAR(e.D, ref.D, 1e-10 * ref.D) << dim << "D seed " << seed;
      }
    }
  }
}

TEST(Energy, VelocityTermIsMinusLaplacianPairing) {
  const GridSpec g(2, {20, 20, 1}, {1, 1, 1});
  SolverState s = smooth_state(g, 9);
  for (double& v : s.n.values()) v = 0.0;
  for (double& v : s.c.values()) v = 0.0;
  const auto e = energy_functional(s, 2.0, 1.5, 2.0, 0.0);
  const double pairing = -face_inner(s.u, vector_laplacian(s.u));
  EXPECT_NEAR(e.y, pairing, 1e-12 * pairing);
}

TEST(Energy, MonotoneInDensity) {
  const GridSpec g(2, {12, 12, 1}, {1, 1, 1});
  SolverState s = smooth_state(g, 4);
  const double y0 = energy_functional(s, 2.5, 1.5, 2.0, 0.01).y;
  for (std::size_t cell : {0u, 17u, 143u}) {
    SolverState t = s;
    t.n[cell] += 0.1;
    EXPECT_GT(energy_functional(t, 2.5, 1.5, 2.0, 0.01).y, y0);
  }
}

TEST(Energy, DissipationVanishesOnlyForTrivialStates) {
  const GridSpec g(2, {12, 12, 1}, {1, 1, 1});
  SolverState s(g);
  for (double& v : s.n.values()) v = 0.7;
  for (double& v : s.c.values()) v = 0.3;
  EXPECT_LE(energy_functional(s, 2, 1.5, 2, 0.01).D, 1e-12);

  SolverState bumped_n = s, bumped_c = s, moving = s;
  bumped_n.n[50] += 1e-3;
  bumped_c.c[50] += 1e-3;
  moving.u.at(0, 5, 5) = 1e-3;
  moving.u.at(0, 6, 5) = 1e-3;
  EXPECT_GT(energy_functional(bumped_n, 2, 1.5, 2, 0.01).D, 1e-12);
  EXPECT_GT(energy_functional(bumped_c, 2, 1.5, 2, 0.01).D, 1e-12);
  EXPECT_GT(energy_functional(moving, 2, 1.5, 2, 0.01).D, 1e-12);
}

TEST(CheckMass, ConstantSeriesHasZeroDrift) {
  const auto s = rows({{0, 1.0}, {1, 1.0}, {2, 1.0}});
  const Verdict v = check_mass(s);
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.worst_value, 0.0);
  EXPECT_EQ(v.check, "check_mass");
}

TEST(CheckMass, AllowanceScalesWithSteps) {
  EXPECT_TRUE(check_mass(rows({{0, 1.0}, {2000, 1.0 + 1.5e-12}})).pass);
  EXPECT_FALSE(check_mass(rows({{0, 1.0}, {500, 1.0 + 1.5e-12}})).pass);
}

TEST(CheckMass, LeakyFluxIsCaught) {
  RunConfig cfg = smoke_config();
  Solver solver(cfg.grid, cfg.model, cfg.run.solver);
  solver.set_flux_hook(mass_leak_hook());
  SolverState s = make_initial_state(cfg);
  std::vector<InvariantReport> series{make_report(s, 0, cfg.model, 2, 1.5)};
  for (int k = 0; k < 20; ++k) {
    s = solver.advance(s);
    series.push_back(make_report(s, 0, cfg.model, 2, 1.5));
  }
  const Verdict v = check_mass(series);
  EXPECT_FALSE(v.pass);
  EXPECT_GT(v.worst_value, 1e-12);
}

TEST(CheckMaxPrinciple, HeatOnlyRunPasses) {
  RunConfig cfg = smoke_config();
  cfg.grid = GridSpec(2, {24, 24, 1}, {1, 1, 1});
  Solver solver(cfg.grid, cfg.model, cfg.run.solver);
  SolverState s(cfg.grid);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (double& v : s.c.values()) v = d(rng);
  const double c0_max = reduce_extrema(s.c).second;
  std::vector<InvariantReport> series;
  for (int k = 0; k < 50; ++k) {
    series.push_back(make_report(s, 0, cfg.model, 2, 1.5));
    s = solver.advance(s);
  }
  EXPECT_TRUE(check_max_principle(series, c0_max).pass);
}

TEST(CheckMaxPrinciple, ViolationsFail) {
  auto s = rows({{0, 1}, {1, 1}});
  s[0].c_max = s[1].c_max = 1.0;
  EXPECT_TRUE(check_max_principle(s, 1.0).pass);
  s[1].c_max = 1.0 + 1e-11;
  const Verdict v = check_max_principle(s, 1.0);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.worst_value, 1.0 + 1e-11);
  s[1].c_max = 1.0;
  s[1].c_min = -2e-12;
  EXPECT_FALSE(check_max_principle(s, 1.0).pass);
}

TEST(CheckPositivity, StrictlyNonnegative) {
  auto s = rows({{0, 1}, {1, 1}});
  s[0].n_min = 0.0;
  s[1].n_min = 1e-5;
  EXPECT_TRUE(check_positivity(s).pass);
  s[1].n_min = -1e-300;
  EXPECT_FALSE(check_positivity(s).pass);
}

TEST(CheckDivergence, Threshold) {
  auto s = rows({{0, 1}, {1, 1}});
  s[1].div_u_inf = 1e-8;
  EXPECT_TRUE(check_divergence(s).pass);
  s[1].div_u_inf = 1.1e-8;
  const Verdict v = check_divergence(s);
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.worst_value, 1.1e-8);
}

TEST(OdiMonitor, TooShortSeriesRejected) {
  std::vector<InvariantReport> s(9);
  EXPECT_THROW(odi_monitor(s), std::invalid_argument);
}

TEST(OdiMonitor, DecayingDiffusionIsBounded) {
  RunConfig cfg = smoke_config();
  cfg.grid = GridSpec(2, {16, 16, 1}, {1, 1, 1});
  cfg.model.s0 = 0.0;
  cfg.model.grav = {0, 0, 0};
  Solver solver(cfg.grid, cfg.model, cfg.run.solver);
  SolverState s = make_initial_state(cfg);
  std::vector<InvariantReport> series;
  for (int k = 0; k < 300; ++k) {
    series.push_back(make_report(s, 0, cfg.model, 2, 1.5));
    s = solver.advance(s);
  }
  const OdiReport r = odi_monitor(series);
  EXPECT_EQ(r.verdict, "bounded");
  EXPECT_GT(r.C, 0.0);
  EXPECT_LE(r.y_final_half_max, r.y_mid);
  // The reported C satisfies the inequality on every row.
  for (std::size_t k = 0; k < series.size(); ++k) {
    const std::size_t lo = k ? k - 1 : 0, hi = k + 1 < series.size() ? k + 1 : k;
    const double yd = (series[hi].energy - series[lo].energy) / (series[hi].t - series[lo].t);
    EXPECT_LE(yd + series[k].dissipation / r.C, r.C * (1 + 1e-12));
  }
}

TEST(OdiMonitor, DoublingIsUnbounded) {
  std::vector<InvariantReport> s(20);
  for (int k = 0; k < 20; ++k) {
    s[k].t = k * 0.1;
    s[k].energy = std::exp(k * 0.2);
    s[k].dissipation = 0.0;
  }
  EXPECT_EQ(odi_monitor(s).verdict, "unbounded");
}

TEST(OdiMonitor, NonFiniteIsUnbounded) {
  std::vector<InvariantReport> s(12);
  for (int k = 0; k < 12; ++k) {
    s[k].t = k;
    s[k].energy = 1.0;
  }
  s[3].dissipation = std::nan("");
  EXPECT_EQ(odi_monitor(s).verdict, "unbounded");
}
