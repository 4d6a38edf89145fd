#include "chemostokes/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "chemostokes/errors.hpp"
#include "loops.hpp"
#include "power.hpp"

namespace chemostokes {

using detail::for_cells;
using detail::for_faces;

namespace {

// Centred difference of q along axis b at cell (c0,c1,c2), mirrored at the walls.
double centred_diff(const GridSpec& g, std::span<const double> q, const int c[3], int b) {
  int lo[3] = {c[0], c[1], c[2]};
  int hi[3] = {c[0], c[1], c[2]};
  lo[b] = std::max(lo[b] - 1, 0);
  hi[b] = std::min(hi[b] + 1, g.cells(b) - 1);
  return (q[g.cell_index(hi[0], hi[1], hi[2])] - q[g.cell_index(lo[0], lo[1], lo[2])]) /
         (2.0 * g.spacing(b));
}

std::string describe_cell(const GridSpec& g, std::size_t idx) {
  const auto c = g.cell_coords(idx);
  std::ostringstream os;
  os << "cell (" << c[0] << ", " << c[1];
  if (g.dim() == 3) os << ", " << c[2];
  os << ")";
  return os.str();
}

void reject_non_finite(const SolverState& s, const char* stage) {
  try {
    require_finite(s.n, "n");
    require_finite(s.c, "c");
    require_finite(s.u, "u");
    require_finite(s.P, "P");
  } catch (const NonFiniteError& e) {
    throw StepRejected(stage, std::string("non-finite state: ") + e.what(), 0.0, e.index());
  }
}

}  // namespace

FaceVectorField chemotactic_velocity(const SolverState& s, const ModelParams& p) {
  const GridSpec& g = s.grid();
  const int dim = g.dim();
  FaceVectorField w(g);
  const auto nv = s.n.values();
  const auto cv = s.c.values();
  const SensitivityTensor mix = mixing_matrix(dim, p);
  for (int a = 0; a < dim; ++a) {
    auto comp = w.component(a);
    const int na = g.cells(a);
    const double ha = g.spacing(a);
    for_faces(g, a, [&](int i, int j, int k, std::size_t flat) {
      const int f[3] = {i, j, k};
      if (f[a] == 0 || f[a] == na) {
        comp[flat] = 0.0;
        return;
      }
      const int right[3] = {i, j, k};
      int left[3] = {i, j, k};
      left[a] -= 1;
      const std::size_t iR = g.cell_index(right[0], right[1], right[2]);
      const std::size_t iL = g.cell_index(left[0], left[1], left[2]);
      std::array<double, 3> grad{0.0, 0.0, 0.0};
      for (int b = 0; b < dim; ++b) {
        grad[b] = b == a ? (cv[iR] - cv[iL]) / ha
                         : 0.5 * (centred_diff(g, cv, left, b) + centred_diff(g, cv, right, b));
      }
      const double n_face = std::max(0.5 * (nv[iL] + nv[iR]), 0.0);
      const double c_face = std::max(0.5 * (cv[iL] + cv[iR]), 0.0);
      const SensitivityTensor S =
          sensitivity_tensor(g.face_center(a, i, j, k), n_face, c_face, p, g, mix);
      double wa = 0.0;
      for (int b = 0; b < dim; ++b) wa += S(a, b) * grad[b];
      comp[flat] = wa;
    });
  }
  return w;
}

FaceVectorField upwind_flux(const FaceVectorField& vel, const ScalarField& q) {
  const GridSpec& g = q.grid();
  FaceVectorField F(g);
  const auto qv = q.values();
  for (int a = 0; a < g.dim(); ++a) {
    auto out = F.component(a);
    const auto va = vel.component(a);
    const int na = g.cells(a);
    for_faces(g, a, [&](int i, int j, int k, std::size_t flat) {
      int c[3] = {i, j, k};
      if (c[a] == 0 || c[a] == na) {
        out[flat] = 0.0;
        return;
      }
      const double v = va[flat];
      if (v < 0.0) {
        out[flat] = v * qv[g.cell_index(c[0], c[1], c[2])];
      } else {
        c[a] -= 1;
        out[flat] = v * qv[g.cell_index(c[0], c[1], c[2])];
      }
    });
  }
  return F;
}

FaceVectorField chemotactic_face_flux(const SolverState& s, const FaceVectorField& velocity) {
  return upwind_flux(velocity, s.n);
}

FaceVectorField chemotactic_face_flux(const SolverState& s, const ModelParams& p) {
  return chemotactic_face_flux(s, chemotactic_velocity(s, p));
}

namespace {

double cfl_from(const SolverState& s, const ModelParams& p, double safety,
                const FaceVectorField& w) {
  const GridSpec& g = s.grid();
  const int dim = g.dim();
  const double h = g.min_spacing();
  double n_max = 0.0;
  for (double x : s.n.values()) n_max = std::max(n_max, x);
  const double d_max = p.m * detail::power(std::max(n_max + p.eps, 0.0), p.m - 1.0);
  double v_max = 0.0;
  for (int a = 0; a < dim; ++a) {
    const auto ua = s.u.component(a);
    const auto wa = w.component(a);
    for (std::size_t i = 0; i < ua.size(); ++i)
      v_max = std::max(v_max, std::abs(ua[i]) + std::abs(wa[i]));
  }
  const double diff_c = h * h / (2.0 * dim);
  const double diff_n = d_max > 0.0 ? diff_c / d_max : diff_c * 1e300;
  const double transport = h / (v_max + 1e-30);
  return safety * std::min({diff_n, transport, diff_c});
}

}  // namespace

double cfl_dt(const SolverState& s, const ModelParams& p, double safety) {
  reject_non_finite(s, "cfl_dt");
  return cfl_from(s, p, safety, chemotactic_velocity(s, p));
}

namespace {

FaceVectorField total_flux_from(const SolverState& s, const ModelParams& p,
                                const FaceVectorField& w) {
  const GridSpec& g = s.grid();
  ScalarField pressure_like(g);
  const auto nv = s.n.values();
  auto pw = pressure_like.values();
  for (std::size_t i = 0; i < nv.size(); ++i) pw[i] = detail::power(std::max(nv[i] + p.eps, 0.0), p.m);
  FaceVectorField F = gradient(pressure_like);
  const FaceVectorField chem = upwind_flux(w, s.n);
  const FaceVectorField adv = upwind_flux(s.u, s.n);
  for (int a = 0; a < g.dim(); ++a) {
    auto f = F.component(a);
    const auto ch = chem.component(a);
    const auto ad = adv.component(a);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = -f[i] + ch[i] + ad[i];
  }
  return F;
}

ScalarField apply_n_update(const SolverState& s, double dt, const FaceVectorField& F) {
  const ScalarField div = divergence(F);
  ScalarField out(s.grid());
  const auto nv = s.n.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < nv.size(); ++i) ov[i] = nv[i] - dt * div[i];
  const auto it = std::min_element(ov.begin(), ov.end());
  if (*it < -kNegativityTolerance) {
    const auto idx = static_cast<std::size_t>(it - ov.begin());
    throw StepRejected("step_n",
                       "negative density " + std::to_string(*it) + " at " +
                           describe_cell(s.grid(), idx) + " (CFL violation)",
                       *it, idx);
  }
  return out;
}

}  // namespace

FaceVectorField n_total_flux(const SolverState& s, const ModelParams& p) {
  return total_flux_from(s, p, chemotactic_velocity(s, p));
}

ScalarField step_n(const SolverState& s, const ModelParams& p, double dt, const FluxHook& hook) {
  FaceVectorField F = n_total_flux(s, p);
  if (hook) hook(F);
  return apply_n_update(s, dt, F);
}

ScalarField step_c(const SolverState& s, const ModelParams& p, double dt) {
  const GridSpec& g = s.grid();
  const int dim = g.dim();
  const ScalarField lap = laplacian(s.c);
  const auto cv = s.c.values();
  const auto nv = s.n.values();
  ScalarField out(g);
  auto ov = out.values();
  for_cells(g, [&](int i, int j, int k, std::size_t flat) {
    // Donor-cell u.grad c: inflow through the left face uses u_left > 0,
    // inflow through the right face uses u_right < 0.
    double adv = 0.0;
    for (int a = 0; a < dim; ++a) {
      int c[3] = {i, j, k};
      const auto ua = s.u.component(a);
      const double u_left = ua[g.face_index(a, c[0], c[1], c[2])];
      c[a] += 1;
      const double u_right = ua[g.face_index(a, c[0], c[1], c[2])];
      c[a] -= 1;
      const double h = g.spacing(a);
      if (u_left > 0.0 && c[a] > 0) {
        c[a] -= 1;
        adv += u_left * (cv[flat] - cv[g.cell_index(c[0], c[1], c[2])]) / h;
        c[a] += 1;
      }
      if (u_right < 0.0 && c[a] + 1 < g.cells(a)) {
        c[a] += 1;
        adv += u_right * (cv[g.cell_index(c[0], c[1], c[2])] - cv[flat]) / h;
      }
    }
    const double cc = std::max(cv[flat], 0.0);
    ov[flat] = cv[flat] + dt * (lap[flat] - adv - nv[flat] * consumption(cc, p));
  });
  const auto it = std::min_element(ov.begin(), ov.end());
  if (*it < -kNegativityTolerance) {
    const auto idx = static_cast<std::size_t>(it - ov.begin());
    throw StepRejected("step_c",
                       "negative concentration " + std::to_string(*it) + " at " +
                           describe_cell(g, idx) + " (CFL violation)",
                       *it, idx);
  }
  for (double& x : ov) x = std::max(x, 0.0);
  return out;
}

StokesResult stokes_step(const SolverState& s, const ModelParams& p, double dt,
                         NeumannPoisson& poisson, const SolverSettings& settings) {
  const GridSpec& g = s.grid();
  const int dim = g.dim();
  const FaceVectorField lap = vector_laplacian(s.u);
  const auto nv = s.n.values();
  FaceVectorField u_star(g);
  for (int a = 0; a < dim; ++a) {
    auto us = u_star.component(a);
    const auto u0 = s.u.component(a);
    const auto la = lap.component(a);
    const int na = g.cells(a);
    const double force_dir = p.grad_phi(a);
    for_faces(g, a, [&](int i, int j, int k, std::size_t flat) {
      int c[3] = {i, j, k};
      if (c[a] == 0 || c[a] == na) {
        us[flat] = 0.0;
        return;
      }
      const double n_right = nv[g.cell_index(c[0], c[1], c[2])];
      c[a] -= 1;
      const double n_left = nv[g.cell_index(c[0], c[1], c[2])];
      const double n_face = 0.5 * (n_left + n_right);
      us[flat] = u0[flat] + dt * (la[flat] + n_face * force_dir);
    });
  }

  ScalarField rhs = divergence(u_star);
  for (double& x : rhs.values()) x /= dt;
  ScalarField psi = s.P;
  StokesResult out{u_star, ScalarField(g), {}, 0.0};
  out.cg = poisson.solve(rhs, psi, settings.cg_rel_tol, settings.max_cg_iters);
  if (!out.cg.converged) {
    throw StepRejected("stokes_step",
                       "pressure CG did not converge in " + std::to_string(out.cg.iterations) +
                           " iterations (relative residual " +
                           std::to_string(out.cg.relative_residual) + ")",
                       out.cg.relative_residual);
  }
  const FaceVectorField gpsi = gradient(psi);
  for (int a = 0; a < dim; ++a) {
    auto ua = out.u.component(a);
    const auto ga = gpsi.component(a);
    for (std::size_t i = 0; i < ua.size(); ++i) ua[i] -= dt * ga[i];
  }
  out.div_inf = max_abs(divergence(out.u));
  if (out.div_inf > settings.proj_tol) {
    throw StepRejected("stokes_step",
                       "projected velocity divergence " + std::to_string(out.div_inf) +
                           " exceeds tolerance",
                       out.div_inf);
  }
  out.P = std::move(psi);
  return out;
}

StokesResult stokes_step(const SolverState& s, const ModelParams& p, double dt,
                         const SolverSettings& settings) {
  NeumannPoisson poisson(s.grid(), settings.preconditioner);
  return stokes_step(s, p, dt, poisson, settings);
}

Solver::Solver(const GridSpec& grid, ModelParams params, SolverSettings settings)
    : params_(std::move(params)), settings_(settings), poisson_(grid, settings.preconditioner) {
  params_.validate(grid.dim());
}

SolverState Solver::advance(const SolverState& s, double land_on, StepInfo* info) {
  reject_non_finite(s, "advance");
  const FaceVectorField w = chemotactic_velocity(s, params_);
  double dt = cfl_from(s, params_, settings_.safety, w);
  bool landed = false;
  if (s.t + dt >= land_on) {
    dt = land_on - s.t;
    landed = true;
  }
  if (!(dt > 0.0)) throw StepRejected("advance", "non-positive time step");

  SolverState next(s.grid());
  FaceVectorField F = total_flux_from(s, params_, w);
  if (hook_) hook_(F);
  next.n = apply_n_update(s, dt, F);
  next.c = step_c(s, params_, dt);
  StokesResult st = stokes_step(s, params_, dt, poisson_, settings_);
  next.u = std::move(st.u);
  next.P = std::move(st.P);
  next.t = landed ? land_on : s.t + dt;
  next.step = s.step + 1;

  try {
    require_finite(next.n, "n");
    require_finite(next.c, "c");
    require_finite(next.u, "u");
  } catch (const NonFiniteError& e) {
    throw StepRejected("blow-up",
                       std::string(e.what()) + " at step " + std::to_string(next.step), 0.0,
                       e.index());
  }
  if (info) *info = StepInfo{dt, st.cg, st.div_inf};
  return next;
}

}  // namespace chemostokes
