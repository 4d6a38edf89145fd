#pragma once

#include <functional>
#include <limits>
#include <optional>

#include "chemostokes/grid.hpp"
#include "chemostokes/model.hpp"
#include "chemostokes/poisson.hpp"

namespace chemostokes {

/// Fields of the regularized system at one instant.
struct SolverState {
  double t = 0.0;
  long step = 0;
  ScalarField n;        // cell density, >= 0
  ScalarField c;        // oxygen concentration, >= 0
  FaceVectorField u;    // velocity, zero normal component on the walls
  ScalarField P;        // pressure, mean zero

  explicit SolverState(const GridSpec& g) : n(g), c(g), u(g), P(g) {}
  const GridSpec& grid() const noexcept { return n.grid(); }

  friend bool operator==(const SolverState&, const SolverState&) = default;
};

struct SolverSettings {
  double safety = 0.2;
  double proj_tol = 1e-8;
  int max_cg_iters = 500;
  double cg_rel_tol = 1e-10;
  NeumannPoisson::Preconditioner preconditioner = NeumannPoisson::Preconditioner::Spectral;
};

/// Rejected sub-steps below this are treated as a CFL violation.
inline constexpr double kNegativityTolerance = 1e-12;

/// Test hook: receives the total cell flux of the n update before it is applied.
using FluxHook = std::function<void(FaceVectorField&)>;

/// Normal component of S_eps(x_f, n_f, c_f) grad c on every face, with n_f, c_f
/// face means and the tangential gradient averaged from the two adjacent cells.
/// Boundary faces carry 0.
FaceVectorField chemotactic_velocity(const SolverState& s, const ModelParams& p);

/// Donor-cell chemotactic flux n_upwind * (S grad c)_normal.
FaceVectorField chemotactic_face_flux(const SolverState& s, const ModelParams& p);
FaceVectorField chemotactic_face_flux(const SolverState& s, const FaceVectorField& velocity);

/// Donor-cell advective flux u_normal * q_upwind.
FaceVectorField upwind_flux(const FaceVectorField& u, const ScalarField& q);

/// safety * min(h^2/(2 dim D_max), h/(V_max + 1e-30), h^2/(2 dim)) with
/// D_max = m max(n + eps)^(m-1) and V_max the largest |u_a| + |w_a| over faces.
double cfl_dt(const SolverState& s, const ModelParams& p, double safety);

/// Total flux -grad (n+eps)^m + chemotactic + advective, boundary normals zero.
FaceVectorField n_total_flux(const SolverState& s, const ModelParams& p);

/// n - dt div(F_total). Throws StepRejected if min < -1e-12.
ScalarField step_n(const SolverState& s, const ModelParams& p, double dt,
                   const FluxHook& hook = {});

/// c + dt (laplacian c - upwind u.grad c - n f(c)). Throws StepRejected if
/// min < -1e-12; values in [-1e-12, 0) are set to 0.
ScalarField step_c(const SolverState& s, const ModelParams& p, double dt);

struct StokesResult {
  FaceVectorField u;
  ScalarField P;
  NeumannPoisson::Result cg;
  double div_inf = 0.0;
};

/// One Chorin projection step of u_t + grad P = laplacian u + n grad phi.
StokesResult stokes_step(const SolverState& s, const ModelParams& p, double dt,
                         NeumannPoisson& poisson, const SolverSettings& settings);
StokesResult stokes_step(const SolverState& s, const ModelParams& p, double dt,
                         const SolverSettings& settings = {});

/// Fully explicit stepping of the coupled system. Sub-steps are n, c, then
/// (u, P), each from the beginning-of-step fields.
class Solver {
 public:
  Solver(const GridSpec& grid, ModelParams params, SolverSettings settings = {});

  const ModelParams& params() const noexcept { return params_; }
  const SolverSettings& settings() const noexcept { return settings_; }
  const GridSpec& grid() const noexcept { return poisson_.grid(); }

  void set_flux_hook(FluxHook hook) { hook_ = std::move(hook); }

  struct StepInfo {
    double dt = 0.0;
    NeumannPoisson::Result cg;
    double div_inf = 0.0;
  };

  /// Advances by cfl_dt, shortened so that t never passes `land_on`; a step
  /// that reaches land_on sets t to exactly land_on.
  SolverState advance(const SolverState& s,
                      double land_on = std::numeric_limits<double>::infinity(),
                      StepInfo* info = nullptr);

 private:
  ModelParams params_;
  SolverSettings settings_;
  NeumannPoisson poisson_;
  FluxHook hook_;
};

}  // namespace chemostokes
