#pragma once

#include <array>

#include "chemostokes/grid.hpp"

namespace chemostokes {

enum class SensitivityLaw { Constant, Affine };     // S0  |  S0 (1 + c)
enum class ConsumptionLaw { Linear, Saturating };   // c   |  c / (1 + c)

/// Constitutive parameters of the regularized chemotaxis-Stokes system.
///
///   m          porous-medium exponent of Delta (n + eps)^m, m > 1
///   l          sensitivity growth exponent, |S| <= n^(l-2) S~(c), l > 2
///   eps        regularization parameter in [0, 1)
///   alpha_s    weight of the identity in the sensitivity matrix
///   beta_s     weight of the rotation in the sensitivity matrix
///   grav       g with grad(phi) = -g (a constant body-force direction)
///   rotation_axis  axis of the rotation generator (3D only), unit length
struct ModelParams {
  double m = 2.0;
  double l = 2.5;
  double eps = 0.01;
  double alpha_s = 1.0;
  double beta_s = 1.0;
  SensitivityLaw s_law = SensitivityLaw::Constant;
  double s0 = 1.0;
  ConsumptionLaw f_law = ConsumptionLaw::Linear;
  std::array<double, 3> grav{0.0, 0.0, 0.0};
  std::array<double, 3> rotation_axis{0.0, 0.0, 1.0};

  /// Throws ConfigError naming the first violated constraint.
  void validate(int dim) const;

  /// grad(phi) component along `axis`.
  double grad_phi(int axis) const noexcept { return -grav[axis]; }
};

/// Row-major dim x dim matrix; unused entries are zero in 2D.
struct SensitivityTensor {
  int dim = 2;
  std::array<double, 9> a{};

  double operator()(int r, int c) const noexcept { return a[r * 3 + c]; }
  double& operator()(int r, int c) noexcept { return a[r * 3 + c]; }
  double frobenius() const noexcept;
  /// w = S v
  std::array<double, 3> apply(const std::array<double, 3>& v) const noexcept;
};

/// Quintic smoothstep 6s^5 - 15s^4 + 10s^3 clamped to [0, 1].
double smoothstep5(double s) noexcept;

/// Boundary cutoff: smoothstep5(dist(x, boundary) / (eps * L_min)).
/// Exactly 0 on the boundary; throws std::invalid_argument for eps outside (0, 1).
double rho_eps(const Point& x, const GridSpec& grid, double eps);

/// The cutoff used by the sensitivity: rho_eps for eps in (0,1); for eps = 0 its
/// pointwise limit, 1 in the open box and 0 on the boundary.
double cutoff(const Point& x, const GridSpec& grid, double eps);

/// S~(c) for the configured law.
double sensitivity_scale(double c, const ModelParams& p) noexcept;

/// Normalized mixing matrix (alpha I + beta R) / |alpha I + beta R|_F.
/// Throws std::invalid_argument when alpha = beta = 0.
SensitivityTensor mixing_matrix(int dim, const ModelParams& p);

/// rho(x) n^(l-2) S~(c) times the normalized mixing matrix. Its Frobenius norm
/// is rho n^(l-2) S~(c) <= n^(l-2) S~(c).
SensitivityTensor sensitivity_tensor(const Point& x, double n, double c, const ModelParams& p,
                                     const GridSpec& grid);

/// Same with a precomputed mixing matrix (hot loop variant).
SensitivityTensor sensitivity_tensor(const Point& x, double n, double c, const ModelParams& p,
                                     const GridSpec& grid, const SensitivityTensor& mix);

/// f(c); throws std::domain_error for c < 0.
double consumption(double c, const ModelParams& p);

}  // namespace chemostokes
