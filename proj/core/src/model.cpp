#include "chemostokes/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chemostokes/errors.hpp"
#include "power.hpp"

namespace chemostokes {

void ModelParams::validate(int dim) const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(m) || !(m > 1.0)) throw ConfigError("model.m must be > 1");
  if (!finite(l) || !(l > 2.0)) throw ConfigError("model.l must be > 2 (sensitivity n^(l-2) S~(c) with l > 2)");
  if (!finite(eps) || eps < 0.0 || eps >= 1.0) throw ConfigError("model.eps must lie in [0, 1)");
  if (!finite(alpha_s) || !finite(beta_s)) throw ConfigError("model.alpha_S/beta_S must be finite");
  if (alpha_s == 0.0 && beta_s == 0.0)
    throw ConfigError("model.alpha_S and model.beta_S cannot both be 0");
  if (!finite(s0) || s0 < 0.0) throw ConfigError("model.s0 must be >= 0");
  for (double g : grav)
    if (!finite(g)) throw ConfigError("model.grav must be finite");
  if (dim == 3) {
    const double norm = std::sqrt(rotation_axis[0] * rotation_axis[0] +
                                  rotation_axis[1] * rotation_axis[1] +
                                  rotation_axis[2] * rotation_axis[2]);
    if (std::abs(norm - 1.0) > 1e-12) throw ConfigError("model.rotation_axis must be a unit vector");
  }
}

double SensitivityTensor::frobenius() const noexcept {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

std::array<double, 3> SensitivityTensor::apply(const std::array<double, 3>& v) const noexcept {
  std::array<double, 3> w{0.0, 0.0, 0.0};
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) w[r] += a[r * 3 + c] * v[c];
  return w;
}

double smoothstep5(double s) noexcept {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

namespace {

double boundary_distance(const Point& x, const GridSpec& grid) {
  double d = std::min(x[0], grid.length(0) - x[0]);
  for (int a = 1; a < grid.dim(); ++a) d = std::min({d, x[a], grid.length(a) - x[a]});
  return std::max(d, 0.0);
}

}  // namespace

double rho_eps(const Point& x, const GridSpec& grid, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("rho_eps: eps must lie in (0, 1)");
  return smoothstep5(boundary_distance(x, grid) / (eps * grid.min_length()));
}

double cutoff(const Point& x, const GridSpec& grid, double eps) {
  if (eps > 0.0) return rho_eps(x, grid, eps);
  return boundary_distance(x, grid) > 0.0 ? 1.0 : 0.0;
}

double sensitivity_scale(double c, const ModelParams& p) noexcept {
  switch (p.s_law) {
    case SensitivityLaw::Constant:
      return p.s0;
    case SensitivityLaw::Affine:
      return p.s0 * (1.0 + c);
  }
  return p.s0;
}

SensitivityTensor mixing_matrix(int dim, const ModelParams& p) {
  if (p.alpha_s == 0.0 && p.beta_s == 0.0)
    throw std::invalid_argument("sensitivity mixing degenerate: alpha_S = beta_S = 0");
  SensitivityTensor t;
  t.dim = dim;
  for (int d = 0; d < dim; ++d) t(d, d) = p.alpha_s;
  if (dim == 2) {
    t(0, 1) = -p.beta_s;
    t(1, 0) = p.beta_s;
  } else {
    // Cross-product matrix [k]_x: rotation generator about the axis k.
    const auto& k = p.rotation_axis;
    t(0, 1) = -p.beta_s * k[2];
    t(0, 2) = p.beta_s * k[1];
    t(1, 0) = p.beta_s * k[2];
    t(1, 2) = -p.beta_s * k[0];
    t(2, 0) = -p.beta_s * k[1];
    t(2, 1) = p.beta_s * k[0];
  }
  const double norm = t.frobenius();
  for (double& x : t.a) x /= norm;
  return t;
}

SensitivityTensor sensitivity_tensor(const Point& x, double n, double c, const ModelParams& p,
                                     const GridSpec& grid, const SensitivityTensor& mix) {
  SensitivityTensor t;
  t.dim = grid.dim();
  const double rho = cutoff(x, grid, p.eps);
  if (rho == 0.0 || n <= 0.0) return t;
  const double scale = rho * detail::power(n, p.l - 2.0) * sensitivity_scale(c, p);
  for (std::size_t i = 0; i < t.a.size(); ++i) t.a[i] = scale * mix.a[i];
  return t;
}

SensitivityTensor sensitivity_tensor(const Point& x, double n, double c, const ModelParams& p,
                                     const GridSpec& grid) {
  return sensitivity_tensor(x, n, c, p, grid, mixing_matrix(grid.dim(), p));
}

double consumption(double c, const ModelParams& p) {
  if (c < 0.0) throw std::domain_error("consumption: negative concentration " + std::to_string(c));
  switch (p.f_law) {
    case ConsumptionLaw::Linear:
      return c;
    case ConsumptionLaw::Saturating:
      return c / (1.0 + c);
  }
  return c;
}

}  // namespace chemostokes
