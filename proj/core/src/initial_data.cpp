#include "chemostokes/initial_data.hpp"

#include <cmath>
#include <random>

namespace chemostokes {

SolverState make_initial_state(const RunConfig& cfg) {
  const GridSpec& g = cfg.grid;
  const InitialSettings& in = cfg.initial;
  SolverState s(g);
  auto n = s.n.values();
  auto c = s.c.values();

  Point center{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a)
    center[a] = in.n_center[a] < 0.0 ? 0.5 * g.length(a) : in.n_center[a];

  for (std::size_t idx = 0; idx < s.n.size(); ++idx) {
    const auto ijk = g.cell_coords(idx);
    const Point x = g.cell_center(ijk[0], ijk[1], ijk[2]);
    switch (in.n_profile) {
      case InitialSettings::NProfile::Gaussian: {
        double r2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
        n[idx] = std::exp(-r2 / (2.0 * in.n_width * in.n_width));
        break;
      }
      case InitialSettings::NProfile::Uniform:
        n[idx] = in.n_value;
        break;
      case InitialSettings::NProfile::Zero:
        n[idx] = 0.0;
        break;
    }
    if (in.c_profile == InitialSettings::CProfile::Uniform) {
      c[idx] = in.c_value;
    } else {
      const double s01 = x[in.c_axis] / g.length(in.c_axis);
      c[idx] = in.c_low + (in.c_high - in.c_low) * s01;
    }
  }

  if (in.n_noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    for (double& v : n) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      v *= 1.0 + in.n_noise * (2.0 * u - 1.0);
    }
  }

  if (in.n_profile == InitialSettings::NProfile::Gaussian) {
    const double total = integrate(s.n);
    for (double& v : n) v *= in.n_mass / total;
  }
  return s;
}

}  // namespace chemostokes
