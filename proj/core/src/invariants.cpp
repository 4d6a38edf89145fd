#include "chemostokes/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "chemostokes/parallel.hpp"
#include "loops.hpp"
#include "power.hpp"

namespace chemostokes {

using detail::for_cells;

namespace {

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// int |grad u|^2 for one velocity component: differences along its own axis
// span whole cells; tangential differences at a wall use the ghost -u and
// carry half a cell of volume.
double grad_u_squared(const FaceVectorField& u, int a) {
  const GridSpec& g = u.grid();
  const auto shape = g.face_shape(a);
  const auto ua = u.component(a);
  const double vol = g.cell_volume();
  std::vector<double> terms(ua.size(), 0.0);
  parallel::for_each(ua.size(), [&](std::size_t flat) {
    const int k = static_cast<int>(flat % shape[2]);
    const int j = static_cast<int>((flat / shape[2]) % shape[1]);
    const int i = static_cast<int>(flat / (static_cast<std::size_t>(shape[2]) * shape[1]));
    const int f[3] = {i, j, k};
    double acc = 0.0;
    for (int b = 0; b < g.dim(); ++b) {
      const double h = g.spacing(b);
      if (b == a) {
        if (f[a] == g.cells(a)) continue;
        int n[3] = {i, j, k};
        n[a] += 1;
        const double d = (ua[g.face_index(a, n[0], n[1], n[2])] - ua[flat]) / h;
        acc += d * d;
      } else {
        if (f[a] == 0 || f[a] == g.cells(a)) continue;
        if (f[b] == 0) {
          const double d = 2.0 * ua[flat] / h;
          acc += 0.5 * d * d;
        }
        if (f[b] == g.cells(b) - 1) {
          const double d = 2.0 * ua[flat] / h;
          acc += 0.5 * d * d;
        } else {
          int n[3] = {i, j, k};
          n[b] += 1;
          const double d = (ua[g.face_index(a, n[0], n[1], n[2])] - ua[flat]) / h;
          acc += d * d;
        }
      }
    }
    terms[flat] = acc * vol;
  });
  return parallel::tree_sum(terms);
}

}  // namespace

EnergyDissipation energy_functional(const SolverState& s, double p_exp, double q_exp, double m,
                                    double eps) {
  const GridSpec& g = s.grid();
  const int dim = g.dim();
  const double vol = g.cell_volume();
  const auto nv = s.n.values();
  const auto cv = s.c.values();
  const FaceVectorField gc = gradient(s.c);

  ScalarField w(g);
  const double k = 0.5 * (m + p_exp - 1.0);
  for (std::size_t i = 0; i < nv.size(); ++i) w[i] = detail::power(std::max(nv[i] + eps, 0.0), k);
  const FaceVectorField gw = gradient(w);

  std::vector<double> y_terms(nv.size());
  std::vector<double> d_terms(nv.size());
  for_cells(g, [&](int i, int j, int kk, std::size_t flat) {
    const int c[3] = {i, j, kk};
    double grad[3] = {0.0, 0.0, 0.0};
    double hess[3][3] = {};
    for (int a = 0; a < dim; ++a) {
      const auto ga = gc.component(a);
      int r[3] = {i, j, kk};
      r[a] += 1;
      const double left = ga[g.face_index(a, i, j, kk)];
      const double right = ga[g.face_index(a, r[0], r[1], r[2])];
      grad[a] = 0.5 * (left + right);
      hess[a][a] = (right - left) / g.spacing(a);
    }
    for (int a = 0; a < dim; ++a) {
      for (int b = a + 1; b < dim; ++b) {
        auto at = [&](int da, int db) {
          int q[3] = {c[0], c[1], c[2]};
          q[a] = clamp_index(q[a] + da, g.cells(a));
          q[b] = clamp_index(q[b] + db, g.cells(b));
          return cv[g.cell_index(q[0], q[1], q[2])];
        };
        const double mixed = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) /
                             (4.0 * g.spacing(a) * g.spacing(b));
        hess[a][b] = hess[b][a] = mixed;
      }
    }
    double g2 = 0.0;
    double h2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      g2 += grad[a] * grad[a];
      for (int b = 0; b < dim; ++b) h2 += hess[a][b] * hess[a][b];
    }
    const double y_n = detail::power(std::max(nv[flat] + eps, 0.0), p_exp);
    const double y_c = detail::power(g2, q_exp);
    const double d_c = detail::power(g2, q_exp - 1.0) * h2;
    y_terms[flat] = (y_n + y_c) * vol;
    d_terms[flat] = d_c * vol;
  });

  EnergyDissipation out;
  out.y = parallel::tree_sum(y_terms);
  out.D = parallel::tree_sum(d_terms) + face_inner(gw, gw);
  const FaceVectorField lu = vector_laplacian(s.u);
  for (int a = 0; a < dim; ++a) out.y += grad_u_squared(s.u, a);
  out.D += face_inner(lu, lu);
  return out;
}

InvariantReport make_report(const SolverState& s, double dt, const ModelParams& p, double p_exp,
                            double q_exp) {
  InvariantReport r;
  r.step = s.step;
  r.t = s.t;
  r.dt = dt;
  r.mass = integrate(s.n);
  std::tie(r.n_min, r.n_max) = reduce_extrema(s.n);
  std::tie(r.c_min, r.c_max) = reduce_extrema(s.c);
  r.div_u_inf = max_abs(divergence(s.u));
  const EnergyDissipation e = energy_functional(s, p_exp, q_exp, p.m, p.eps);
  r.energy = e.y;
  r.dissipation = e.D;
  return r;
}

namespace {

std::string at_step(const InvariantReport& r) {
  return "step " + std::to_string(r.step) + " (t=" + std::to_string(r.t) + ")";
}

}  // namespace

Verdict check_mass(std::span<const InvariantReport> series, double rel_tol) {
  Verdict v{"check_mass", true, 0.0, ""};
  if (series.empty()) return v;
  const double m0 = series.front().mass;
  const double scale = std::abs(m0) > 0.0 ? std::abs(m0) : 1.0;
  const long steps = series.back().step - series.front().step;
  const double allowed = rel_tol * std::max(1.0, static_cast<double>(steps) / 1000.0);
  v.location = at_step(series.front());
  for (const auto& r : series) {
    const double drift = std::abs(r.mass - m0) / scale;
    if (!(drift <= v.worst_value)) {
      v.worst_value = drift;
      v.location = at_step(r);
    }
  }
  v.pass = v.worst_value <= allowed;
  return v;
}

Verdict check_max_principle(std::span<const InvariantReport> series, double c0_max) {
  Verdict v{"check_max_principle", true, 0.0, ""};
  const double cap = c0_max * (1.0 + 1e-12);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : series) {
    // Excess over the allowed band, positive means violation.
    const double over = std::max(r.c_max - cap, -1e-12 - r.c_min);
    if (!(over <= worst)) {
      worst = over;
      v.worst_value = r.c_max - cap >= -1e-12 - r.c_min ? r.c_max : r.c_min;
      v.location = at_step(r);
    }
    if (!(over <= 0.0)) v.pass = false;
  }
  return v;
}

Verdict check_positivity(std::span<const InvariantReport> series) {
  Verdict v{"check_positivity", true, std::numeric_limits<double>::infinity(), ""};
  for (const auto& r : series) {
    if (!(r.n_min >= v.worst_value)) {
      v.worst_value = r.n_min;
      v.location = at_step(r);
    }
    if (!(r.n_min >= 0.0)) v.pass = false;
  }
  if (series.empty()) v.worst_value = 0.0;
  return v;
}

Verdict check_divergence(std::span<const InvariantReport> series, double tol) {
  Verdict v{"check_divergence", true, 0.0, ""};
  if (!series.empty()) v.location = at_step(series.front());
  for (const auto& r : series) {
    if (!(r.div_u_inf <= v.worst_value)) {
      v.worst_value = r.div_u_inf;
      v.location = at_step(r);
    }
    if (!(r.div_u_inf <= tol)) v.pass = false;
  }
  return v;
}

OdiReport odi_monitor(std::span<const InvariantReport> series) {
  if (series.size() < 10) throw std::invalid_argument("odi_monitor needs at least 10 rows");
  const std::size_t n = series.size();
  std::vector<double> dydt(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 == n ? k : k + 1;
    dydt[k] = (series[hi].energy - series[lo].energy) / (series[hi].t - series[lo].t);
  }
  OdiReport out;
  bool finite = true;
  for (std::size_t k = 0; k < n; ++k) {
    const double yd = dydt[k];
    const double D = series[k].dissipation;
    finite = finite && std::isfinite(yd) && std::isfinite(D) && std::isfinite(series[k].energy);
    out.C = std::max(out.C, 0.5 * (yd + std::sqrt(yd * yd + 4.0 * D)));
    out.y_sup = std::max(out.y_sup, series[k].energy);
  }
  out.C_damp = out.C;
  out.C_src = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double d_over_c = out.C > 0.0 ? series[k].dissipation / out.C : 0.0;
    out.C_src = std::max(out.C_src, dydt[k] + d_over_c);
  }
  const double t_mid = 0.5 * (series.front().t + series.back().t);
  std::size_t mid = 0;
  while (mid + 1 < n && series[mid].t < t_mid) ++mid;
  out.y_mid = series[mid].energy;
  for (std::size_t k = mid; k < n; ++k)
    out.y_final_half_max = std::max(out.y_final_half_max, series[k].energy);
  const bool bounded = finite && out.y_final_half_max <= 2.0 * out.y_mid;
  out.verdict = bounded ? "bounded" : "unbounded";
  return out;
}

}  // namespace chemostokes
