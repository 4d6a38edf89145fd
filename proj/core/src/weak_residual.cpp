#include "chemostokes/weak_residual.hpp"

#include <cmath>
#include <stdexcept>

#include "chemostokes/config.hpp"
#include "chemostokes/parallel.hpp"
#include "loops.hpp"

namespace chemostokes {

using detail::for_cells;
using detail::for_faces;

TestFunction make_test_function(std::string name, double t1, Point center, double radius) {
  TestFunction tf;
  tf.name = std::move(name);
  tf.time_support_end = t1;
  tf.time = [t1](double t) {
    const double s = t / t1;
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  };
  tf.time_rate = [t1](double t) {
    const double s = t / t1;
    if (s >= 1.0) return 0.0;
    const double w = 1.0 - s * s;
    return std::exp(1.0 - 1.0 / w) * (-2.0 * s / (t1 * w * w));
  };
  tf.space = [center, radius](const Point& x) {
    double r2 = 0.0;
    for (int a = 0; a < 3; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
    const double s = r2 / (radius * radius);
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s));
  };
  return tf;
}

std::vector<TestFunction> default_battery(const GridSpec& g, double horizon) {
  auto at = [&](double f0, double f1, double f2) {
    Point c{f0 * g.length(0), f1 * g.length(1), 0.0};
    c[2] = g.dim() == 3 ? f2 * g.length(2) : 0.0;
    return c;
  };
  const double L = g.min_length();
  return {
      make_test_function("wide", 0.75 * horizon, at(0.55, 0.5, 0.5), 0.375 * L),
      make_test_function("upper_left", 0.6 * horizon, at(0.375, 0.625, 0.5), 0.25 * L),
      make_test_function("lower_right", 0.5 * horizon, at(0.625, 0.375, 0.5), 0.3 * L),
  };
}

namespace {

struct Sampled {
  ScalarField psi;          // at cell centres
  FaceVectorField grad;     // discrete gradient of psi
  FaceVectorField zeta;     // discrete curl of psi sampled at (x, y) nodes
};

Sampled sample(const GridSpec& g, const TestFunction& tf) {
  Sampled s{ScalarField(g), FaceVectorField(g), FaceVectorField(g)};
  for_cells(g, [&](int i, int j, int k, std::size_t flat) {
    s.psi[flat] = tf.space(g.cell_center(i, j, k));
  });
  s.grad = gradient(s.psi);
  // Node (i, j) at (i h0, j h1); the third coordinate is the cell centre.
  auto node = [&](int i, int j, int k) {
    Point x = g.cell_center(0, 0, k);
    x[0] = i * g.spacing(0);
    x[1] = j * g.spacing(1);
    return tf.space(x);
  };
  const double h0 = g.spacing(0);
  const double h1 = g.spacing(1);
  for_faces(g, 0, [&](int i, int j, int k, std::size_t flat) {
    s.zeta.component(0)[flat] = (node(i, j + 1, k) - node(i, j, k)) / h1;
  });
  for_faces(g, 1, [&](int i, int j, int k, std::size_t flat) {
    s.zeta.component(1)[flat] = -(node(i + 1, j, k) - node(i, j, k)) / h0;
  });
  return s;
}

double cell_inner(const ScalarField& a, const ScalarField& b) {
  return parallel::tree_dot(a.values(), b.values(), a.grid().cell_volume());
}

SolverState midpoint(const SolverState& a, const SolverState& b) {
  SolverState m(a.grid());
  m.t = 0.5 * (a.t + b.t);
  for (std::size_t i = 0; i < m.n.size(); ++i) {
    m.n[i] = 0.5 * (a.n[i] + b.n[i]);
    m.c[i] = 0.5 * (a.c[i] + b.c[i]);
  }
  for (int d = 0; d < a.grid().dim(); ++d) {
    auto um = m.u.component(d);
    const auto ua = a.u.component(d);
    const auto ub = b.u.component(d);
    for (std::size_t i = 0; i < um.size(); ++i) um[i] = 0.5 * (ua[i] + ub[i]);
  }
  return m;
}

// Spatial right-hand sides of the three identities at one state.
struct SpatialTerms {
  double cell = 0.0;
  double oxygen = 0.0;
  double velocity = 0.0;
};

SpatialTerms spatial_terms(const SolverState& s, const ModelParams& p, const Sampled& tf) {
  const GridSpec& g = s.grid();
  SpatialTerms out;
  out.cell = face_inner(n_total_flux(s, p), tf.grad);

  ScalarField consumed(g);
  for (std::size_t i = 0; i < consumed.size(); ++i)
    consumed[i] = s.n[i] * consumption(std::max(s.c[i], 0.0), p);
  out.oxygen = -face_inner(gradient(s.c), tf.grad) - cell_inner(consumed, tf.psi) +
               face_inner(upwind_flux(s.u, s.c), tf.grad);

  FaceVectorField buoyancy(g);
  for (int a = 0; a < g.dim(); ++a) {
    auto b = buoyancy.component(a);
    const double gp = p.grad_phi(a);
    for_faces(g, a, [&](int i, int j, int k, std::size_t flat) {
      int c[3] = {i, j, k};
      if (c[a] == 0 || c[a] == g.cells(a)) return;
      const double right = s.n[g.cell_index(c[0], c[1], c[2])];
      c[a] -= 1;
      const double left = s.n[g.cell_index(c[0], c[1], c[2])];
      b[flat] = 0.5 * (left + right) * gp;
    });
  }
  out.velocity = face_inner(vector_laplacian(s.u), tf.zeta) + face_inner(buoyancy, tf.zeta);
  return out;
}

}  // namespace

WeakResidualReport weak_residual(const Trajectory& traj, const ModelParams& p,
                                 const std::vector<TestFunction>& tests) {
  if (traj.frames.size() < 2) throw std::invalid_argument("weak_residual needs at least two frames");
  const double ds = traj.interval;
  if (!(ds > 0.0)) throw std::invalid_argument("weak_residual needs a positive snapshot interval");
  for (std::size_t k = 0; k < traj.frames.size(); ++k) {
    const double expected = static_cast<double>(k) * ds;
    if (std::abs(traj.frames[k].t - expected) > 1e-9 * std::max(1.0, expected))
      throw std::invalid_argument("weak_residual needs uniformly spaced frames");
  }
  const double t_last = traj.frames.back().t;
  const GridSpec& g = traj.frames.front().grid();

  WeakResidualReport report;
  for (const TestFunction& tf : tests) {
    if (!(tf.time_support_end > 0.0) || tf.time_support_end > t_last ||
        tf.time(tf.time_support_end) != 0.0 || tf.time(t_last) != 0.0)
      throw std::invalid_argument("test function '" + tf.name +
                                  "' is not compactly supported in time inside the trajectory");
    const Sampled smp = sample(g, tf);
    const SolverState& first = traj.frames.front();
    const double chi0 = tf.time(0.0);
    WeakResidualRow row{tf.name, 0.0, 0.0, 0.0};
    row.cell = -chi0 * cell_inner(first.n, smp.psi);
    row.oxygen = -chi0 * cell_inner(first.c, smp.psi);
    row.velocity = -chi0 * face_inner(first.u, smp.zeta);
    for (std::size_t k = 0; k + 1 < traj.frames.size(); ++k) {
      if (static_cast<double>(k) * ds >= tf.time_support_end) break;
      const SolverState mid = midpoint(traj.frames[k], traj.frames[k + 1]);
      const double chi = tf.time(mid.t);
      const double rate = tf.time_rate(mid.t);
      const SpatialTerms rhs = spatial_terms(mid, p, smp);
      row.cell += ds * (-rate * cell_inner(mid.n, smp.psi) - chi * rhs.cell);
      row.oxygen += ds * (-rate * cell_inner(mid.c, smp.psi) - chi * rhs.oxygen);
      row.velocity += ds * (-rate * face_inner(mid.u, smp.zeta) - chi * rhs.velocity);
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string residual_csv(const WeakResidualReport& r) {
  std::string out = "name,density,concentration,velocity\n";
  for (const auto& row : r.rows)
    out += row.name + "," + format_double(row.cell) + "," + format_double(row.oxygen) + "," +
           format_double(row.velocity) + "\n";
  return out;
}

}  // namespace chemostokes
