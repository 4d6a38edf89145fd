#include "chemostokes/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "chemostokes/errors.hpp"
#include "chemostokes/parallel.hpp"
#include "loops.hpp"

namespace chemostokes {
using detail::for_cells;
using detail::for_faces;

GridSpec::GridSpec(int dim, std::array<int, 3> cells, std::array<double, 3> lengths)
    : dim_(dim), cells_(cells), lengths_(lengths) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid dim must be 2 or 3");
  if (dim == 2) {
    cells_[2] = 1;
    lengths_[2] = 1.0;
  }
  for (int a = 0; a < dim; ++a) {
    if (cells_[a] < 4)
      throw std::invalid_argument("grid axis " + std::to_string(a) + " needs at least 4 cells");
    if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a]))
      throw std::invalid_argument("grid axis " + std::to_string(a) + " needs a positive length");
  }
}

std::size_t GridSpec::cell_count() const noexcept {
  return static_cast<std::size_t>(cells_[0]) * cells_[1] * cells_[2];
}

double GridSpec::cell_volume() const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= spacing(a);
  return v;
}

double GridSpec::volume() const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= lengths_[a];
  return v;
}

double GridSpec::min_length() const noexcept {
  double v = lengths_[0];
  for (int a = 1; a < dim_; ++a) v = std::min(v, lengths_[a]);
  return v;
}

double GridSpec::min_spacing() const noexcept {
  double v = spacing(0);
  for (int a = 1; a < dim_; ++a) v = std::min(v, spacing(a));
  return v;
}

std::size_t GridSpec::face_count(int axis) const noexcept {
  const auto s = face_shape(axis);
  return static_cast<std::size_t>(s[0]) * s[1] * s[2];
}

std::array<int, 3> GridSpec::cell_coords(std::size_t idx) const noexcept {
  const int k = static_cast<int>(idx % cells_[2]);
  idx /= cells_[2];
  const int j = static_cast<int>(idx % cells_[1]);
  const int i = static_cast<int>(idx / cells_[1]);
  return {i, j, k};
}

Point GridSpec::cell_center(int i, int j, int k) const noexcept {
  Point p{(i + 0.5) * spacing(0), (j + 0.5) * spacing(1), 0.0};
  if (dim_ == 3) p[2] = (k + 0.5) * spacing(2);
  return p;
}

Point GridSpec::face_center(int axis, int i, int j, int k) const noexcept {
  Point p = cell_center(i, j, k);
  const int c[3] = {i, j, k};
  p[axis] = c[axis] * spacing(axis);
  return p;
}

FaceVectorField::FaceVectorField(const GridSpec& grid, double fill) : grid_(grid) {
  for (int a = 0; a < 3; ++a) {
    if (a < grid.dim()) comps_[a].assign(grid.face_count(a), fill);
  }
}

void FaceVectorField::zero_boundary_normals() {
  for (int a = 0; a < grid_.dim(); ++a) {
    const int na = grid_.cells(a);
    auto& comp = comps_[a];
    for_faces(grid_, a, [&](int i, int j, int k, std::size_t flat) {
      const int c[3] = {i, j, k};
      if (c[a] == 0 || c[a] == na) comp[flat] = 0.0;
    });
  }
}

double FaceVectorField::boundary_normal_max() const {
  double worst = 0.0;
  for (int a = 0; a < grid_.dim(); ++a) {
    const auto s = grid_.face_shape(a);
    const int na = grid_.cells(a);
    for (int i = 0; i < s[0]; ++i)
      for (int j = 0; j < s[1]; ++j)
        for (int k = 0; k < s[2]; ++k) {
          const int c[3] = {i, j, k};
          if (c[a] == 0 || c[a] == na)
            worst = std::max(worst, std::abs(comps_[a][grid_.face_index(a, i, j, k)]));
        }
  }
  return worst;
}

void require_finite(const ScalarField& f, const char* what) {
  const auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw NonFiniteError(std::string(what) + ": non-finite cell value", i);
  }
}

void require_finite(const FaceVectorField& F, const char* what) {
  for (int a = 0; a < F.grid().dim(); ++a) {
    const auto v = F.component(a);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i]))
        throw NonFiniteError(std::string(what) + ": non-finite face value on axis " +
                                 std::to_string(a),
                             i);
    }
  }
}

double integrate(const ScalarField& f) {
  require_finite(f, "integrate");
  return parallel::tree_sum(f.values()) * f.grid().cell_volume();
}

double mean(const ScalarField& f) { return integrate(f) / f.grid().volume(); }

FaceVectorField gradient(const ScalarField& f) {
  require_finite(f, "gradient");
  const GridSpec& g = f.grid();
  FaceVectorField out(g);
  const auto vals = f.values();
  for (int a = 0; a < g.dim(); ++a) {
    const int na = g.cells(a);
    const double inv_h = 1.0 / g.spacing(a);
    auto comp = out.component(a);
    for_faces(g, a, [&](int i, int j, int k, std::size_t flat) {
      int c[3] = {i, j, k};
      if (c[a] == 0 || c[a] == na) {
        comp[flat] = 0.0;
        return;
      }
      const double right = vals[g.cell_index(c[0], c[1], c[2])];
      c[a] -= 1;
      const double left = vals[g.cell_index(c[0], c[1], c[2])];
      comp[flat] = (right - left) * inv_h;
    });
  }
  return out;
}

ScalarField divergence(const FaceVectorField& F) {
  require_finite(F, "divergence");
  const GridSpec& g = F.grid();
  ScalarField out(g);
  const int dim = g.dim();
  double inv_h[3];
  for (int a = 0; a < dim; ++a) inv_h[a] = 1.0 / g.spacing(a);
  for_cells(g, [&](int i, int j, int k, std::size_t flat) {
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      int c[3] = {i, j, k};
      const auto comp = F.component(a);
      const double left = comp[g.face_index(a, c[0], c[1], c[2])];
      c[a] += 1;
      const double right = comp[g.face_index(a, c[0], c[1], c[2])];
      acc += (right - left) * inv_h[a];
    }
    out[flat] = acc;
  });
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  require_finite(f, "laplacian");
  const GridSpec& g = f.grid();
  ScalarField out(g);
  const int dim = g.dim();
  double inv_h[3];
  for (int a = 0; a < dim; ++a) inv_h[a] = 1.0 / g.spacing(a);
  const auto vals = f.values();
  for_cells(g, [&](int i, int j, int k, std::size_t flat) {
    const double centre = vals[flat];
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      int c[3] = {i, j, k};
      // Same arithmetic as divergence(gradient(f)) so the identity is exact.
      double right_grad = 0.0;
      double left_grad = 0.0;
      if (c[a] + 1 < g.cells(a)) {
        c[a] += 1;
        right_grad = (vals[g.cell_index(c[0], c[1], c[2])] - centre) * inv_h[a];
        c[a] -= 1;
      }
      if (c[a] > 0) {
        c[a] -= 1;
        left_grad = (centre - vals[g.cell_index(c[0], c[1], c[2])]) * inv_h[a];
      }
      acc += (right_grad - left_grad) * inv_h[a];
    }
    out[flat] = acc;
  });
  return out;
}

std::pair<double, double> reduce_extrema(const ScalarField& f) {
  const auto v = f.values();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return {lo, hi};
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs(const FaceVectorField& F) {
  double m = 0.0;
  for (int a = 0; a < F.grid().dim(); ++a)
    for (double x : F.component(a)) m = std::max(m, std::abs(x));
  return m;
}

FaceVectorField vector_laplacian(const FaceVectorField& u) {
  require_finite(u, "vector_laplacian");
  const GridSpec& g = u.grid();
  const int dim = g.dim();
  FaceVectorField out(g);
  for (int a = 0; a < dim; ++a) {
    const auto src = u.component(a);
    auto dst = out.component(a);
    const int na = g.cells(a);
    for_faces(g, a, [&](int i, int j, int k, std::size_t flat) {
      const int c[3] = {i, j, k};
      if (c[a] == 0 || c[a] == na) {
        dst[flat] = 0.0;
        return;
      }
      const double centre = src[flat];
      double acc = 0.0;
      for (int b = 0; b < dim; ++b) {
        const double inv_h2 = 1.0 / (g.spacing(b) * g.spacing(b));
        int lo[3] = {i, j, k};
        int hi[3] = {i, j, k};
        lo[b] -= 1;
        hi[b] += 1;
        double left;
        double right;
        if (b == a) {
          // Normal neighbours; wall faces hold u = 0.
          left = lo[b] == 0 ? 0.0 : src[g.face_index(a, lo[0], lo[1], lo[2])];
          right = hi[b] == na ? 0.0 : src[g.face_index(a, hi[0], hi[1], hi[2])];
        } else {
          // Tangential neighbours; the wall sits half a cell away, ghost = -u.
          left = lo[b] < 0 ? -centre : src[g.face_index(a, lo[0], lo[1], lo[2])];
          right = hi[b] >= g.cells(b) ? -centre : src[g.face_index(a, hi[0], hi[1], hi[2])];
        }
        acc += (left - 2.0 * centre + right) * inv_h2;
      }
      dst[flat] = acc;
    });
  }
  return out;
}

double face_inner(const FaceVectorField& F, const FaceVectorField& G) {
  double total = 0.0;
  for (int a = 0; a < F.grid().dim(); ++a) {
    const auto f = F.component(a);
    const auto gc = G.component(a);
    total += parallel::tree_dot(f, gc);
  }
  return total * F.grid().cell_volume();
}

}  // namespace chemostokes
