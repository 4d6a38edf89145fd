#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace chemostokes {

using Point = std::array<double, 3>;

/// Uniform Cartesian box [0,L_0] x [0,L_1] (x [0,L_2]) split into N_i cells per axis.
/// In 2D the third axis is a dummy with one cell of unit length.
class GridSpec {
 public:
  GridSpec(int dim, std::array<int, 3> cells, std::array<double, 3> lengths);

  int dim() const noexcept { return dim_; }
  int cells(int axis) const noexcept { return cells_[axis]; }
  double length(int axis) const noexcept { return lengths_[axis]; }
  double spacing(int axis) const noexcept { return lengths_[axis] / cells_[axis]; }
  const std::array<int, 3>& cell_shape() const noexcept { return cells_; }
  const std::array<double, 3>& lengths() const noexcept { return lengths_; }

  std::size_t cell_count() const noexcept;
  double cell_volume() const noexcept;
  double volume() const noexcept;
  double min_length() const noexcept;
  double min_spacing() const noexcept;

  std::array<int, 3> face_shape(int axis) const noexcept {
    auto s = cells_;
    s[axis] += 1;
    return s;
  }
  std::size_t face_count(int axis) const noexcept;

  std::size_t cell_index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * cells_[1] + j) * cells_[2] + k;
  }
  std::array<int, 3> cell_coords(std::size_t idx) const noexcept;

  /// Faces normal to `axis`; coordinate along `axis` runs 0..N_axis.
  std::size_t face_index(int axis, int i, int j, int k) const noexcept {
    const auto s = face_shape(axis);
    return (static_cast<std::size_t>(i) * s[1] + j) * s[2] + k;
  }

  Point cell_center(int i, int j, int k) const noexcept;
  Point face_center(int axis, int i, int j, int k) const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int dim_;
  std::array<int, 3> cells_;
  std::array<double, 3> lengths_;
};

/// One value per cell center, C-order (last axis fastest).
class ScalarField {
 public:
  explicit ScalarField(const GridSpec& grid, double fill = 0.0)
      : grid_(grid), values_(grid.cell_count(), fill) {}

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& at(int i, int j, int k = 0) noexcept { return values_[grid_.cell_index(i, j, k)]; }
  double at(int i, int j, int k = 0) const noexcept { return values_[grid_.cell_index(i, j, k)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Face-normal components on the staggered grid: component a lives on faces
/// normal to axis a and has (N_a+1) * prod_{b != a} N_b entries.
class FaceVectorField {
 public:
  explicit FaceVectorField(const GridSpec& grid, double fill = 0.0);

  const GridSpec& grid() const noexcept { return grid_; }

  std::span<double> component(int axis) noexcept { return comps_[axis]; }
  std::span<const double> component(int axis) const noexcept { return comps_[axis]; }

  double& at(int axis, int i, int j, int k = 0) noexcept {
    return comps_[axis][grid_.face_index(axis, i, j, k)];
  }
  double at(int axis, int i, int j, int k = 0) const noexcept {
    return comps_[axis][grid_.face_index(axis, i, j, k)];
  }

  /// Sets every boundary-face normal component to zero.
  void zero_boundary_normals();
  /// Largest |value| over boundary-normal entries.
  double boundary_normal_max() const;

  friend bool operator==(const FaceVectorField&, const FaceVectorField&) = default;

 private:
  GridSpec grid_;
  std::array<std::vector<double>, 3> comps_;
};

// ---------------------------------------------------------------------------
// Discrete calculus. Every operator throws NonFiniteError on NaN/Inf input.

/// Cell-volume weighted sum, via the deterministic tree reduction.
double integrate(const ScalarField& f);

/// Face differences (f_right - f_left)/h; boundary faces carry 0 (mirror ghost).
FaceVectorField gradient(const ScalarField& f);

/// Cell value sum_a (F_a,right - F_a,left)/h_a.
ScalarField divergence(const FaceVectorField& F);

/// divergence(gradient(f)) fused: the 2*dim+1 point Neumann Laplacian.
ScalarField laplacian(const ScalarField& f);

/// Exact min/max.
std::pair<double, double> reduce_extrema(const ScalarField& f);

double max_abs(const ScalarField& f);
double max_abs(const FaceVectorField& F);

/// Componentwise MAC Laplacian for a velocity with u = 0 on the walls:
/// boundary-normal entries are ignored (taken as 0) and tangential ghosts are
/// mirrored with a sign flip. Result has zero boundary-normal entries.
FaceVectorField vector_laplacian(const FaceVectorField& u);

/// sum over faces of F.G times cell volume (discrete L2 pairing on faces).
double face_inner(const FaceVectorField& F, const FaceVectorField& G);

/// Mean value over the box.
double mean(const ScalarField& f);

void require_finite(const ScalarField& f, const char* what);
void require_finite(const FaceVectorField& F, const char* what);

}  // namespace chemostokes
