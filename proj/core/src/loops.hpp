#pragma once

#include <algorithm>
#include <cstddef>

#include "chemostokes/grid.hpp"
#include "chemostokes/parallel.hpp"

namespace chemostokes::detail {

// Runs fn(i, j, k, flat) over every cell; rows of fixed (i, j) are the unit of work.
template <class Fn>
void for_cells(const GridSpec& g, Fn&& fn) {
  const int n1 = g.cells(1);
  const int n2 = g.cells(2);
  const std::size_t rows = static_cast<std::size_t>(g.cells(0)) * n1;
  const std::size_t row_grain = std::max<std::size_t>(1, parallel::grain() / n2);
  parallel::for_range(0, rows, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      const int i = static_cast<int>(r / n1);
      const int j = static_cast<int>(r % n1);
      std::size_t flat = r * n2;
      for (int k = 0; k < n2; ++k, ++flat) fn(i, j, k, flat);
    }
  }, row_grain);
}

// Same over the faces normal to `axis`.
template <class Fn>
void for_faces(const GridSpec& g, int axis, Fn&& fn) {
  const auto s = g.face_shape(axis);
  const std::size_t rows = static_cast<std::size_t>(s[0]) * s[1];
  const std::size_t row_grain = std::max<std::size_t>(1, parallel::grain() / s[2]);
  parallel::for_range(0, rows, [&](std::size_t r0, std::size_t r1) {
    for (std::size_t r = r0; r < r1; ++r) {
      const int i = static_cast<int>(r / s[1]);
      const int j = static_cast<int>(r % s[1]);
      std::size_t flat = r * s[2];
      for (int k = 0; k < s[2]; ++k, ++flat) fn(i, j, k, flat);
    }
  }, row_grain);
}

}  // namespace chemostokes::detail
