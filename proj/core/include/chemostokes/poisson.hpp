#pragma once

#include <memory>

#include "chemostokes/grid.hpp"

namespace chemostokes {

/// Conjugate-gradient solver for the cell-centred Neumann Poisson problem
/// laplacian(x) = b in the mean-zero class (the Laplacian is the same stencil
/// as chemostokes::laplacian). The right-hand side is projected onto mean-zero
/// data before solving.
///
/// With Preconditioner::Spectral each CG step applies the exact inverse of the
/// discrete operator through a cosine transform, so the iteration normally
/// finishes in one or two steps; Preconditioner::None is plain CG.
class NeumannPoisson {
 public:
  enum class Preconditioner { None, Spectral };

  struct Result {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
  };

  explicit NeumannPoisson(const GridSpec& grid, Preconditioner pc = Preconditioner::Spectral);
  ~NeumannPoisson();
  NeumannPoisson(NeumannPoisson&&) noexcept;
  NeumannPoisson& operator=(NeumannPoisson&&) noexcept;

  const GridSpec& grid() const noexcept { return grid_; }

  /// On entry x is the initial guess; on exit the mean-zero solution.
  Result solve(const ScalarField& b, ScalarField& x, double rel_tol, int max_iters);

 private:
  struct Spectral;
  void apply_preconditioner(std::span<const double> r, std::span<double> z);

  GridSpec grid_;
  Preconditioner pc_;
  std::unique_ptr<Spectral> spectral_;
};

}  // namespace chemostokes
