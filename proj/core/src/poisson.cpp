#include "chemostokes/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "chemostokes/parallel.hpp"

namespace chemostokes {
namespace {

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return parallel::tree_dot(a, b);
}

void remove_mean(std::span<double> v) {
  const double m = parallel::tree_sum(v) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

}  // namespace

// DCT-II diagonalizes the mirrored-ghost Laplacian; DCT-III inverts it up to
// a factor prod(2 N_a).
struct NeumannPoisson::Spectral {
  double* in = nullptr;
  double* out = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> inv_eig;

  explicit Spectral(const GridSpec& g) {
    const std::size_t n = g.cell_count();
    in = fftw_alloc_real(n);
    out = fftw_alloc_real(n);
    int dims[3];
    fftw_r2r_kind fwd[3];
    fftw_r2r_kind bwd[3];
    for (int a = 0; a < g.dim(); ++a) {
      dims[a] = g.cells(a);
      fwd[a] = FFTW_REDFT10;
      bwd[a] = FFTW_REDFT01;
    }
    {
      std::lock_guard lk(planner_mutex());
      forward = fftw_plan_r2r(g.dim(), dims, in, out, fwd, FFTW_ESTIMATE);
      backward = fftw_plan_r2r(g.dim(), dims, out, in, bwd, FFTW_ESTIMATE);
    }
    double norm = 1.0;
    for (int a = 0; a < g.dim(); ++a) norm *= 2.0 * g.cells(a);
    inv_eig.resize(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
      const auto c = g.cell_coords(idx);
      double lam = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        const double h = g.spacing(a);
        lam += (2.0 - 2.0 * std::cos(std::numbers::pi * c[a] / g.cells(a))) / (h * h);
      }
      inv_eig[idx] = idx == 0 ? 0.0 : 1.0 / (lam * norm);
    }
  }

  ~Spectral() {
    std::lock_guard lk(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(in);
    fftw_free(out);
  }

  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;
};

NeumannPoisson::NeumannPoisson(const GridSpec& grid, Preconditioner pc) : grid_(grid), pc_(pc) {
  if (pc_ == Preconditioner::Spectral) spectral_ = std::make_unique<Spectral>(grid_);
}

NeumannPoisson::~NeumannPoisson() = default;
NeumannPoisson::NeumannPoisson(NeumannPoisson&&) noexcept = default;
NeumannPoisson& NeumannPoisson::operator=(NeumannPoisson&&) noexcept = default;

void NeumannPoisson::apply_preconditioner(std::span<const double> r, std::span<double> z) {
  if (pc_ == Preconditioner::None) {
    std::copy(r.begin(), r.end(), z.begin());
    remove_mean(z);
    return;
  }
  auto& s = *spectral_;
  std::copy(r.begin(), r.end(), s.in);
  fftw_execute(s.forward);
  for (std::size_t i = 0; i < z.size(); ++i) s.out[i] *= s.inv_eig[i];
  fftw_execute(s.backward);
  std::copy(s.in, s.in + z.size(), z.begin());
}

NeumannPoisson::Result NeumannPoisson::solve(const ScalarField& b, ScalarField& x, double rel_tol,
                                             int max_iters) {
  // CG on A = -laplacian, which is SPD on mean-zero data.
  const std::size_t n = grid_.cell_count();
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -b[i];
  remove_mean(rhs);
  remove_mean(x.values());

  Result res;
  const double norm_b = std::sqrt(dot(rhs, rhs));
  if (norm_b == 0.0) {
    std::fill(x.values().begin(), x.values().end(), 0.0);
    res.converged = true;
    return res;
  }

  std::vector<double> r(n);
  {
    const ScalarField lx = laplacian(x);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] + lx[i];
  }
  std::vector<double> z(n);
  apply_preconditioner(r, z);
  ScalarField p(grid_);
  std::copy(z.begin(), z.end(), p.values().begin());
  double rz = dot(r, z);

  res.relative_residual = std::sqrt(dot(r, r)) / norm_b;
  while (res.relative_residual > rel_tol && res.iterations < max_iters) {
    const ScalarField lp = laplacian(p);
    const auto pv = p.values();
    const double pap = -parallel::tree_dot(pv, lp.values());
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    auto xv = x.values();
    for (std::size_t i = 0; i < n; ++i) {
      xv[i] += alpha * pv[i];
      r[i] += alpha * lp[i];
    }
    apply_preconditioner(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    auto pw = p.values();
    for (std::size_t i = 0; i < n; ++i) pw[i] = z[i] + beta * pw[i];
    ++res.iterations;
    res.relative_residual = std::sqrt(dot(r, r)) / norm_b;
  }
  remove_mean(x.values());
  res.converged = res.relative_residual <= rel_tol;
  return res;
}

}  // namespace chemostokes
