#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chemostokes/poisson.hpp"

using namespace chemostokes;
using PC = NeumannPoisson::Preconditioner;

namespace {

ScalarField random_rhs(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  ScalarField b(g);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = d(rng);
  const double m = mean(b);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] -= m;
  return b;
}

double residual_ratio(const ScalarField& b, const ScalarField& x) {
  const ScalarField lx = laplacian(x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    num += (lx[i] - b[i]) * (lx[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

class PoissonBoth : public ::testing::TestWithParam<PC> {};

TEST_P(PoissonBoth, Solves2D) {
  GridSpec g(2, {24, 20, 1}, {1.0, 1.5, 1.0});
  const ScalarField b = random_rhs(g, 1);
  NeumannPoisson solver(g, GetParam());
  ScalarField x(g);
  const auto r = solver.solve(b, x, 1e-10, 2000);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.relative_residual, 1e-10);
  EXPECT_LE(residual_ratio(b, x), 1e-9);
  EXPECT_NEAR(mean(x), 0.0, 1e-13);
}

TEST_P(PoissonBoth, Solves3D) {
  GridSpec g(3, {8, 6, 10}, {1.0, 0.75, 1.25});
  const ScalarField b = random_rhs(g, 2);
  NeumannPoisson solver(g, GetParam());
  ScalarField x(g);
  const auto r = solver.solve(b, x, 1e-10, 2000);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(residual_ratio(b, x), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Preconditioners, PoissonBoth, ::testing::Values(PC::None, PC::Spectral));

TEST(Poisson, SpectralNeedsFewIterations) {
  GridSpec g(2, {48, 48, 1}, {4.0, 4.0, 1.0});
  NeumannPoisson solver(g, PC::Spectral);
  ScalarField x(g);
  const auto r = solver.solve(random_rhs(g, 3), x, 1e-10, 50);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 3);
}

TEST(Poisson, ZeroRhsGivesZero) {
  GridSpec g(2, {8, 8, 1}, {1, 1, 1});
  NeumannPoisson solver(g);
  ScalarField x(g, 0.3);
  const auto r = solver.solve(ScalarField(g), x, 1e-10, 10);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(max_abs(x), 0.0);
}

TEST(Poisson, RhsMeanIsProjectedOut) {
  GridSpec g(2, {16, 16, 1}, {1, 1, 1});
  ScalarField b = random_rhs(g, 4);
  ScalarField b_shift = b;
  for (std::size_t i = 0; i < b.size(); ++i) b_shift[i] += 2.5;
  NeumannPoisson solver(g);
  ScalarField x1(g), x2(g);
  solver.solve(b, x1, 1e-12, 100);
  solver.solve(b_shift, x2, 1e-12, 100);
  for (std::size_t i = 0; i < b.size(); ++i) ASSERT_NEAR(x1[i], x2[i], 1e-10);
}

TEST(Poisson, ReportsNonConvergence) {
  GridSpec g(2, {64, 64, 1}, {1, 1, 1});
  NeumannPoisson solver(g, PC::None);
  ScalarField x(g);
  const auto r = solver.solve(random_rhs(g, 5), x, 1e-12, 3);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_GT(r.relative_residual, 1e-12);
}

TEST(Poisson, WarmStartFromSolutionIsImmediate) {
  GridSpec g(2, {16, 16, 1}, {1, 1, 1});
  const ScalarField b = random_rhs(g, 6);
  NeumannPoisson solver(g);
  ScalarField x(g);
  solver.solve(b, x, 1e-12, 100);
  const auto r = solver.solve(b, x, 1e-10, 100);
  EXPECT_EQ(r.iterations, 0);
}

TEST(Poisson, ExactCosineMode) {
  // cos(pi x / L) sampled at centres is an eigenvector of the discrete Neumann Laplacian.
  const int N = 32;
  GridSpec g(2, {N, 4, 1}, {2.0, 0.25, 1.0});
  const double h = g.spacing(0);
  const double lam = -(2.0 - 2.0 * std::cos(M_PI / N)) / (h * h);
  ScalarField v(g), b(g);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < 4; ++j) {
      v.at(i, j) = std::cos(M_PI * g.cell_center(i, j, 0)[0] / 2.0);
      b.at(i, j) = lam * v.at(i, j);
    }
  NeumannPoisson solver(g);
  ScalarField x(g);
  solver.solve(b, x, 1e-13, 50);
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(x[i], v[i], 1e-12);
}
