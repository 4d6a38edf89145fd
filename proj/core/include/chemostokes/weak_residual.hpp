#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chemostokes/model.hpp"
#include "chemostokes/run.hpp"

namespace chemostokes {

/// phi(x, t) = time(t) * space(x). time must vanish for t >= time_support_end,
/// and space should vanish near the walls (the velocity test field is the
/// discrete curl of space sampled at grid nodes, so it is exactly discretely
/// divergence-free).
struct TestFunction {
  std::string name;
  std::function<double(double)> time;
  std::function<double(double)> time_rate;
  double time_support_end = 0.0;
  std::function<double(const Point&)> space;
};

/// exp(1 - 1/(1 - (t/t1)^2)) on [0, t1), 0 afterwards, with its derivative.
TestFunction make_test_function(std::string name, double t1, Point center, double radius);

/// Three fixed test functions placed relative to the box, all supported in
/// time on [0, 0.75 * horizon].
std::vector<TestFunction> default_battery(const GridSpec& grid, double horizon);

struct WeakResidualRow {
  std::string name;
  double cell = 0.0;       // density identity
  double oxygen = 0.0;     // concentration identity
  double velocity = 0.0;   // velocity identity (pressure-free)
};

struct WeakResidualReport {
  std::vector<WeakResidualRow> rows;
};

/// LHS - RHS of the three weak identities, midpoint rule in time over the
/// trajectory frames (midpoint fields are the mean of the two bracketing
/// frames) and the solver's discrete operators in space. Throws
/// std::invalid_argument if a test function is not supported inside the
/// trajectory's time span or the trajectory has fewer than two frames.
WeakResidualReport weak_residual(const Trajectory& traj, const ModelParams& p,
                                 const std::vector<TestFunction>& tests);

/// name,density,concentration,velocity
std::string residual_csv(const WeakResidualReport& r);

}  // namespace chemostokes
