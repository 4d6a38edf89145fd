#pragma once

#include "chemostokes/config.hpp"
#include "chemostokes/solver.hpp"

namespace chemostokes {

/// State at t = 0 built from the [initial] section. Gaussian n is scaled so
/// that integrate(n) equals n_mass; noise draws from mt19937_64(seed).
SolverState make_initial_state(const RunConfig& cfg);

}  // namespace chemostokes
