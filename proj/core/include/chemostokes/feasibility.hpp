#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chemostokes {

/// Critical diffusion exponent: l - 5/6 for 2 < l <= 31/12, 7l/5 - 28/15 above.
/// Throws std::invalid_argument for l <= 2 or non-finite l.
double m_star(double l);

/// Raised when an exponent formula is used outside its hypotheses.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(std::string id, const std::string& what)
      : std::invalid_argument(id + ": " + what), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// alpha = 3(m+p-1)/(3m+3p-4) * (1 - q/((p+2l-m-3)(q+1))).
/// Preconditions (by id): "gn_k_positive" p+2l-m-3 > 0, "gn_denominator_positive"
/// 3m+3p-4 > 0, "gn_exponent_order" (p+2l-m-3)(q+1) > q, which is exactly alpha > 0.
double gn_alpha(double m, double l, double p, double q);

struct Constraint {
  std::string id;
  bool satisfied = false;
  long double slack = 0;  // > 0 satisfied strictly, sign gives side; 0 means on the boundary
  bool strict = true;
};

/// Every inequality of the a-priori estimate chain, in long double.
std::vector<Constraint> constraints(double m, double l, double p, double q, double r);

/// Same test without building the list.
bool all_satisfied(double m, double l, double p, double q, double r);

struct Witness {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
};

struct WitnessResult {
  bool feasible = false;
  std::optional<Witness> witness;
  std::vector<std::string> binding;
  bool from_lattice = false;
};

/// Constructive choice: p at the middle of its interval, q in the middle of
/// the resulting q window, r in the middle of (max(1, (3q-3)/2), 3/2); a 64^3
/// lattice search runs if the midpoint fails. Every witness is re-checked
/// with constraints().
WitnessResult find_witness(double m, double l);

/// Bisection of find_witness feasibility over m in [1, 5]. Both ends are
/// probed first and monotonicity is checked on a probe grid; a violation
/// throws NonMonotoneError carrying the probe data.
double m_threshold(double l, double tol);

class NonMonotoneError : public std::runtime_error {
 public:
  NonMonotoneError(const std::string& what, std::vector<std::pair<double, bool>> probes)
      : std::runtime_error(what), probes_(std::move(probes)) {}
  const std::vector<std::pair<double, bool>>& probes() const noexcept { return probes_; }

 private:
  std::vector<std::pair<double, bool>> probes_;
};

struct FeasibilityRow {
  double l = 0.0;
  double m_star = 0.0;
  double m_threshold = 0.0;
  double abs_diff = 0.0;
  std::optional<Witness> witness;  // at m = m_threshold + 0.05
};

/// Rows for `points` values of l evenly spaced on [l_min, l_max] (a single
/// point uses l_min). Throws std::invalid_argument for l_min <= 2, l_max < l_min,
/// points < 1 or tol <= 0.
std::vector<FeasibilityRow> feasibility_table(double l_min, double l_max, int points, double tol);

/// l,m_star_closed_form,m_threshold_bisection,abs_diff,witness_p,witness_q,witness_r
std::string feasibility_csv(const std::vector<FeasibilityRow>& rows);

}  // namespace chemostokes
