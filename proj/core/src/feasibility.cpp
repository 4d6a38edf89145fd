#include "chemostokes/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chemostokes/config.hpp"

namespace chemostokes {

using ld = long double;

double m_star(double l) {
  if (!std::isfinite(l) || !(l > 2.0)) throw std::invalid_argument("m_star needs l > 2");
  const ld L = l;
  if (L <= 31.0L / 12.0L) return static_cast<double>(L - 5.0L / 6.0L);
  return static_cast<double>(7.0L * L / 5.0L - 28.0L / 15.0L);
}

double gn_alpha(double m, double l, double p, double q) {
  const ld M = m, L = l, P = p, Q = q;
  const ld K = P + 2 * L - M - 3;
  const ld den = 3 * M + 3 * P - 4;
  if (!(K > 0)) throw PreconditionError("gn_k_positive", "p + 2l - m - 3 must be > 0");
  if (!(den > 0)) throw PreconditionError("gn_denominator_positive", "3m + 3p - 4 must be > 0");
  if (!(K * (Q + 1) > Q))
    throw PreconditionError("gn_exponent_order", "(p + 2l - m - 3)(q + 1) must exceed q");
  return static_cast<double>(3 * (M + P - 1) / den * (1 - Q / (K * (Q + 1))));
}

namespace {

// Evaluates every constraint; `sink` sees (id, slack, strict) and may stop early.
template <class Sink>
void evaluate(ld m, ld l, ld p, ld q, ld r, Sink&& sink) {
  if (!sink("m_ge_l_minus_1", m - (l - 1), false)) return;
  if (!sink("p_gt_1", p - 1, true)) return;
  if (!sink("p_gt_l_minus_1", p - (l - 1), true)) return;
  if (!sink("p_gt_m_minus_2l_plus_3", p - (m - 2 * l + 3), true)) return;
  if (!sink("q_gt_1", q - 1, true)) return;
  if (!sink("r_ge_1", r - 1, false)) return;
  if (r <= 1.5L) {
    if (!sink("q_r_coupling", (3 + 2 * r) / 3 - q, true)) return;
  } else {
    const ld a = (r - 1) - (4 - 2 * r) * q;
    const ld b = q - (r - 1);
    if (!sink("q_r_coupling", std::min(a, b), false)) return;
  }
  if (!sink("p_lower_q_coupling", p - (3 * q - 3 * m + 4) / 3, true)) return;
  if (!sink("p_upper_q_coupling", (2 * m - 2 * l + 8.0L / 3) * q + m - 2 * l + 3 - p, true)) return;
  const ld K = p + 2 * l - m - 3;
  const ld base = (m + p - 1) * q;
  const ld gn = base > 0 ? 6 - 2 * K * (q + 1) / base : -1;
  if (!sink("gn_embedding", gn, true)) return;
  if (!sink("stokes_energy_p_lower", p - (7 - 3 * m) / 3, true)) return;
  if (!sink("p_below_mass_bootstrap_cap", 5 * m - 6 * l + 25.0L / 3 - p, true)) return;
  sink("r_below_mass_regularity", 1.5L - r, true);
}

bool ok(ld slack, bool strict) { return strict ? slack > 0 : slack >= 0; }

bool finite_inputs(double m, double l, double p, double q, double r) {
  return std::isfinite(m) && std::isfinite(l) && std::isfinite(p) && std::isfinite(q) &&
         std::isfinite(r);
}

}  // namespace

std::vector<Constraint> constraints(double m, double l, double p, double q, double r) {
  if (!finite_inputs(m, l, p, q, r)) throw std::invalid_argument("constraints needs finite inputs");
  std::vector<Constraint> out;
  evaluate(m, l, p, q, r, [&](const char* id, ld slack, bool strict) {
    out.push_back(Constraint{id, ok(slack, strict), slack, strict});
    return true;
  });
  return out;
}

bool all_satisfied(double m, double l, double p, double q, double r) {
  if (!finite_inputs(m, l, p, q, r)) return false;
  bool good = true;
  evaluate(m, l, p, q, r, [&](const char*, ld slack, bool strict) {
    good = ok(slack, strict);
    return good;
  });
  return good;
}

namespace {

bool validated(double m, double l, const Witness& w) {
  for (const auto& c : constraints(m, l, w.p, w.q, w.r))
    if (!c.satisfied || (c.strict && !(c.slack > 0))) return false;
  return true;
}

std::optional<Witness> lattice_search(double m, double l, ld p_lo, ld p_hi) {
  constexpr int N = 64;
  for (int i = 1; i < N; ++i) {
    const double p = static_cast<double>(p_lo + (p_hi - p_lo) * i / N);
    for (int j = 1; j < N; ++j) {
      const double q = static_cast<double>(1.0L + 1.0L * j / N);
      for (int k = 0; k < N; ++k) {
        const double r = static_cast<double>(1.0L + 0.5L * k / N);
        if (all_satisfied(m, l, p, q, r)) return Witness{p, q, r};
      }
    }
  }
  return std::nullopt;
}

}  // namespace

WitnessResult find_witness(double m, double l) {
  if (!std::isfinite(l) || !(l > 2.0)) throw std::invalid_argument("find_witness needs l > 2");
  if (!std::isfinite(m)) throw std::invalid_argument("find_witness needs finite m");
  WitnessResult res;
  const ld M = m, L = l;

  struct Bound {
    const char* id;
    ld value;
  };
  const Bound lowers[] = {{"p_gt_l_minus_1", L - 1},
                          {"p_gt_m_minus_2l_plus_3", M - 2 * L + 3},
                          {"stokes_energy_p_lower", 7.0L / 3 - M},
                          {"p_gt_1", 1}};
  const Bound* low = &lowers[0];
  for (const Bound& b : lowers)
    if (b.value > low->value) low = &b;
  const ld p_hi = 5 * M - 6 * L + 25.0L / 3;
  if (!(p_hi > low->value)) {
    res.binding = {"p_interval_empty", low->id, "p_below_mass_bootstrap_cap"};
    if (!(M >= L - 1)) res.binding.push_back("m_ge_l_minus_1");
    return res;
  }
  if (!(M >= L - 1)) {
    res.binding = {"m_ge_l_minus_1"};
    return res;
  }
  const ld p = (low->value + p_hi) / 2;
  const ld q_lo = std::max<ld>(1, 3 * (p + 2 * L - M - 3) / (6 * M - 6 * L + 8));
  const ld q_hi = std::min<ld>(2, (3 * p + 3 * M - 4) / 3);
  if (q_hi > q_lo) {
    const ld q = (q_lo + q_hi) / 2;
    const ld r = (std::max<ld>(1, (3 * q - 3) / 2) + 1.5L) / 2;
    const Witness w{static_cast<double>(p), static_cast<double>(q), static_cast<double>(r)};
    if (validated(m, l, w)) {
      res.feasible = true;
      res.witness = w;
      return res;
    }
  }
  if (auto w = lattice_search(m, l, low->value, p_hi); w && validated(m, l, *w)) {
    res.feasible = true;
    res.witness = w;
    res.from_lattice = true;
    return res;
  }
  res.binding = {q_hi > q_lo ? "midpoint_and_lattice_failed" : "q_interval_empty"};
  if (!(q_hi > q_lo)) res.binding.push_back("gn_embedding");
  return res;
}

double m_threshold(double l, double tol) {
  if (!std::isfinite(l) || !(l > 2.0)) throw std::invalid_argument("m_threshold needs l > 2");
  if (!(tol > 0.0)) throw std::invalid_argument("m_threshold needs tol > 0");
  double lo = 1.0;
  double hi = 5.0;
  std::vector<std::pair<double, bool>> probes;
  auto feasible = [&](double m) {
    const bool f = find_witness(m, l).feasible;
    probes.emplace_back(m, f);
    return f;
  };
  const bool f_lo = feasible(lo);
  const bool f_hi = feasible(hi);
  if (f_lo || !f_hi)
    throw NonMonotoneError("feasibility does not switch from infeasible to feasible on [1, 5]",
                           probes);
  constexpr int kProbes = 41;
  bool seen_feasible = false;
  for (int i = 1; i + 1 < kProbes; ++i) {
    const double m = lo + (hi - lo) * i / (kProbes - 1);
    const bool f = feasible(m);
    if (seen_feasible && !f)
      throw NonMonotoneError("feasibility is not monotone in m on the probe grid", probes);
    seen_feasible = seen_feasible || f;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (find_witness(mid, l).feasible) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<FeasibilityRow> feasibility_table(double l_min, double l_max, int points, double tol) {
  if (!std::isfinite(l_min) || !(l_min > 2.0)) throw std::invalid_argument("l_min must be > 2");
  if (!std::isfinite(l_max) || l_max < l_min) throw std::invalid_argument("l_max must be >= l_min");
  if (points < 1) throw std::invalid_argument("points must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  std::vector<FeasibilityRow> rows;
  for (int i = 0; i < points; ++i) {
    const double l = points == 1 ? l_min : l_min + (l_max - l_min) * i / (points - 1);
    FeasibilityRow row;
    row.l = l;
    row.m_star = m_star(l);
    row.m_threshold = m_threshold(l, tol);
    row.abs_diff = std::abs(row.m_threshold - row.m_star);
    row.witness = find_witness(row.m_threshold + 0.05, l).witness;
    rows.push_back(row);
  }
  return rows;
}

std::string feasibility_csv(const std::vector<FeasibilityRow>& rows) {
  std::string out =
      "l,m_star_closed_form,m_threshold_bisection,abs_diff,witness_p,witness_q,witness_r\n";
  for (const auto& r : rows) {
    out += format_double(r.l) + "," + format_double(r.m_star) + "," + format_double(r.m_threshold) +
           "," + format_double(r.abs_diff);
    if (r.witness)
      out += "," + format_double(r.witness->p) + "," + format_double(r.witness->q) + "," +
             format_double(r.witness->r);
    else
      out += ",,,";
    out += "\n";
  }
  return out;
}

}  // namespace chemostokes
