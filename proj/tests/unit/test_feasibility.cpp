#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "chemostokes/feasibility.hpp"

using namespace chemostokes;

namespace {

const Constraint& find(const std::vector<Constraint>& cs, const std::string& id) {
  for (const auto& c : cs)
    if (c.id == id) return c;
  throw std::out_of_range(id);
}

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST(MStar, ClosedFormValues) {
  EXPECT_NEAR(m_star(2.5), 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(m_star(31.0 / 12.0), 7.0 / 4.0, 1e-15);
  EXPECT_NEAR(m_star(3.0), 7.0 / 3.0, 1e-15);
}

TEST(MStar, ContinuousAtBranchPoint) {
  const double lb = 31.0 / 12.0;
  EXPECT_NEAR(m_star(lb - 1e-9), lb - 5.0 / 6.0, 2e-9);
  EXPECT_NEAR(m_star(lb + 1e-9), 7.0 * lb / 5.0 - 28.0 / 15.0, 2e-9);
  EXPECT_NEAR(m_star(std::nextafter(lb, 3.0)), 1.75, 1e-12);
}

TEST(MStar, PiecewiseAffine) {
  EXPECT_NEAR(m_star(2.3) - m_star(2.2), 0.1, 1e-14);
  EXPECT_NEAR(m_star(3.5) - m_star(3.0), 0.7, 1e-14);
}

TEST(MStar, RejectsSmallL) {
  EXPECT_THROW(m_star(2.0), std::invalid_argument);
  EXPECT_THROW(m_star(1.0), std::invalid_argument);
  EXPECT_THROW(m_star(std::nan("")), std::invalid_argument);
}

TEST(GnAlpha, SpotValues) {
  EXPECT_EQ(gn_alpha(2, 2.5, 2, 2), 0.75);
  EXPECT_EQ(gn_alpha(2, 2.5, 3, 2), 28.0 / 33.0);
}

TEST(GnAlpha, NamedPreconditions) {
  try {
    gn_alpha(4, 2.5, 1.0, 2);  // p + 2l - m - 3 = -1
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.id(), "gn_k_positive");
  }
  try {
    gn_alpha(1.0, 3.0, 0.2, 2);  // 3m + 3p - 4 < 0, k = 2.2
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.id(), "gn_denominator_positive");
  }
  try {
    gn_alpha(4, 2.5, 2.01, 2);  // k = 0.01, k(q+1) < q
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.id(), "gn_exponent_order");
  }
}

TEST(GnAlpha, InUnitIntervalOnAdmissibleTuples) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int checked = 0;
  while (checked < 10000) {
    const double l = 2.0 + 2.0 * u01(rng);
    const double m = l - 1.0 + 3.0 * u01(rng);
    const double q = 1.0 + 3.0 * u01(rng);
    const double p_lo = std::max({1.0, m - 2 * l + 3, l - 1});
    const double p_hi = (2 * m - 2 * l + 8.0 / 3) * q + m - 2 * l + 3;
    if (!(p_hi > p_lo)) continue;
    const double p = p_lo + (p_hi - p_lo) * u01(rng);
    double a;
    try {
      a = gn_alpha(m, l, p, q);
    } catch (const PreconditionError&) {
      continue;
    }
    ASSERT_GT(a, 0.0) << m << " " << l << " " << p << " " << q;
    ASSERT_LT(a, 1.0) << m << " " << l << " " << p << " " << q;
    ++checked;
  }
}

TEST(Constraints, HandCheckedPoint) {
  const auto cs = constraints(2, 2.5, 19.0 / 12.0, 1.5, 1.4);
  for (const auto& c : cs) EXPECT_TRUE(c.satisfied) << c.id << " slack " << static_cast<double>(c.slack);
  EXPECT_TRUE(all_satisfied(2, 2.5, 19.0 / 12.0, 1.5, 1.4));
  // Slacks from the printed inequalities.
  EXPECT_NEAR(static_cast<double>(find(cs, "p_upper_q_coupling").slack), (8.0 / 3 - 1) * 1.5 + 0 - 19.0 / 12, 1e-15);
  EXPECT_NEAR(static_cast<double>(find(cs, "p_lower_q_coupling").slack), 19.0 / 12 - 2.5 / 3, 1e-15);
  EXPECT_NEAR(static_cast<double>(find(cs, "q_r_coupling").slack), (3 + 2.8) / 3 - 1.5, 1e-15);
}

TEST(Constraints, QAtOneViolates) {
  const auto cs = constraints(2, 2.5, 19.0 / 12.0, 1.0, 1.4);
  const auto& c = find(cs, "q_gt_1");
  EXPECT_FALSE(c.satisfied);
  EXPECT_EQ(c.slack, 0);
  EXPECT_FALSE(all_satisfied(2, 2.5, 19.0 / 12.0, 1.0, 1.4));
}

TEST(Constraints, LargeRBranch) {
  // r > 3/2: (4 - 2r) q <= r - 1.
  const auto ok = constraints(3, 2.5, 2.5, 1.2, 1.9);
  EXPECT_TRUE(find(ok, "q_r_coupling").satisfied);
  const auto bad = constraints(3, 2.5, 2.5, 1.9, 1.6);
  EXPECT_FALSE(find(bad, "q_r_coupling").satisfied);
}

TEST(Constraints, UpperPBoundImpossibleForSmallM) {
  for (double p : {1.6, 2.0, 5.0, 50.0}) {
    const auto cs = constraints(1.2, 2.5, p, 1.5, 1.2);
    const auto& cap = find(cs, "p_below_mass_bootstrap_cap");
    EXPECT_FALSE(cap.satisfied);
    EXPECT_NEAR(static_cast<double>(cap.slack), -2.0 / 3.0 - p, 1e-12);
  }
}

TEST(Constraints, RejectsNonFinite) {
  EXPECT_THROW(constraints(2, 2.5, std::nan(""), 1.5, 1.4), std::invalid_argument);
}

TEST(FindWitness, FeasibleExample) {
  const auto w = find_witness(2, 2.5);
  ASSERT_TRUE(w.feasible);
  ASSERT_TRUE(w.witness.has_value());
  for (const auto& c : constraints(2, 2.5, w.witness->p, w.witness->q, w.witness->r)) {
    EXPECT_TRUE(c.satisfied) << c.id;
    if (c.strict) EXPECT_GT(c.slack, 0) << c.id;
  }
  EXPECT_FALSE(w.from_lattice);
  // Same family as (19/12, 3/2, 7/5).
  EXPECT_GT(w.witness->p, 1.5);
  EXPECT_GT(w.witness->q, 1.0);
  EXPECT_LT(w.witness->q, 2.0);
  EXPECT_LT(w.witness->r, 1.5);
}

TEST(FindWitness, InfeasibleNamesEmptyPInterval) {
  const auto w = find_witness(1.2, 2.5);
  EXPECT_FALSE(w.feasible);
  EXPECT_FALSE(w.witness.has_value());
  ASSERT_FALSE(w.binding.empty());
  EXPECT_EQ(w.binding.front(), "p_interval_empty");
  EXPECT_TRUE(has(w.binding, "p_below_mass_bootstrap_cap"));
}

TEST(FindWitness, JustAboveThreshold) {
  for (double l : {2.1, 2.5, 3.0}) {
    const auto w = find_witness(m_star(l) + 0.05, l);
    EXPECT_TRUE(w.feasible) << "l = " << l;
  }
}

TEST(FindWitness, BelowThresholdInfeasible) {
  for (double l : {2.1, 2.5, 3.0, 3.7}) EXPECT_FALSE(find_witness(m_star(l) - 0.01, l).feasible) << l;
}

TEST(MThreshold, RecoversClosedForm) {
  EXPECT_NEAR(m_threshold(2.5, 1e-3), 5.0 / 3.0, 1e-3);
  EXPECT_NEAR(m_threshold(3.0, 1e-3), 7.0 / 3.0, 1e-3);
  EXPECT_NEAR(m_threshold(31.0 / 12.0, 1e-3), 7.0 / 4.0, 1e-3);
}

TEST(MThreshold, FiftyPointGrid) {
  for (int i = 1; i <= 50; ++i) {
    const double l = 2.0 + 2.0 * i / 50;
    EXPECT_LE(std::abs(m_threshold(l, 1e-3) - m_star(l)), 2e-3) << "l = " << l;
  }
}

TEST(MThreshold, RejectsBadInput) {
  EXPECT_THROW(m_threshold(2.0, 1e-3), std::invalid_argument);
  EXPECT_THROW(m_threshold(2.5, 0.0), std::invalid_argument);
}

TEST(MThreshold, OutOfBracketReportsProbes) {
  // For large l the threshold leaves [1, 5]: m*(4) = 3.73, m*(5) = 5.13.
  try {
    m_threshold(5.0, 1e-3);
    FAIL();
  } catch (const NonMonotoneError& e) {
    ASSERT_GE(e.probes().size(), 2u);
    EXPECT_FALSE(e.probes()[1].second);
  }
}

TEST(FeasibilityTable, SinglePoint) {
  const auto rows = feasibility_table(2.5, 2.5, 1, 1e-3);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].l, 2.5);
  EXPECT_NEAR(rows[0].m_star, 5.0 / 3.0, 1e-15);
  EXPECT_LE(rows[0].abs_diff, 1e-3);
  ASSERT_TRUE(rows[0].witness.has_value());
  EXPECT_TRUE(all_satisfied(rows[0].m_threshold + 0.05, 2.5, rows[0].witness->p, rows[0].witness->q,
                            rows[0].witness->r));
}

TEST(FeasibilityTable, DefaultRange) {
  const auto rows = feasibility_table(2.05, 4.0, 40, 1e-3);
  ASSERT_EQ(rows.size(), 40u);
  EXPECT_EQ(rows.front().l, 2.05);
  EXPECT_DOUBLE_EQ(rows.back().l, 4.0);
  for (const auto& r : rows) EXPECT_LE(r.abs_diff, 2e-3) << r.l;
}

TEST(FeasibilityTable, RejectsBadRanges) {
  EXPECT_THROW(feasibility_table(2.0, 3.0, 10, 1e-3), std::invalid_argument);
  EXPECT_THROW(feasibility_table(1.5, 3.0, 10, 1e-3), std::invalid_argument);
  EXPECT_THROW(feasibility_table(3.0, 2.5, 10, 1e-3), std::invalid_argument);
  EXPECT_THROW(feasibility_table(2.5, 3.0, 0, 1e-3), std::invalid_argument);
  EXPECT_THROW(feasibility_table(2.5, 3.0, 5, 0.0), std::invalid_argument);
}

TEST(FeasibilityCsv, Header) {
  const auto csv = feasibility_csv(feasibility_table(2.5, 2.5, 1, 1e-3));
  EXPECT_EQ(csv.rfind("l,m_star_closed_form,m_threshold_bisection,abs_diff,witness_p,witness_q,witness_r\n", 0), 0u);
  EXPECT_NE(csv.find("\n2.5,"), std::string::npos);
}
