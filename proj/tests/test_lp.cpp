#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "chebdea/error.hpp"
#include "chebdea/lp.hpp"
#include "oracles.hpp"

namespace chebdea {
namespace {

LpProblem single_variable(double cap) {
  LpProblem p;
  p.sense = Sense::Maximize;
  p.objective = {1.0};
  p.bounds = {VariableBound::NonNegative};
  p.constraints.push_back({{1.0}, Relation::LessEqual, cap});
  return p;
}

TEST(SolveLp, SingleConstraintCap) {
  const auto s = solve_lp(single_variable(3.0));
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_DOUBLE_EQ(s.values[0], 3.0);
  EXPECT_DOUBLE_EQ(s.objective_value, 3.0);
}

TEST(SolveLp, ContradictoryBoundsAreInfeasible) {
  EXPECT_EQ(solve_lp(single_variable(-1.0)).status, LpStatus::Infeasible);
}

TEST(SolveLp, UnconstrainedRayIsUnbounded) {
  LpProblem p;
  p.objective = {1.0};
  p.bounds = {VariableBound::NonNegative};
  EXPECT_EQ(solve_lp(p).status, LpStatus::Unbounded);
}

TEST(SolveLp, FreeVariableTakesNegativeValue) {
  // minimize x s.t. x >= -2, x free
  LpProblem p;
  p.sense = Sense::Minimize;
  p.objective = {1.0};
  p.bounds = {VariableBound::Free};
  p.constraints.push_back({{1.0}, Relation::GreaterEqual, -2.0});
  const auto s = solve_lp(p);
  ASSERT_TRUE(s.optimal());
  EXPECT_DOUBLE_EQ(s.values[0], -2.0);
  EXPECT_DOUBLE_EQ(s.objective_value, -2.0);
}

TEST(SolveLp, EqualityConstraints) {
  // max x + y s.t. x + 2y = 4, x - y = 1  -> x = 2, y = 1
  LpProblem p;
  p.objective = {1.0, 1.0};
  p.bounds = {VariableBound::NonNegative, VariableBound::NonNegative};
  p.constraints.push_back({{1.0, 2.0}, Relation::Equal, 4.0});
  p.constraints.push_back({{1.0, -1.0}, Relation::Equal, 1.0});
  const auto s = solve_lp(p);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.values[0], 2.0, 1e-12);
  EXPECT_NEAR(s.values[1], 1.0, 1e-12);
}

TEST(SolveLp, RedundantEqualityRowIsDropped) {
  LpProblem p;
  p.objective = {1.0, 0.0};
  p.bounds = {VariableBound::NonNegative, VariableBound::NonNegative};
  p.constraints.push_back({{1.0, 1.0}, Relation::Equal, 2.0});
  p.constraints.push_back({{2.0, 2.0}, Relation::Equal, 4.0});
  const auto s = solve_lp(p);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective_value, 2.0, 1e-12);
}

TEST(SolveLp, ZeroObjectiveReportsFeasibility) {
  LpProblem p;
  p.objective = {0.0, 0.0};
  p.bounds = {VariableBound::NonNegative, VariableBound::Free};
  p.constraints.push_back({{1.0, 1.0}, Relation::GreaterEqual, 5.0});
  p.constraints.push_back({{1.0, 0.0}, Relation::LessEqual, 1.0});
  const auto s = solve_lp(p);
  ASSERT_TRUE(s.optimal());
  EXPECT_LE(s.max_scaled_residual, 1e-9);
}

TEST(SolveLp, MixedMagnitudesAreEquilibrated) {
  // max 1e-2 * a + 1e7 * b-like magnitudes from raw library data.
  LpProblem p;
  p.objective = {1.0, 1.0};
  p.bounds = {VariableBound::NonNegative, VariableBound::NonNegative};
  p.constraints.push_back({{4.2e7, 1.0e-2}, Relation::LessEqual, 1.0});
  p.constraints.push_back({{1.0, 3.0e-2}, Relation::LessEqual, 2.0});
  const auto s = solve_lp(p);
  ASSERT_TRUE(s.optimal());
  EXPECT_LE(s.max_scaled_residual, 1e-9);
  EXPECT_NEAR(s.values[1], 2.0 / 3.0e-2 - s.values[0] / 3.0e-2, 1e-6);
}

TEST(SolveLp, RaggedRowIsInputError) {
  LpProblem p = single_variable(1.0);
  p.constraints.push_back({{1.0, 2.0}, Relation::LessEqual, 1.0});
  EXPECT_THROW(solve_lp(p), InputError);
}

TEST(SolveLp, NonFiniteEntryIsInputError) {
  LpProblem p = single_variable(std::numeric_limits<double>::quiet_NaN());
  EXPECT_THROW(solve_lp(p), InputError);
  LpProblem q = single_variable(1.0);
  q.constraints[0].coefficients[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(solve_lp(q), InputError);
}

TEST(SolveLp, BoundsCountMismatchIsInputError) {
  LpProblem p = single_variable(1.0);
  p.bounds.push_back(VariableBound::Free);
  EXPECT_THROW(solve_lp(p), InputError);
}

TEST(SolveLp, IterationCapRaisesNumericalError) {
  LpProblem p;
  p.objective = {1.0, 1.0};
  p.bounds = {VariableBound::NonNegative, VariableBound::NonNegative};
  p.constraints.push_back({{1.0, 0.0}, Relation::LessEqual, 1.0});
  p.constraints.push_back({{0.0, 1.0}, Relation::LessEqual, 1.0});
  SimplexOptions options;
  options.max_iterations = 1;
  EXPECT_THROW(solve_lp(p, options), NumericalError);
}

struct RandomLp {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> c;
  // Row index of an extra "sum x >= floor" row, stored in `a` in <= form (negated).
  std::optional<std::size_t> floor_row;
};

RandomLp random_lp(std::mt19937_64& rng, std::size_t n, std::size_t m, bool with_floor) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomLp lp;
  lp.c.resize(n);
  for (auto& v : lp.c) v = u(rng);
  double min_b = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> row(n);
    for (auto& v : row) v = u(rng);
    lp.a.push_back(row);
    lp.b.push_back(0.05 + u(rng));
    min_b = std::min(min_b, lp.b.back());
  }
  // Every column needs a positive entry somewhere for boundedness.
  for (std::size_t j = 0; j < n; ++j) lp.a[0][j] = std::max(lp.a[0][j], 0.05);
  if (with_floor) {
    lp.floor_row = lp.a.size();
    lp.a.push_back(std::vector<double>(n, -1.0));
    lp.b.push_back(-0.1 * min_b);
  }
  return lp;
}

LpProblem to_problem(const RandomLp& lp) {
  LpProblem p;
  p.objective = lp.c;
  p.bounds.assign(lp.c.size(), VariableBound::NonNegative);
  for (std::size_t i = 0; i < lp.a.size(); ++i) {
    if (lp.floor_row && i == *lp.floor_row) {
      p.constraints.push_back({std::vector<double>(lp.c.size(), 1.0), Relation::GreaterEqual,
                               -lp.b[i]});
    } else {
      p.constraints.push_back({lp.a[i], Relation::LessEqual, lp.b[i]});
    }
  }
  return p;
}

TEST(SolveLpProperty, MatchesVertexEnumerationOnRandomBoundedLps) {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> pick_n(1, 20);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = pick_n(rng);
    std::size_t m_max = 1;
    while (m_max < 12 && testing::binomial(n + m_max + 2, n) < 40000) ++m_max;
    std::uniform_int_distribution<std::size_t> pick_m(1, m_max);
    const std::size_t m = pick_m(rng);
    const auto lp = random_lp(rng, n, m, trial % 3 == 0);
    const auto expected = testing::vertex_enumeration_max(lp.a, lp.b, lp.c);
    ASSERT_TRUE(expected.has_value());
    const auto s = solve_lp(to_problem(lp));
    ASSERT_EQ(s.status, LpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(s.objective_value, *expected, 1e-7) << "trial " << trial << " n=" << n << " m=" << m;
    EXPECT_LE(s.max_scaled_residual, 1e-9);
    for (double v : s.values) EXPECT_GE(v, -1e-12);
    ++checked;
  }
  EXPECT_EQ(checked, 120);
}

TEST(SolveLpProperty, ResolveIsBitIdentical) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = to_problem(random_lp(rng, 8, 6, trial % 2 == 0));
    const auto first = solve_lp(p);
    const auto second = solve_lp(p);
    ASSERT_EQ(first.status, second.status);
    ASSERT_EQ(first.values.size(), second.values.size());
    EXPECT_EQ(std::memcmp(&first.objective_value, &second.objective_value, sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(first.values.data(), second.values.data(),
                          first.values.size() * sizeof(double)),
              0);
  }
}

TEST(SolveLpProperty, BlandFallbackReachesSameOptimum) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = to_problem(random_lp(rng, 6, 8, trial % 2 == 1));
    SimplexOptions bland;
    bland.bland_after = 0;
    const auto a = solve_lp(p);
    const auto b = solve_lp(p, bland);
    ASSERT_TRUE(a.optimal());
    ASSERT_TRUE(b.optimal());
    EXPECT_NEAR(a.objective_value, b.objective_value, 1e-9);
  }
}

}  // namespace
}  // namespace chebdea
