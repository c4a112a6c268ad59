#include <gtest/gtest.h>

#include "regenpool/milp/branch_and_bound.hpp"
#include "regenpool/milp/model.hpp"
#include "regenpool/traffic.hpp"
#include "support/brute_force.hpp"

using namespace regenpool;
using namespace regenpool::milp;

namespace {

Model textbook_lp() {
  Model m("textbook");
  const int x = m.add_variable("x", VarKind::continuous, 0, kInf, 3);
  const int y = m.add_variable("y", VarKind::continuous, 0, kInf, 2);
  m.add_constraint("cap", {{x, 1}, {y, 1}}, RowSense::le, 4);
  m.add_constraint("xmax", {{x, 1}}, RowSense::le, 2);
  return m;
}

Model knapsack() {
  Model m("knapsack");
  const int a = m.add_binary("a", 10), b = m.add_binary("b", 6), c = m.add_binary("c", 4);
  m.add_constraint("w", {{a, 5}, {b, 4}, {c, 3}}, RowSense::le, 8);
  return m;
}

// Random pure-binary model with mixed row senses.
Model random_binary(std::uint64_t seed, int n, int rows) {
  Rng rng(seed);
  Model m("rand" + std::to_string(seed));
  if (rng.uniform01() < 0.3) m.set_sense(ObjSense::minimize);
  for (int j = 0; j < n; ++j)
    m.add_binary("x" + std::to_string(j), static_cast<double>(static_cast<int>(rng.index(21)) - 8));
  for (int i = 0; i < rows; ++i) {
    std::vector<Term> ts;
    double sum_pos = 0.0;
    for (int j = 0; j < n; ++j) {
      if (rng.uniform01() < 0.5) continue;
      const double c = static_cast<double>(static_cast<int>(rng.index(13)) - 4);
      ts.push_back({j, c});
      if (c > 0) sum_pos += c;
    }
    const double r = rng.uniform01();
    const RowSense s = r < 0.6 ? RowSense::le : r < 0.9 ? RowSense::ge : RowSense::eq;
    const double rhs = s == RowSense::ge ? static_cast<double>(rng.index(4)) - 2.0
                                         : std::floor(sum_pos * rng.uniform(0.2, 0.8));
    m.add_constraint("r" + std::to_string(i), ts, s, rhs);
  }
  return m;
}

}  // namespace

TEST(Model, BinaryBoundsAndMergedTerms) {
  Model m;
  const int x = m.add_variable("x", VarKind::binary, -3, 7);
  EXPECT_EQ(m.variable(x).lower, 0.0);
  EXPECT_EQ(m.variable(x).upper, 1.0);
  m.add_constraint("r", {{x, 1}, {x, 2}, {x, -3}}, RowSense::le, 1);
  EXPECT_TRUE(m.constraint(0).terms.empty());
  EXPECT_TRUE(m.validate().empty());
  m.add_variable("n", VarKind::integer, 0, kInf);
  EXPECT_FALSE(m.validate().empty());
}

TEST(Lp, Textbook) {
  const auto s = solve_lp(textbook_lp());
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, 10.0, 1e-9);
  EXPECT_NEAR(s.value(0), 2.0, 1e-9);
  EXPECT_NEAR(s.value(1), 2.0, 1e-9);
}

TEST(Lp, Infeasible) {
  Model m;
  const int x = m.add_variable("x", VarKind::continuous, -kInf, kInf);
  m.add_constraint("lo", {{x, 1}}, RowSense::ge, 1);
  m.add_constraint("hi", {{x, 1}}, RowSense::le, 0);
  EXPECT_EQ(solve_lp(m).status, Status::infeasible);
  EXPECT_EQ(solve_milp(m).status, Status::infeasible);
}

TEST(Lp, Unbounded) {
  Model m;
  const int x = m.add_variable("x", VarKind::continuous, 0, kInf, 1);
  const int y = m.add_variable("y", VarKind::continuous, 0, kInf, 0);
  m.add_constraint("r", {{x, 1}, {y, -1}}, RowSense::le, 3);
  EXPECT_EQ(solve_lp(m).status, Status::unbounded);
}

TEST(Lp, MinimizeWithEqualityAndFreeVariable) {
  // min x + 2y, x - y = 1, y >= -3, x free  ->  y = -3, x = -2, obj -8
  Model m;
  m.set_sense(ObjSense::minimize);
  const int x = m.add_variable("x", VarKind::continuous, -kInf, kInf, 1);
  const int y = m.add_variable("y", VarKind::continuous, -3, kInf, 2);
  m.add_constraint("e", {{x, 1}, {y, -1}}, RowSense::eq, 1);
  const auto s = solve_lp(m);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, -8.0, 1e-9);
  EXPECT_NEAR(s.value(x), -2.0, 1e-9);
}

TEST(Lp, RelaxationOfFractionalPair) {
  Model m;
  const int a = m.add_binary("x1", 1), b = m.add_binary("x2", 1);
  m.add_constraint("r", {{a, 1}, {b, 1}}, RowSense::le, 1.5);
  EXPECT_NEAR(solve_lp(relaxation(m)).objective, 1.5, 1e-9);
  const auto s = solve_milp(m);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-9);
}

TEST(Milp, Knapsack) {
  const auto m = knapsack();
  const auto s = solve_milp(m);
  ASSERT_EQ(s.status, Status::optimal);
  // a=b=1 weighs 9 > 8, so the best packing is a+c.
  const auto e = oracle::enumerate_binary(m);
  EXPECT_EQ(e.objective, 14.0);
  EXPECT_NEAR(s.objective, e.objective, 1e-9);
  EXPECT_TRUE(s.is_one(0));
  EXPECT_FALSE(s.is_one(1));
  EXPECT_TRUE(s.is_one(2));
}

TEST(Milp, Deterministic) {
  const auto m = random_binary(77, 14, 8);
  const auto a = solve_milp(m), b = solve_milp(m);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.nodes, b.nodes);
}

TEST(Milp, IntegerVariables) {
  // max x + y, 2x + 2y <= 7, x - y <= 0.5, x,y in {0..5}  -> 3
  Model m;
  const int x = m.add_variable("x", VarKind::integer, 0, 5, 1);
  const int y = m.add_variable("y", VarKind::integer, 0, 5, 1);
  m.add_constraint("a", {{x, 2}, {y, 2}}, RowSense::le, 7);
  m.add_constraint("b", {{x, 1}, {y, -1}}, RowSense::le, 0.5);
  const auto s = solve_milp(m);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, 3.0, 1e-9);
  EXPECT_TRUE(check_feasibility(m, s.values).empty());
}

TEST(Milp, NodeLimitReturnsIncumbentFlagged) {
  const auto m = random_binary(5, 18, 10);
  const auto s = solve_milp(m, {600.0, 1});
  EXPECT_TRUE(s.status == Status::bound_limit || s.status == Status::optimal || s.status == Status::infeasible);
  if (s.status == Status::optimal) EXPECT_EQ(s.nodes, 1u);
}

class MilpVsEnumeration : public ::testing::TestWithParam<int> {};

TEST_P(MilpVsEnumeration, SameOptimum) {
  const int seed = GetParam();
  const int n = 6 + seed % 11;
  const auto m = random_binary(static_cast<std::uint64_t>(seed), n, 3 + seed % 7);
  const auto e = oracle::enumerate_binary(m);
  const auto s = solve_milp(m);
  if (!e.feasible) {
    EXPECT_EQ(s.status, Status::infeasible);
    return;
  }
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, e.objective, 1e-6);
  EXPECT_TRUE(check_feasibility(m, s.values).empty());
  const auto lp = solve_lp(relaxation(m));
  ASSERT_EQ(lp.status, Status::optimal);
  if (m.sense() == ObjSense::maximize)
    EXPECT_GE(lp.objective, s.objective - 1e-9);
  else
    EXPECT_LE(lp.objective, s.objective + 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Random, MilpVsEnumeration, ::testing::Range(1, 121));

TEST(Milp, BranchPriorityKeepsOptimum) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto m = random_binary(seed, 9, 5);
    Limits lim;
    lim.priority.resize(static_cast<std::size_t>(m.variable_count()));
    for (int j = 0; j < m.variable_count(); ++j) lim.priority[j] = (j * 7) % 3;
    const auto plain = solve_milp(m), ranked = solve_milp(m, lim);
    ASSERT_EQ(plain.status, ranked.status) << seed;
    if (plain.status == Status::optimal) EXPECT_NEAR(plain.objective, ranked.objective, 1e-9) << seed;
  }
  Limits bad;
  bad.priority = {1};
  EXPECT_THROW(solve_milp(knapsack(), bad), ValidationError);
}
