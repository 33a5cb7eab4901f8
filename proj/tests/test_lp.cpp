#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hublab/error.hpp"
#include "hublab/lp.hpp"

using namespace hublab;

namespace {

Row row(std::vector<int> idx, std::vector<double> val, Sense sense, double rhs) {
  Row r;
  r.index = std::move(idx);
  r.value = std::move(val);
  r.sense = sense;
  r.rhs = rhs;
  return r;
}

// Checks primal feasibility, reduced-cost signs and the duality identity.
void audit(const LinearProgram& lp, const LpResult& res) {
  ASSERT_EQ(res.status, LpStatus::Optimal);
  for (int r = 0; r < lp.num_rows(); ++r) {
    const double a = res.row_activity[r];
    const double rhs = lp.rows[r].rhs;
    switch (lp.rows[r].sense) {
      case Sense::LessEqual: EXPECT_LE(a, rhs + 1e-7); break;
      case Sense::GreaterEqual: EXPECT_GE(a, rhs - 1e-7); break;
      case Sense::Equal: EXPECT_NEAR(a, rhs, 1e-7); break;
    }
  }
  double dual_obj = 0.0;
  for (int r = 0; r < lp.num_rows(); ++r) dual_obj += res.duals[r] * lp.rows[r].rhs;
  for (int j = 0; j < lp.num_vars(); ++j) {
    EXPECT_GE(res.x[j], lp.lower[j] - 1e-7);
    EXPECT_LE(res.x[j], lp.upper[j] + 1e-7);
    const double d = res.reduced_costs[j];
    const bool at_lb = std::fabs(res.x[j] - lp.lower[j]) <= 1e-7;
    const bool at_ub = std::fabs(res.x[j] - lp.upper[j]) <= 1e-7;
    if (!at_lb && !at_ub) EXPECT_NEAR(d, 0.0, 1e-7);
    if (at_lb && !at_ub) EXPECT_GE(d, -1e-7);
    if (at_ub && !at_lb) EXPECT_LE(d, 1e-7);
    dual_obj += d * res.x[j];
  }
  EXPECT_NEAR(dual_obj, res.objective, 1e-6 * std::max(1.0, std::fabs(res.objective)));
}

}  // namespace

TEST(Lp, SingleVariableLowerRow) {
  LinearProgram lp;
  lp.add_variable(1.0, 0.0, 10.0);
  lp.add_row(row({0}, {1.0}, Sense::GreaterEqual, 3.0));
  const auto res = solve_lp(lp);
  ASSERT_EQ(res.status, LpStatus::Optimal);
  EXPECT_NEAR(res.x[0], 3.0, 1e-12);
  EXPECT_NEAR(res.objective, 3.0, 1e-12);
  audit(lp, res);
}

TEST(Lp, UnboundedRay) {
  LinearProgram lp;
  lp.add_variable(-1.0, 0.0, kInfinity);
  lp.add_row(row({0}, {1.0}, Sense::GreaterEqual, 0.0));
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Unbounded);
}

TEST(Lp, TwoVariablesWithEquality) {
  LinearProgram lp;
  lp.add_variable(1.0, 0.0, 5.0);
  lp.add_variable(1.0, 0.0, 5.0);
  lp.add_row(row({0, 1}, {1.0, 1.0}, Sense::GreaterEqual, 2.0));
  lp.add_row(row({0, 1}, {1.0, -1.0}, Sense::Equal, 0.0));
  const auto res = solve_lp(lp);
  ASSERT_EQ(res.status, LpStatus::Optimal);
  EXPECT_NEAR(res.x[0], 1.0, 1e-9);
  EXPECT_NEAR(res.x[1], 1.0, 1e-9);
  EXPECT_NEAR(res.objective, 2.0, 1e-9);
  // Complementary slackness: the covering row is tight and priced at 1.
  EXPECT_NEAR(res.duals[0], 1.0, 1e-9);
  EXPECT_NEAR(res.duals[1], 0.0, 1e-9);
  audit(lp, res);
}

TEST(Lp, Infeasible) {
  LinearProgram lp;
  lp.add_variable(1.0, 0.0, 1.0);
  lp.add_row(row({0}, {1.0}, Sense::GreaterEqual, 2.0));
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Infeasible);
}

TEST(Lp, FreeVariablesAndUpperBounds) {
  // max x + y  s.t. x + 2y <= 4, 3x + y <= 6, x free, y <= 1.5
  LinearProgram lp;
  lp.add_variable(-1.0, -kInfinity, kInfinity);
  lp.add_variable(-1.0, 0.0, 1.5);
  lp.add_row(row({0, 1}, {1.0, 2.0}, Sense::LessEqual, 4.0));
  lp.add_row(row({0, 1}, {3.0, 1.0}, Sense::LessEqual, 6.0));
  const auto res = solve_lp(lp);
  ASSERT_EQ(res.status, LpStatus::Optimal);
  EXPECT_NEAR(res.objective, -2.8, 1e-9);
  audit(lp, res);
}

TEST(Lp, NoRows) {
  LinearProgram lp;
  lp.add_variable(2.0, -1.0, 3.0);
  lp.add_variable(-1.0, -1.0, 3.0);
  const auto res = solve_lp(lp);
  ASSERT_EQ(res.status, LpStatus::Optimal);
  EXPECT_EQ(res.x[0], -1.0);
  EXPECT_EQ(res.x[1], 3.0);
}

TEST(Lp, InvalidProgramRejected) {
  LinearProgram lp;
  lp.add_variable(1.0, 2.0, 1.0);
  EXPECT_THROW(solve_lp(lp), Error);
  LinearProgram dup;
  dup.add_variable(1.0, 0.0, 1.0);
  dup.add_row(row({0, 0}, {1.0, 1.0}, Sense::LessEqual, 1.0));
  try {
    solve_lp(dup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidProgram);
  }
}

namespace {

LinearProgram random_lp(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LinearProgram lp;
  for (int j = 0; j < n; ++j) {
    const double lb = u(rng) < 0.2 ? -kInfinity : 0.0;
    const double cost = u(rng) * 10.0 - 3.0;
    // Negative costs get a finite upper bound so every program stays bounded.
    const double ub = u(rng) < 0.5 || cost < 0.0 ? 1.0 + 4.0 * u(rng) : kInfinity;
    lp.add_variable(cost, lb, ub);
  }
  // A known feasible point keeps every instance feasible.
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) x0[j] = std::min(lp.upper[j], std::max(lp.lower[j], 0.5));
  for (int r = 0; r < m; ++r) {
    Row rw;
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      if (u(rng) < 0.5) {
        const double a = std::round((u(rng) * 6.0 - 2.0) * 4.0) / 4.0;
        if (a == 0.0) continue;
        rw.index.push_back(j);
        rw.value.push_back(a);
        act += a * x0[j];
      }
    }
    const double pick = u(rng);
    rw.sense = pick < 0.4 ? Sense::LessEqual : pick < 0.8 ? Sense::GreaterEqual : Sense::Equal;
    rw.rhs = rw.sense == Sense::LessEqual ? act + u(rng) : rw.sense == Sense::GreaterEqual ? act - u(rng) : act;
    lp.add_row(rw);
  }
  // Free columns with positive cost still need a floor.
  for (int j = 0; j < n; ++j) {
    if (lp.lower[j] == -kInfinity && lp.objective[j] > 0.0) {
      Row floor;
      floor.index = {j};
      floor.value = {1.0};
      floor.sense = Sense::GreaterEqual;
      floor.rhs = -50.0;
      lp.add_row(floor);
    }
  }
  return lp;
}

}  // namespace

TEST(Lp, RandomProgramsSatisfyKkt) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng() % 12);
    const int m = 1 + static_cast<int>(rng() % 10);
    const auto lp = random_lp(rng, n, m);
    const auto res = solve_lp(lp);
    SCOPED_TRACE(t);
    audit(lp, res);
  }
}

TEST(Lp, WarmStartAfterCutDoesNotDecrease) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    auto lp = random_lp(rng, 8, 6);
    const auto first = solve_lp(lp);
    ASSERT_EQ(first.status, LpStatus::Optimal);
    // Cut off the current optimum along its first column if possible.
    Row cut;
    cut.index = {0};
    cut.value = {1.0};
    cut.sense = Sense::GreaterEqual;
    cut.rhs = std::min(lp.upper[0], first.x[0] + 0.25);
    lp.add_row(cut);
    const auto warm = solve_lp(lp, &first.basis);
    const auto cold = solve_lp(lp);
    ASSERT_EQ(warm.status, cold.status);
    if (warm.status != LpStatus::Optimal) continue;
    EXPECT_GE(warm.objective, first.objective - 1e-9);
    EXPECT_NEAR(warm.objective, cold.objective, 1e-7);
    audit(lp, warm);
  }
}

TEST(Lp, Deterministic) {
  std::mt19937_64 rng(3);
  const auto lp = random_lp(rng, 12, 9);
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.duals, b.duals);
}

TEST(Lp, MpsLayout) {
  LinearProgram lp;
  lp.add_variable(1.0, 0.0, 10.0, "x");
  lp.add_variable(-2.0, -kInfinity, kInfinity, "y");
  lp.add_row(row({0, 1}, {1.0, 1.0}, Sense::GreaterEqual, 3.0), "c1");
  const std::string text = write_mps(lp, "T");
  const std::string expected =
      "NAME          T\n"
      "ROWS\n"
      " N  COST\n"
      " G  c1\n"
      "COLUMNS\n"
      "    x         COST      1\n"
      "    x         c1        1\n"
      "    y         COST      -2\n"
      "    y         c1        1\n"
      "RHS\n"
      "    RHS       c1        3\n"
      "BOUNDS\n"
      " UP BND       x         10\n"
      " FR BND       y\n"
      "ENDATA\n";
  EXPECT_EQ(text, expected);
}
