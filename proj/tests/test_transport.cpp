#include <gtest/gtest.h>

#include <random>

#include "hublab/error.hpp"
#include "hublab/lp.hpp"
#include "hublab/transport.hpp"

using namespace hublab;

namespace {

void check_duals(const TransportInstance& tp, const TransportDuals& du) {
  const int R = tp.rows(), C = tp.cols();
  double primal = 0.0;
  for (int k = 0; k < R; ++k)
    for (int m = 0; m < C; ++m) {
      EXPECT_LE(du.e[k] + du.f[m], tp.cost(k, m) + 1e-9);
      const double fl = du.flow[k * C + m];
      EXPECT_GE(fl, -1e-12);
      primal += fl * tp.cost(k, m);
      if (fl > 1e-9) EXPECT_NEAR(du.e[k] + du.f[m], tp.cost(k, m), 1e-8);
    }
  EXPECT_NEAR(primal, du.objective, 1e-8);
  for (int k = 0; k < R; ++k) {
    double out = 0.0;
    for (int m = 0; m < C; ++m) out += du.flow[k * C + m];
    EXPECT_NEAR(out, tp.supplies[k], 1e-9);
  }
}

TransportInstance random_tp(std::mt19937_64& rng, int h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TransportInstance tp;
  tp.supplies.resize(h);
  tp.demands.resize(h);
  double ts = 0.0, td = 0.0;
  for (int k = 0; k < h; ++k) {
    tp.supplies[k] = u(rng) < 0.3 ? 0.0 : u(rng);
    tp.demands[k] = u(rng) < 0.3 ? 0.0 : u(rng);
    ts += tp.supplies[k];
    td += tp.demands[k];
  }
  if (ts == 0.0) tp.supplies[0] = ts = 1.0;
  if (td == 0.0) tp.demands[h - 1] = td = 1.0;
  for (auto& v : tp.supplies) v /= ts;
  for (auto& v : tp.demands) v /= td;
  tp.costs.resize(h * h);
  for (auto& c : tp.costs) c = std::floor(u(rng) * 100.0) / 4.0;
  return tp;
}

double primal_lp(const TransportInstance& tp) {
  const int R = tp.rows(), C = tp.cols();
  LinearProgram lp;
  for (int k = 0; k < R; ++k)
    for (int m = 0; m < C; ++m) lp.add_variable(tp.cost(k, m), 0.0, kInfinity);
  for (int k = 0; k < R; ++k) {
    Row r;
    for (int m = 0; m < C; ++m) {
      r.index.push_back(k * C + m);
      r.value.push_back(1.0);
    }
    r.sense = Sense::Equal;
    r.rhs = tp.supplies[k];
    lp.add_row(r);
  }
  for (int m = 0; m < C - 1; ++m) {
    Row r;
    for (int k = 0; k < R; ++k) {
      r.index.push_back(k * C + m);
      r.value.push_back(1.0);
    }
    r.sense = Sense::Equal;
    r.rhs = tp.demands[m];
    lp.add_row(r);
  }
  const auto res = solve_lp(lp);
  EXPECT_EQ(res.status, LpStatus::Optimal);
  return res.objective;
}

}  // namespace

TEST(Transport, WorkedExample) {
  TransportInstance tp{{1, 0}, {0.5, 0.5}, {1, 2, 3, 4}};
  const auto du = solve_transport(tp);
  EXPECT_EQ(du.flow, (std::vector<double>{0.5, 0.5, 0, 0}));
  EXPECT_NEAR(du.objective, 1.5, 1e-12);
  // Normalized at the only supplied row; a shift of 1 gives e = [1, .], f = [0, 1].
  EXPECT_EQ(du.e[0], 0.0);
  EXPECT_EQ(du.f, (std::vector<double>{1, 2}));
  EXPECT_LE(du.e[1], 3.0 - du.f[0] + 1e-12);
  EXPECT_LE(du.e[1] + du.f[1], 4.0 + 1e-12);
  check_duals(tp, du);
}

TEST(Transport, SingleCell) {
  TransportInstance tp{{1, 0, 0}, {1, 0, 0}, {7, 1, 2, 3, 4, 5, 6, 0, 8}};
  const auto du = solve_transport(tp);
  EXPECT_NEAR(du.objective, 7.0, 1e-12);
  check_duals(tp, du);
}

TEST(Transport, UniformCosts) {
  std::mt19937_64 rng(5);
  auto tp = random_tp(rng, 6);
  for (auto& c : tp.costs) c = 2.5;
  const auto du = solve_transport(tp);
  EXPECT_NEAR(du.objective, 2.5, 1e-12);
}

TEST(Transport, Unbalanced) {
  TransportInstance tp{{1, 0}, {0.5, 0.4}, {1, 2, 3, 4}};
  try {
    solve_transport(tp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unbalanced);
  }
}

TEST(Transport, ReduceDegenerate) {
  TransportInstance a{{1, 0}, {1, 0}, {1, 2, 3, 4}};
  const auto ra = reduce_degenerate(a);
  EXPECT_EQ(ra.problem.rows(), 1);
  EXPECT_EQ(ra.problem.cols(), 1);

  TransportInstance b{{0.5, 0.5}, {0.25, 0.75}, {1, 2, 3, 4}};
  const auto rb = reduce_degenerate(b);
  EXPECT_EQ(rb.rows, (std::vector<int>{0, 1}));
  EXPECT_EQ(rb.cols, (std::vector<int>{0, 1}));

  TransportInstance c{{0.5, 0, 0.5}, {0, 1, 0}, std::vector<double>(9, 1.0)};
  const auto rc = reduce_degenerate(c);
  EXPECT_EQ(rc.problem.rows(), 2);
  EXPECT_EQ(rc.problem.cols(), 1);
  EXPECT_EQ(rc.row_of, (std::vector<int>{0, -1, 1}));
  EXPECT_EQ(rc.col_of, (std::vector<int>{-1, 0, -1}));
  EXPECT_EQ(rc.rows, (std::vector<int>{0, 2}));
  EXPECT_EQ(rc.cols, (std::vector<int>{1}));

  TransportInstance z{{0, 0}, {0, 0}, {1, 2, 3, 4}};
  try {
    reduce_degenerate(z);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyProblem);
  }
  const auto dz = solve_transport(z);
  EXPECT_EQ(dz.objective, 0.0);
  check_duals(z, dz);
}

TEST(Transport, TranslationInvariance) {
  std::mt19937_64 rng(9);
  const auto tp = random_tp(rng, 5);
  const auto du = solve_transport(tp);
  const double t = 3.25;
  double shifted = 0.0;
  for (int k = 0; k < 5; ++k) shifted += (du.e[k] + t) * tp.supplies[k];
  for (int m = 0; m < 5; ++m) shifted += (du.f[m] - t) * tp.demands[m];
  EXPECT_NEAR(shifted, du.objective, 1e-12);
  int first = 0;
  while (tp.supplies[first] <= kMassTol) ++first;
  EXPECT_EQ(du.e[first], 0.0);
}

TEST(Transport, MatchesLpOnRandomInstances) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 300; ++t) {
    const int h = 1 + static_cast<int>(rng() % 12);
    const auto tp = random_tp(rng, h);
    const auto du = solve_transport(tp);
    SCOPED_TRACE(t);
    check_duals(tp, du);
    EXPECT_NEAR(du.objective, primal_lp(tp), 1e-8);
  }
}

TEST(Transport, Deterministic) {
  std::mt19937_64 rng(77);
  const auto tp = random_tp(rng, 10);
  const auto a = solve_transport(tp);
  const auto b = solve_transport(tp);
  EXPECT_EQ(a.e, b.e);
  EXPECT_EQ(a.f, b.f);
  EXPECT_EQ(a.flow, b.flow);
}
