#include <gtest/gtest.h>
#include <algorithm>

#include "hublab/error.hpp"
#include "hublab/report.hpp"

using namespace hublab;

namespace {

RunReport sample() {
  RunReport r;
  r.instance = "random:1,5,5,5";
  r.formulation = "1p-fd";
  r.p = 2;
  r.r = 1;
  r.s = 2;
  r.solve.root_lp = 225.4712;
  r.solve.ilb = 430.68;
  r.solve.flb = 431.18995939;
  r.solve.fub = 431.18995939;
  r.solve.gap = 0.0;
  r.solve.nodes = 3;
  r.solve.cuts_zy2 = 27;
  r.solve.cuts_cortes = 17;
  r.solve.root_rounds = 3;
  r.solve.lp_iterations = 812;
  r.solve.wall_seconds = 0.0123;
  HubSolution s;
  s.hubs = {1, 3};
  s.origin_sets = {{1}, {3}};
  s.dest_sets = {{1, 3}, {3}};
  s.routing = {{1, 1}, {1, 3}, {3, 3}, {3, 3}};
  s.objective = 431.18995939;
  r.solution = s;
  return r;
}

}  // namespace

TEST(Report, JsonRoundTripIsByteIdentical) {
  const std::string a = report_to_json(sample());
  EXPECT_EQ(report_to_json(report_from_json(a)), a);
  EXPECT_NE(a.find("\"schema\": 1"), std::string::npos);
  EXPECT_EQ(a.find("wall_seconds"), std::string::npos);
}

TEST(Report, TimeOnlyWhenRequested) {
  auto r = sample();
  r.record_time = true;
  const std::string a = report_to_json(r);
  EXPECT_NE(a.find("wall_seconds"), std::string::npos);
  const auto back = report_from_json(a);
  EXPECT_TRUE(back.record_time);
  EXPECT_EQ(back.solve.wall_seconds, 0.0123);
  EXPECT_EQ(report_to_json(back), a);
}

TEST(Report, NoIncumbent) {
  auto r = sample();
  r.solution.reset();
  r.solve.fub = kInfinity;
  r.solve.gap = kInfinity;
  r.solve.status = SolveStatus::TimeLimit;
  const std::string a = report_to_json(r);
  EXPECT_NE(a.find("\"fub\": \"inf\""), std::string::npos);
  EXPECT_NE(a.find("\"solution\": null"), std::string::npos);
  const auto back = report_from_json(a);
  EXPECT_EQ(back.solve.fub, kInfinity);
  EXPECT_EQ(back.solve.status, SolveStatus::TimeLimit);
  EXPECT_EQ(report_to_json(back), a);
}

TEST(Report, CsvRoundTripIsByteIdentical) {
  auto a = sample();
  auto b = sample();
  b.instance = "data/ap,40.txt";
  b.solution.reset();
  b.solve.fub = kInfinity;
  const std::string text = reports_to_csv({a, b});
  EXPECT_NE(text.find("\"data/ap,40.txt\""), std::string::npos);
  const auto back = reports_from_csv(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].instance, "data/ap,40.txt");
  EXPECT_EQ(back[0].solve.flb, a.solve.flb);
  EXPECT_EQ(reports_to_csv(back), text);
}

TEST(Report, CsvUsesDotDecimalAndShortestDigits) {
  const std::string text = reports_to_csv({sample()});
  EXPECT_NE(text.find(",431.18995939,"), std::string::npos);
  EXPECT_NE(text.find(",1 3\n"), std::string::npos);
}

TEST(Report, Malformed) {
  auto expect_malformed = [](auto fn) {
    try {
      fn();
      FAIL() << "no exception";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedReport);
    }
  };
  expect_malformed([] { report_from_json("{"); });
  expect_malformed([] { report_from_json("{\"schema\": 2}"); });
  expect_malformed([] { report_from_json("{\"schema\": 1, \"instance\": 3}"); });
  std::string j = report_to_json(sample());
  j.replace(j.find("Optimal"), 7, "Optimul");
  expect_malformed([&] { report_from_json(j); });
  expect_malformed([] { reports_from_csv("a,b\n"); });
  expect_malformed([] { reports_from_csv(report_csv_header(false) + "x,y\n"); });
  expect_malformed([] { reports_from_csv(report_csv_header(false) + "\"open"); });
  std::string row = reports_to_csv({sample()});
  row.replace(row.find(",3,27,"), 6, ",z,27,");
  expect_malformed([&] { reports_from_csv(row); });
}

TEST(Report, HumanTableGolden) {
  const std::string t = human_table({sample()});
  EXPECT_EQ(t,
            "  p  Form              ILB          FLB          FUB      Time      Gap   #Nodes  "
            "#cortes     #zy2\n"
            "  2  1p-fd          430.68       431.19       431.19      0.01     0.00        3  "
            "     17       27\n");
}

TEST(Comparison, IdenticalSolutions) {
  const auto s = sample().solution.value();
  const auto c = compare_solutions(s, s, 2, 2);
  EXPECT_EQ(c.hubs_diff, 0);
  EXPECT_EQ(c.single_alloc_changes, 0);
  EXPECT_EQ(c.multi_alloc_count, 1);
}

TEST(Comparison, HandCounts) {
  HubSolution sa;
  sa.hubs = {0, 2};
  sa.origin_sets = {{0}, {2}, {2}};
  sa.dest_sets = {{0}, {2}, {2}};
  sa.routing.assign(9, {0, 0});
  sa.objective = 10;
  HubSolution op;
  op.hubs = {0, 1};
  op.origin_sets = {{1}, {1}, {0}};
  op.dest_sets = {{0, 1}, {1}, {0, 1}};
  // routing[i * 3 + j] = (k, m)
  op.routing = {{1, 0}, {1, 1}, {1, 0}, {1, 1}, {1, 1}, {1, 1}, {0, 0}, {0, 1}, {0, 1}};
  op.objective = 9;
  const auto c = compare_solutions(sa, op, 3, 2);
  EXPECT_EQ(c.hubs_diff, 2);
  EXPECT_EQ(c.single_alloc_changes, 3);
  EXPECT_EQ(c.multi_alloc_count, 2);
  const std::string j = comparison_to_json(c);
  EXPECT_EQ(comparison_to_json(comparison_from_json(j)), j);
  EXPECT_EQ(comparison_csv_header(),
            "n,p,hubs_diff,single_alloc_changes,multi_alloc_count,objective_sahlp,objective_1p,"
            "status_sahlp,status_1p,comparable\n");
  EXPECT_EQ(comparison_to_csv_row(c), "3,2,2,3,2,10,9,Optimal,Optimal,1\n");
}

TEST(Comparison, OracleSolutionsSeed11) {
  const auto inst = random_instance(11, 6, 6, 6, 2, 1, 2, CostKind::Disaggregated);
  const auto sa = exact_sahlp(inst);
  const auto op = exact_1p(inst);
  const auto c = compare_solutions(sa, op, 6, 2);
  int hubs = 0;
  for (int k = 0; k < 6; ++k) {
    const bool a = std::count(sa.hubs.begin(), sa.hubs.end(), k) > 0;
    const bool b = std::count(op.hubs.begin(), op.hubs.end(), k) > 0;
    hubs += a != b;
  }
  int changes = 0;
  for (int i = 0; i < 6; ++i) changes += sa.origin_sets[i][0] != op.origin_sets[i][0];
  int multi = 0;
  for (int j = 0; j < 6; ++j) {
    int first = -1;
    bool two = false;
    for (int i = 0; i < 6; ++i) {
      const int m = op.routing[i * 6 + j].second;
      if (first < 0) first = m;
      else two = two || m != first;
    }
    multi += two;
  }
  EXPECT_EQ(c.hubs_diff, hubs);
  EXPECT_EQ(c.single_alloc_changes, changes);
  EXPECT_EQ(c.multi_alloc_count, multi);
  EXPECT_LE(c.objective_1p, c.objective_sahlp + 1e-6);
  EXPECT_LE(c.multi_alloc_count, 6);
}
