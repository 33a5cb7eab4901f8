#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hublab/bnc.hpp"
#include "hublab/oracle.hpp"

namespace hublab {

inline constexpr int kReportSchema = 1;

// One solve run: configuration, statistics and the decoded solution.
struct RunReport {
  std::string instance;  // "random:SEED,o,d,h" or the input path
  std::string formulation;
  int p = 0;
  int r = 1;
  int s = 1;
  std::string cuts = "both";
  std::string cortes_backend = "internal";
  SolveReport solve;
  std::optional<HubSolution> solution;
  // Wall time is nondeterministic and only written when requested.
  bool record_time = false;
};

// Non-finite values are written as the strings "inf", "-inf" and "nan".
std::string report_to_json(const RunReport& report);
RunReport report_from_json(std::string_view text);

std::string report_csv_header(bool with_time);
std::string report_to_csv_row(const RunReport& report);
// Header plus one row per report; all reports must agree on record_time.
std::string reports_to_csv(const std::vector<RunReport>& reports);
std::vector<RunReport> reports_from_csv(std::string_view text);

// Fixed-width table with columns p, Form, ILB, FLB, FUB, Time, Gap, #Nodes,
// #cortes, #zy2.
std::string human_table(const std::vector<RunReport>& reports);

struct ComparisonReport {
  int n = 0;
  int p = 0;
  int hubs_diff = 0;
  int single_alloc_changes = 0;
  int multi_alloc_count = 0;
  double objective_sahlp = 0.0;
  double objective_1p = 0.0;
  std::string status_sahlp = "Optimal";
  std::string status_1p = "Optimal";
  bool comparable = true;  // both runs proved optimality
};

ComparisonReport compare_solutions(const HubSolution& sahlp, const HubSolution& one_p,
                                   int n, int p);

std::string comparison_to_json(const ComparisonReport& report);
ComparisonReport comparison_from_json(std::string_view text);
std::string comparison_csv_header();
std::string comparison_to_csv_row(const ComparisonReport& report);

}  // namespace hublab
