#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hublab/instance.hpp"
#include "hublab/lp.hpp"
#include "hublab/models.hpp"
#include "hublab/oracle.hpp"

namespace hublab {

enum class CutFamily { ZY2, CORTES };

// A >= row over model columns.
struct Cut {
  Row row;
  CutFamily family = CutFamily::ZY2;
  int origin = -1;  // CORTES only
  double violation = 0.0;
};

enum class CortesBackend { Internal, Lp };

struct CutPolicy {
  int max_root_iterations = 5;
  double violation_tol = 0.01;
  int zy2_min_violations = 100;
  bool allow_tree_cuts = false;
  bool use_zy2 = true;
  bool use_cortes = true;
  CortesBackend backend = CortesBackend::Internal;
  int threads = 1;
};

// Parses none|zy2|cortes|both into the family switches.
void set_cut_families(CutPolicy& policy, const std::string& which);

enum class SolveStatus { Optimal, TimeLimit, NodeLimit, Infeasible };

std::string to_string(SolveStatus s);

struct SolveReport {
  double root_lp = 0.0;  // LP bound before any cut
  double ilb = 0.0;      // after the root cut loop
  double flb = 0.0;
  double fub = kInfinity;  // infinite until an incumbent exists
  double gap = 0.0;        // 100 (FUB - FLB) / max(|FUB|, 1e-12)
  long nodes = 0;          // explored, root included
  int cuts_zy2 = 0;
  int cuts_cortes = 0;
  int root_rounds = 0;
  long lp_iterations = 0;
  int objective_mismatches = 0;
  double wall_seconds = 0.0;
  SolveStatus status = SolveStatus::Optimal;
};

struct BncLimits {
  double time_seconds = 7200.0;
  long max_nodes = -1;  // -1: unlimited
  double rel_gap = 1e-6;
  double abs_gap = 1e-6;
};

struct BncResult {
  SolveReport report;
  std::optional<HubSolution> solution;
  std::vector<Cut> cuts;
};

// Rows y_m - z_ijm >= 0 with violation above policy.violation_tol, ordered by
// (i, j, m). Empty for formulations without z and y.
std::vector<Cut> separate_zy2(const std::vector<double>& point, const MipModel& model,
                              const CutPolicy& policy);

// Per-origin rows pi_i (delta_i) >= sum e x + sum f z from transportation
// duals of each (i, j). Only violated origins yield a row.
std::vector<Cut> separate_cortes(const std::vector<double>& point, const MipModel& model,
                                 const Instance& instance, const CutPolicy& policy);

// Duals of one (i, j) subproblem; exposed for exactness checks.
struct PairDuals {
  std::vector<double> e, f;
  double value = 0.0;
};
PairDuals cortes_pair_duals(const std::vector<double>& point, const MipModel& model,
                            const Instance& instance, int i, int j, CortesBackend backend);

struct RootResult {
  LpResult lp;
  double root_lp = 0.0;
  double ilb = 0.0;
  int rounds = 0;
  std::vector<double> round_bounds;  // LP value after each round
  std::vector<Cut> cuts;
};

// Cut rounds at the root. Appends the accepted cuts to model.lp.
RootResult root_cut_loop(MipModel& model, const Instance& instance, const CutPolicy& policy);

BncResult branch_and_cut(MipModel model, const Instance& instance, const CutPolicy& policy,
                         const BncLimits& limits);

// Largest amount by which any cut is violated at point (0 if none).
double max_cut_violation(const std::vector<Cut>& cuts, const std::vector<double>& point);

}  // namespace hublab
