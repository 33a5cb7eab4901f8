#include "hublab/bnc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <deque>
#include <memory>
#include <queue>
#include <unordered_map>

#include "hublab/error.hpp"

namespace hublab {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::TimeLimit: return "TimeLimit";
    case SolveStatus::NodeLimit: return "NodeLimit";
    case SolveStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

namespace {

constexpr double kIntTol = 1e-6;

std::uint64_t row_hash(const Row& row) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (std::size_t e = 0; e < row.index.size(); ++e) {
    mix(static_cast<std::uint64_t>(row.index[e]));
    std::uint64_t bits;
    std::memcpy(&bits, &row.value[e], sizeof bits);
    mix(bits);
  }
  std::uint64_t rbits;
  std::memcpy(&rbits, &row.rhs, sizeof rbits);
  mix(rbits);
  return h;
}

class CutPool {
 public:
  // False when an identical row was added before.
  bool insert(const Row& row) {
    auto& bucket = seen_[row_hash(row)];
    for (const Row* r : bucket) {
      if (r->index == row.index && r->value == row.value && r->rhs == row.rhs) return false;
    }
    rows_.push_back(row);
    bucket.push_back(&rows_.back());
    return true;
  }

 private:
  std::deque<Row> rows_;
  std::unordered_map<std::uint64_t, std::vector<const Row*>> seen_;
};

LpResult solve_checked(const LinearProgram& lp, const Basis* warm) {
  try {
    return solve_lp(lp, warm);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NumericalBreakdown || warm == nullptr) throw;
    return solve_lp(lp, nullptr);
  }
}

std::string cut_name(const Cut& c, const MipModel& model, int serial) {
  if (c.family == CutFamily::CORTES) {
    return "cortes_" + std::to_string(c.origin) + "_" + std::to_string(serial);
  }
  const auto& names = model.lp.col_names;
  const int zc = c.row.index[1];
  return names.empty() ? "zy2_" + std::to_string(serial) : "zy2" + names[zc].substr(1);
}

int add_cuts(MipModel& model, CutPool& pool, std::vector<Cut>& found, std::vector<Cut>& log) {
  int added = 0;
  for (auto& c : found) {
    if (!pool.insert(c.row)) continue;
    model.lp.add_row(c.row, cut_name(c, model, static_cast<int>(log.size())));
    log.push_back(std::move(c));
    ++added;
  }
  return added;
}

}  // namespace

RootResult root_cut_loop(MipModel& model, const Instance& instance, const CutPolicy& policy) {
  RootResult out;
  out.lp = solve_checked(model.lp, nullptr);
  if (out.lp.status != LpStatus::Optimal) {
    out.root_lp = out.ilb = out.lp.status == LpStatus::Infeasible ? kInfinity : -kInfinity;
    return out;
  }
  out.root_lp = out.lp.objective;
  CutPool pool;
  bool zy2_active = policy.use_zy2;
  for (int round = 0; round < policy.max_root_iterations; ++round) {
    std::vector<Cut> found;
    if (zy2_active) {
      found = separate_zy2(out.lp.x, model, policy);
      if (static_cast<int>(found.size()) < policy.zy2_min_violations) zy2_active = false;
    }
    if (!zy2_active && policy.use_cortes) {
      auto cortes = separate_cortes(out.lp.x, model, instance, policy);
      found.insert(found.end(), std::make_move_iterator(cortes.begin()),
                   std::make_move_iterator(cortes.end()));
    }
    if (add_cuts(model, pool, found, out.cuts) == 0) break;
    const Basis warm = out.lp.basis;
    out.lp = solve_checked(model.lp, &warm);
    ++out.rounds;
    if (out.lp.status != LpStatus::Optimal) {
      fail(ErrorCode::NumericalBreakdown, "root LP ended " + to_string(out.lp.status) + " after cuts");
    }
    out.round_bounds.push_back(out.lp.objective);
  }
  out.ilb = out.lp.objective;
  return out;
}

namespace {

struct Node {
  std::vector<std::pair<int, double>> fixes;  // column -> fixed value
  double bound = -kInfinity;
  std::shared_ptr<const Basis> basis;
  long serial = 0;
};

struct WorseBound {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.serial > b.serial;
  }
};

}  // namespace

BncResult branch_and_cut(MipModel model, const Instance& instance, const CutPolicy& policy,
                         const BncLimits& limits) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  BncResult result;
  SolveReport& rep = result.report;
  auto root = root_cut_loop(model, instance, policy);
  rep.root_lp = root.root_lp;
  rep.ilb = root.ilb;
  rep.root_rounds = root.rounds;
  rep.lp_iterations += root.lp.iterations;
  for (const auto& c : root.cuts) (c.family == CutFamily::ZY2 ? rep.cuts_zy2 : rep.cuts_cortes)++;
  result.cuts = std::move(root.cuts);

  CutPool tree_pool;
  for (const auto& c : result.cuts) tree_pool.insert(c.row);

  const std::vector<double> base_lower = model.lp.lower;
  const std::vector<double> base_upper = model.lp.upper;
  auto tolerance = [&] {
    return std::max(limits.abs_gap, limits.rel_gap * std::fabs(rep.fub));
  };

  std::priority_queue<Node, std::vector<Node>, WorseBound> open;
  long serial = 0;
  double pruned_floor = kInfinity;  // smallest bound discarded within tolerance
  bool stopped = false;

  auto finish = [&](SolveStatus status) {
    rep.status = status;
    double flb = rep.fub;
    if (status == SolveStatus::Optimal) {
      flb = std::min(rep.fub, pruned_floor);
    } else {
      flb = std::min(flb, pruned_floor);
      if (!open.empty()) flb = std::min(flb, open.top().bound);
    }
    if (status == SolveStatus::Infeasible) flb = kInfinity;
    rep.flb = std::max(flb, rep.ilb);
    if (std::isfinite(rep.fub) && std::isfinite(rep.flb)) {
      rep.gap = 100.0 * (rep.fub - rep.flb) / std::max(std::fabs(rep.fub), 1e-12);
    } else {
      rep.gap = std::isfinite(rep.fub) || status == SolveStatus::Infeasible ? 0.0 : kInfinity;
    }
    rep.wall_seconds = elapsed();
  };

  if (root.lp.status == LpStatus::Infeasible) {
    rep.nodes = 1;
    finish(SolveStatus::Infeasible);
    return result;
  }
  if (root.lp.status != LpStatus::Optimal) {
    fail(ErrorCode::NumericalBreakdown, "root LP ended " + to_string(root.lp.status));
  }

  Node first;
  first.bound = root.ilb;
  first.serial = serial++;
  std::optional<LpResult> pending = std::move(root.lp);  // root LP already solved
  std::optional<Node> dive = std::move(first);

  while (true) {
    if (!dive) {
      if (open.empty()) break;
      dive = open.top();
      open.pop();
    }
    Node node = std::move(*dive);
    dive.reset();

    if (std::isfinite(rep.fub) && node.bound >= rep.fub - tolerance()) {
      pruned_floor = std::min(pruned_floor, node.bound);
      continue;
    }
    if (elapsed() > limits.time_seconds) {
      open.push(std::move(node));
      stopped = true;
      finish(SolveStatus::TimeLimit);
      break;
    }
    if (limits.max_nodes >= 0 && rep.nodes >= limits.max_nodes) {
      open.push(std::move(node));
      stopped = true;
      finish(SolveStatus::NodeLimit);
      break;
    }

    LpResult lp;
    if (pending) {
      lp = std::move(*pending);
      pending.reset();
    } else {
      model.lp.lower = base_lower;
      model.lp.upper = base_upper;
      for (const auto& [col, val] : node.fixes) model.lp.lower[col] = model.lp.upper[col] = val;
      lp = solve_checked(model.lp, node.basis.get());
      rep.lp_iterations += lp.iterations;
    }
    ++rep.nodes;

    if (policy.allow_tree_cuts && policy.use_zy2 && lp.status == LpStatus::Optimal) {
      auto found = separate_zy2(lp.x, model, policy);
      int added = 0;
      for (auto& c : found) {
        if (!tree_pool.insert(c.row)) continue;
        model.lp.add_row(c.row, cut_name(c, model, static_cast<int>(result.cuts.size())));
        result.cuts.push_back(std::move(c));
        ++rep.cuts_zy2;
        ++added;
      }
      if (added > 0) {
        const Basis warm = lp.basis;
        model.lp.lower = base_lower;
        model.lp.upper = base_upper;
        for (const auto& [col, val] : node.fixes) model.lp.lower[col] = model.lp.upper[col] = val;
        lp = solve_checked(model.lp, &warm);
        rep.lp_iterations += lp.iterations;
      }
    }

    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status != LpStatus::Optimal) {
      fail(ErrorCode::NumericalBreakdown, "node LP ended " + to_string(lp.status));
    }
    const double bound = std::max(lp.objective, node.bound);
    if (std::isfinite(rep.fub) && bound >= rep.fub - tolerance()) {
      pruned_floor = std::min(pruned_floor, bound);
      continue;
    }

    // Most fractional binary; ties go to the lowest column.
    int branch_col = -1;
    double best_frac = kIntTol;
    for (int j = 0; j < model.lp.num_vars(); ++j) {
      if (!model.integer[j]) continue;
      const double frac = std::fabs(lp.x[j] - std::round(lp.x[j]));
      if (frac > best_frac) {
        best_frac = frac;
        branch_col = j;
      }
    }

    if (branch_col < 0) {
      const auto ex = decode_solution(model, instance, lp.x);
      if (ex.mismatch) ++rep.objective_mismatches;
      if (ex.solution.objective < rep.fub) {
        rep.fub = ex.solution.objective;
        result.solution = ex.solution;
      }
      continue;
    }

    auto basis = std::make_shared<const Basis>(std::move(lp.basis));
    Node up;
    up.fixes = node.fixes;
    up.fixes.emplace_back(branch_col, 1.0);
    up.bound = bound;
    up.basis = basis;
    up.serial = serial++;
    Node down;
    down.fixes = std::move(node.fixes);
    down.fixes.emplace_back(branch_col, 0.0);
    down.bound = bound;
    down.basis = basis;
    down.serial = serial++;
    open.push(std::move(down));
    dive = std::move(up);

    if (std::isfinite(rep.fub)) {
      const double floor = std::min(open.top().bound, dive->bound);
      if (rep.fub - floor <= tolerance()) {
        pruned_floor = std::min(pruned_floor, floor);
        dive.reset();
        while (!open.empty()) open.pop();
      }
    }
  }
  if (!stopped) finish(std::isfinite(rep.fub) ? SolveStatus::Optimal : SolveStatus::Infeasible);
  model.lp.lower = base_lower;
  model.lp.upper = base_upper;
  return result;
}

}  // namespace hublab
