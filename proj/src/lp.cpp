#include "hublab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dense_lu.hpp"
#include "hublab/error.hpp"
#include "hublab/kernels.hpp"

namespace hublab {

int LinearProgram::add_variable(double cost, double lb, double ub, std::string name) {
  objective.push_back(cost);
  lower.push_back(lb);
  upper.push_back(ub);
  if (!name.empty() || !col_names.empty()) {
    col_names.resize(objective.size() - 1);
    col_names.push_back(std::move(name));
  }
  return static_cast<int>(objective.size()) - 1;
}

int LinearProgram::add_row(Row row, std::string name) {
  rows.push_back(std::move(row));
  if (!name.empty() || !row_names.empty()) {
    row_names.resize(rows.size() - 1);
    row_names.push_back(std::move(name));
  }
  return static_cast<int>(rows.size()) - 1;
}

void LinearProgram::validate() const {
  const int n = num_vars();
  if (lower.size() != objective.size() || upper.size() != objective.size()) {
    fail(ErrorCode::InvalidProgram, "bound vectors do not match the column count");
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j]) || std::isnan(lower[j]) || std::isnan(upper[j]) ||
        lower[j] > upper[j] || lower[j] == kInfinity || upper[j] == -kInfinity) {
      fail(ErrorCode::InvalidProgram, "column " + std::to_string(j) +
                                          " has invalid cost or bounds");
    }
  }
  std::vector<int> seen(n, -1);
  for (int r = 0; r < num_rows(); ++r) {
    const Row& row = rows[r];
    if (row.index.size() != row.value.size() || !std::isfinite(row.rhs)) {
      fail(ErrorCode::InvalidProgram, "row " + std::to_string(r) + " is malformed");
    }
    for (std::size_t e = 0; e < row.index.size(); ++e) {
      const int j = row.index[e];
      if (j < 0 || j >= n) {
        fail(ErrorCode::InvalidProgram, "row " + std::to_string(r) +
                                            " references column " + std::to_string(j));
      }
      if (seen[j] == r) {
        fail(ErrorCode::InvalidProgram, "row " + std::to_string(r) +
                                            " repeats column " + std::to_string(j));
      }
      seen[j] = r;
      if (!std::isfinite(row.value[e])) {
        fail(ErrorCode::InvalidProgram, "row " + std::to_string(r) + " has a non-finite coefficient");
      }
    }
  }
  if (!col_names.empty() && col_names.size() != objective.size()) {
    fail(ErrorCode::InvalidProgram, "column name count mismatch");
  }
  if (!row_names.empty() && row_names.size() != rows.size()) {
    fail(ErrorCode::InvalidProgram, "row name count mismatch");
  }
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::IterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

namespace {

using detail::DenseLu;
using detail::SparseColumn;

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpOptions& options)
      : lp_(lp), opt_(options), n_(lp.num_vars()), m_(lp.num_rows()), total_(n_ + m_) {
    build_columns();
    cost_.assign(total_, 0.0);
    lb_.assign(total_, 0.0);
    ub_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
      cost_[j] = lp.objective[j];
      lb_[j] = lp.lower[j];
      ub_[j] = lp.upper[j];
    }
    // Logical s_r = a_r x, column -e_r in [A | -I].
    for (int r = 0; r < m_; ++r) {
      const Row& row = lp.rows[r];
      const int j = n_ + r;
      switch (row.sense) {
        case Sense::LessEqual: lb_[j] = -kInfinity; ub_[j] = row.rhs; break;
        case Sense::GreaterEqual: lb_[j] = row.rhs; ub_[j] = kInfinity; break;
        case Sense::Equal: lb_[j] = row.rhs; ub_[j] = row.rhs; break;
      }
    }
    lb0_ = lb_;
    ub0_ = ub_;
    max_iterations_ = opt_.max_iterations >= 0
                          ? opt_.max_iterations
                          : 20L * (static_cast<long>(m_) + n_) + 10000;
  }

  LpResult run(const Basis* warm) {
    initial_basis(warm);
    refactor();
    LpResult result;
    result.status = iterate();
    result.iterations = iterations_;
    finish(result);
    return result;
  }

 private:
  struct Eta {
    int pos;
    double pivot;
    std::vector<std::pair<int, double>> entries;
  };

  void build_columns() {
    std::vector<int> count(n_ + 1, 0);
    for (const Row& row : lp_.rows)
      for (int j : row.index) ++count[j + 1];
    col_start_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j + 1];
    col_row_.assign(col_start_[n_], 0);
    col_val_.assign(col_start_[n_], 0.0);
    std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
    for (int r = 0; r < m_; ++r) {
      const Row& row = lp_.rows[r];
      for (std::size_t e = 0; e < row.index.size(); ++e) {
        const int j = row.index[e];
        col_row_[fill[j]] = r;
        col_val_[fill[j]] = row.value[e];
        ++fill[j];
      }
    }
  }

  SparseColumn column(int j) const {
    SparseColumn col;
    if (j < n_) {
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        if (col_val_[e] != 0.0) col.emplace_back(col_row_[e], col_val_[e]);
      }
    } else {
      col.emplace_back(j - n_, -1.0);
    }
    return col;
  }

  double nonbasic_value(int j) const {
    switch (status_[j]) {
      case VarStatus::AtLower: return lb_[j];
      case VarStatus::AtUpper: return ub_[j];
      default: return 0.0;
    }
  }

  VarStatus resting_status(int j, VarStatus wanted) const {
    const bool has_lb = lb_[j] > -kInfinity;
    const bool has_ub = ub_[j] < kInfinity;
    if (wanted == VarStatus::AtUpper && has_ub) return VarStatus::AtUpper;
    if (wanted == VarStatus::AtLower && has_lb) return VarStatus::AtLower;
    if (has_lb) return VarStatus::AtLower;
    if (has_ub) return VarStatus::AtUpper;
    return VarStatus::AtZero;
  }

  void initial_basis(const Basis* warm) {
    status_.assign(total_, VarStatus::AtLower);
    bool use_warm = warm != nullptr && !warm->empty() &&
                    static_cast<int>(warm->structural.size()) == n_ &&
                    static_cast<int>(warm->logical.size()) <= m_;
    if (use_warm) {
      for (int j = 0; j < n_; ++j) status_[j] = warm->structural[j];
      for (int r = 0; r < m_; ++r) {
        status_[n_ + r] = r < static_cast<int>(warm->logical.size())
                              ? warm->logical[r]
                              : VarStatus::Basic;
      }
      const long basic = std::count(status_.begin(), status_.end(), VarStatus::Basic);
      if (basic != m_) use_warm = false;
    }
    if (!use_warm) {
      for (int j = 0; j < n_; ++j) status_[j] = resting_status(j, VarStatus::AtLower);
      for (int r = 0; r < m_; ++r) status_[n_ + r] = VarStatus::Basic;
    }
    head_.clear();
    pos_of_.assign(total_, -1);
    x_.assign(total_, 0.0);
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::Basic) {
        pos_of_[j] = static_cast<int>(head_.size());
        head_.push_back(j);
      } else {
        status_[j] = resting_status(j, status_[j]);
        x_[j] = nonbasic_value(j);
      }
    }
  }

  void refactor() {
    for (int attempt = 0;; ++attempt) {
      std::vector<SparseColumn> cols(m_);
      for (int p = 0; p < m_; ++p) cols[p] = column(head_[p]);
      const auto def = lu_.factor(cols, opt_.factor_tol);
      if (def.positions.empty()) break;
      if (attempt >= 2 || def.positions.size() != def.free_rows.size()) {
        fail(ErrorCode::NumericalBreakdown, "basis factorization failed after repair");
      }
      // Swap structurally deficient columns for the logicals of unpivoted rows.
      for (std::size_t t = 0; t < def.positions.size(); ++t) {
        const int pos = def.positions[t];
        const int out = head_[pos];
        const int in = n_ + def.free_rows[t];
        const bool nearer_upper =
            ub_[out] < kInfinity &&
            (lb_[out] == -kInfinity || std::fabs(x_[out] - ub_[out]) < std::fabs(x_[out] - lb_[out]));
        status_[out] = resting_status(out, nearer_upper ? VarStatus::AtUpper : VarStatus::AtLower);
        x_[out] = nonbasic_value(out);
        pos_of_[out] = -1;
        head_[pos] = in;
        pos_of_[in] = pos;
        status_[in] = VarStatus::Basic;
      }
      ++repairs_;
    }
    etas_.clear();
    compute_basic_values();
  }

  void compute_basic_values() {
    std::vector<double> rhs(m_, 0.0);
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::Basic) continue;
      const double v = x_[j];
      if (v == 0.0) continue;
      if (j < n_) {
        for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) rhs[col_row_[e]] -= col_val_[e] * v;
      } else {
        rhs[j - n_] += v;
      }
    }
    ftran(rhs);
    for (int p = 0; p < m_; ++p) x_[head_[p]] = rhs[p];
  }

  void ftran(std::vector<double>& b) const {
    lu_.ftran(b);
    for (const Eta& eta : etas_) {
      const double yr = b[eta.pos] / eta.pivot;
      b[eta.pos] = yr;
      if (yr == 0.0) continue;
      for (const auto& [i, a] : eta.entries) b[i] -= a * yr;
    }
  }

  void btran(std::vector<double>& c) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double v = c[it->pos];
      for (const auto& [i, a] : it->entries) v -= a * c[i];
      c[it->pos] = v / it->pivot;
    }
    lu_.btran(c);
  }

  // Sum of bound violations of basic variables beyond the tolerance.
  bool primal_infeasible() const {
    for (int p = 0; p < m_; ++p) {
      const int j = head_[p];
      if (x_[j] < lb_[j] - opt_.feasibility_tol || x_[j] > ub_[j] + opt_.feasibility_tol) return true;
    }
    return false;
  }

  void basic_costs(bool phase1, std::vector<double>& cb) const {
    cb.assign(m_, 0.0);
    for (int p = 0; p < m_; ++p) {
      const int j = head_[p];
      if (phase1) {
        if (x_[j] < lb_[j] - opt_.feasibility_tol) cb[p] = -1.0;
        else if (x_[j] > ub_[j] + opt_.feasibility_tol) cb[p] = 1.0;
      } else {
        cb[p] = cost_[j];
      }
    }
  }

  double reduced_cost(int j, bool phase1, const std::vector<double>& pi) const {
    if (j >= n_) return pi[j - n_];
    double d = phase1 ? 0.0 : cost_[j];
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) d -= pi[col_row_[e]] * col_val_[e];
    return d;
  }

  // Entering candidate: returns -1 when no reduced cost is attractive.
  int price(bool phase1, const std::vector<double>& pi, bool bland, double& d_out) {
    const double tol = opt_.optimality_tol;
    score_.assign(total_, 0.0);
    d_.assign(total_, 0.0);
    bool any = false;
    for (int j = 0; j < total_; ++j) {
      const VarStatus st = status_[j];
      if (st == VarStatus::Basic) continue;
      if (lb_[j] == ub_[j]) continue;
      const double d = reduced_cost(j, phase1, pi);
      d_[j] = d;
      double s = 0.0;
      if (st == VarStatus::AtLower) s = d < -tol ? -d : 0.0;
      else if (st == VarStatus::AtUpper) s = d > tol ? d : 0.0;
      else s = std::fabs(d) > tol ? std::fabs(d) : 0.0;
      if (s > 0.0) {
        if (bland) {
          d_out = d;
          return j;
        }
        score_[j] = s;
        any = true;
      }
    }
    if (!any) return -1;
    const int q = static_cast<int>(kernels::active().argmax_abs(score_.data(), score_.size()));
    d_out = d_[q];
    return q;
  }

  LpStatus iterate() {
    std::vector<double> cb;
    std::vector<double> alpha;
    int degenerate_run = 0;
    int verify_passes = 0;
    while (true) {
      if (iterations_ >= max_iterations_) return LpStatus::IterationLimit;
      if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) refactor();
      if (!perturbed_ && perturb_rounds_ < 3 && degenerate_run >= opt_.perturb_after) {
        perturb();
        degenerate_run = 0;
      }

      const bool phase1 = primal_infeasible();
      basic_costs(phase1, cb);
      btran(cb);
      const bool bland = degenerate_run >= opt_.bland_after;
      double dq = 0.0;
      const int q = price(phase1, cb, bland, dq);
      if (q < 0) {
        if (!etas_.empty() || verify_passes == 0) {
          // Confirm on a fresh factorization before declaring a verdict.
          ++verify_passes;
          refactor();
          if (verify_passes < 4) continue;
        }
        if (perturbed_) {
          unperturb();
          verify_passes = 0;
          continue;
        }
        return phase1 ? LpStatus::Infeasible : LpStatus::Optimal;
      }
      verify_passes = 0;

      const double dir = (status_[q] == VarStatus::AtUpper || (status_[q] == VarStatus::AtZero && dq > 0.0)) ? -1.0 : 1.0;
      alpha.assign(m_, 0.0);
      for (const auto& [row, v] : column(q)) alpha[row] = v;
      ftran(alpha);

      int leave = -1;
      double theta = kInfinity;
      bool leave_upper = false;
      ratio_test(alpha, dir, phase1, bland, leave, theta, leave_upper);

      const double range = ub_[q] - lb_[q];
      const bool flip = std::isfinite(range) && range <= theta;
      if (leave < 0 && !flip) {
        if (!phase1) return LpStatus::Unbounded;
        // Phase 1 is bounded below; an unblocked ray means stale factors.
        if (++phase1_rays_ > 3) {
          fail(ErrorCode::NumericalBreakdown, "unblocked phase-1 direction");
        }
        refactor();
        continue;
      }
      const double step = flip ? range : theta;
      if (step != 0.0) {
        for (int p = 0; p < m_; ++p) {
          if (alpha[p] != 0.0) x_[head_[p]] -= dir * step * alpha[p];
        }
      }
      if (step * std::fabs(dq) <= 1e-9) ++degenerate_run;
      else degenerate_run = 0;
      ++iterations_;

      if (flip) {
        status_[q] = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
        x_[q] = nonbasic_value(q);
        continue;
      }
      x_[q] += dir * step;
      const int out = head_[leave];
      status_[out] = leave_upper ? VarStatus::AtUpper : VarStatus::AtLower;
      if (lb_[out] == ub_[out]) status_[out] = VarStatus::AtLower;
      x_[out] = nonbasic_value(out);
      pos_of_[out] = -1;
      head_[leave] = q;
      pos_of_[q] = leave;
      status_[q] = VarStatus::Basic;

      Eta eta;
      eta.pos = leave;
      eta.pivot = alpha[leave];
      for (int p = 0; p < m_; ++p) {
        if (p != leave && alpha[p] != 0.0) eta.entries.emplace_back(p, alpha[p]);
      }
      etas_.push_back(std::move(eta));
    }
  }

  // Widens every finite bound by a small pseudo-random amount so that
  // degenerate vertices split apart. Undone before any verdict.
  void perturb() {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL + static_cast<unsigned>(perturb_rounds_));
    std::uniform_real_distribution<double> u(0.5, 1.0);
    const double scale = 1e-6 / static_cast<double>(1 << (2 * perturb_rounds_));
    for (int j = 0; j < total_; ++j) {
      if (lb_[j] > -kInfinity) lb_[j] -= scale * (1.0 + std::fabs(lb_[j])) * u(rng);
      if (ub_[j] < kInfinity) ub_[j] += scale * (1.0 + std::fabs(ub_[j])) * u(rng);
      if (status_[j] != VarStatus::Basic) x_[j] = nonbasic_value(j);
    }
    perturbed_ = true;
    ++perturb_rounds_;
    refactor();
  }

  void unperturb() {
    lb_ = lb0_;
    ub_ = ub0_;
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::Basic) continue;
      status_[j] = resting_status(j, status_[j]);
      x_[j] = nonbasic_value(j);
    }
    perturbed_ = false;
    refactor();
  }

  void ratio_test(const std::vector<double>& alpha, double dir, bool phase1, bool bland,
                  int& leave, double& theta, bool& leave_upper) const {
    const double ftol = opt_.feasibility_tol;
    struct Candidate {
      int pos;
      double limit;
      bool upper;
    };
    std::vector<Candidate> cands;
    for (int p = 0; p < m_; ++p) {
      const double a = alpha[p];
      if (std::fabs(a) <= opt_.pivot_tol) continue;
      const double rate = -dir * a;
      const int j = head_[p];
      const double xv = x_[j];
      double target;
      bool upper;
      if (rate < 0.0) {
        if (phase1 && xv < lb_[j] - ftol) continue;
        upper = phase1 && xv > ub_[j] + ftol;
        target = upper ? ub_[j] : lb_[j];
        if (target == -kInfinity) continue;
      } else {
        if (phase1 && xv > ub_[j] + ftol) continue;
        upper = !(phase1 && xv < lb_[j] - ftol);
        target = upper ? ub_[j] : lb_[j];
        if (target == kInfinity) continue;
      }
      const double gap = std::max(0.0, rate < 0.0 ? xv - target : target - xv);
      const double limit = gap / std::fabs(rate);
      cands.push_back({p, limit, upper});
    }
    if (cands.empty()) return;
    if (bland) {
      double best = kInfinity;
      for (const auto& c : cands) best = std::min(best, c.limit);
      int best_var = -1;
      for (const auto& c : cands) {
        if (c.limit <= best && (best_var < 0 || head_[c.pos] < best_var)) {
          best_var = head_[c.pos];
          leave = c.pos;
          theta = c.limit;
          leave_upper = c.upper;
        }
      }
      return;
    }
    // Smallest ratio; near ties go to the largest pivot.
    double best = kInfinity;
    for (const auto& c : cands) best = std::min(best, c.limit);
    double best_pivot = -1.0;
    for (const auto& c : cands) {
      if (c.limit > best + 1e-12) continue;
      const double piv = std::fabs(alpha[c.pos]);
      if (piv > best_pivot) {
        best_pivot = piv;
        leave = c.pos;
        theta = c.limit;
        leave_upper = c.upper;
      }
    }
  }

  void finish(LpResult& result) {
    result.x.assign(x_.begin(), x_.begin() + n_);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
    result.objective = obj;
    result.row_activity.assign(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
        result.row_activity[col_row_[e]] += col_val_[e] * x_[j];
      }
    }
    std::vector<double> pi;
    basic_costs(false, pi);
    btran(pi);
    result.duals = pi;
    result.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      result.reduced_costs[j] = status_[j] == VarStatus::Basic ? 0.0 : reduced_cost(j, false, pi);
    }
    result.basis.structural.assign(status_.begin(), status_.begin() + n_);
    result.basis.logical.assign(status_.begin() + n_, status_.end());
  }

  const LinearProgram& lp_;
  LpOptions opt_;
  int n_, m_, total_;
  long max_iterations_ = 0;
  long iterations_ = 0;
  int repairs_ = 0;
  bool perturbed_ = false;
  int perturb_rounds_ = 0;
  std::vector<double> lb0_, ub0_;
  int phase1_rays_ = 0;

  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<double> cost_, lb_, ub_, x_;
  std::vector<VarStatus> status_;
  std::vector<int> head_, pos_of_;
  DenseLu lu_;
  std::vector<Eta> etas_;
  std::vector<double> score_, d_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const Basis* warm, const LpOptions& options) {
  lp.validate();
  Simplex simplex(lp, options);
  return simplex.run(warm);
}

}  // namespace hublab
