#include <algorithm>
#include <cmath>
#include <thread>

#include "hublab/bnc.hpp"
#include "hublab/error.hpp"
#include "hublab/transport.hpp"

namespace hublab {

void set_cut_families(CutPolicy& policy, const std::string& which) {
  if (which == "none") {
    policy.use_zy2 = policy.use_cortes = false;
  } else if (which == "zy2") {
    policy.use_zy2 = true;
    policy.use_cortes = false;
  } else if (which == "cortes") {
    policy.use_zy2 = false;
    policy.use_cortes = true;
  } else if (which == "both") {
    policy.use_zy2 = policy.use_cortes = true;
  } else {
    fail(ErrorCode::ParameterRange, "unknown cut selection '" + which + "'");
  }
}

std::vector<Cut> separate_zy2(const std::vector<double>& point, const MipModel& model,
                              const CutPolicy& policy) {
  std::vector<Cut> cuts;
  const auto& v = model.vars;
  if (v.z.empty() || v.y.empty()) return cuts;
  for (int i = 0; i < v.o; ++i)
    for (int j = 0; j < v.d; ++j)
      for (int m = 0; m < v.h; ++m) {
        const int zc = v.at_ijm(v.z, i, j, m);
        const double viol = point[zc] - point[v.y[m]];
        if (viol <= policy.violation_tol) continue;
        Cut c;
        c.row.index = {v.y[m], zc};
        c.row.value = {1.0, -1.0};
        c.row.sense = Sense::GreaterEqual;
        c.row.rhs = 0.0;
        c.family = CutFamily::ZY2;
        c.violation = viol;
        cuts.push_back(std::move(c));
      }
  return cuts;
}

namespace {

double pair_cost(const MipModel& model, const Instance& inst, int i, int j, int k, int m) {
  return model.form == Formulation::F1PD ? inst.transfer_distribution_cost(i, j, k, m)
                                         : inst.cost_at(i, j, k, m);
}

std::vector<double> normalized(std::vector<double> v) {
  double total = 0.0;
  for (auto& a : v) {
    a = std::max(a, 0.0);
    total += a;
  }
  if (total > 0.0)
    for (auto& a : v) a /= total;
  return v;
}

// max e.s + f.d  s.t.  e_k + f_m <= c_km, solved as a minimization.
PairDuals dual_by_lp(const TransportInstance& tp) {
  const int h = tp.rows();
  LinearProgram lp;
  for (int k = 0; k < h; ++k) lp.add_variable(-tp.supplies[k], -kInfinity, kInfinity);
  for (int m = 0; m < h; ++m) lp.add_variable(-tp.demands[m], -kInfinity, kInfinity);
  for (int k = 0; k < h; ++k)
    for (int m = 0; m < h; ++m) {
      Row r;
      r.index = {k, h + m};
      r.value = {1.0, 1.0};
      r.sense = Sense::LessEqual;
      r.rhs = tp.cost(k, m);
      lp.add_row(std::move(r));
    }
  const auto res = solve_lp(lp);
  if (res.status != LpStatus::Optimal) {
    fail(ErrorCode::NumericalBreakdown, "dual transportation LP ended " + to_string(res.status));
  }
  PairDuals out;
  out.e.assign(res.x.begin(), res.x.begin() + h);
  out.f.assign(res.x.begin() + h, res.x.end());
  out.value = -res.objective;
  return out;
}

}  // namespace

PairDuals cortes_pair_duals(const std::vector<double>& point, const MipModel& model,
                            const Instance& inst, int i, int j, CortesBackend backend) {
  const auto& v = model.vars;
  const int h = v.h;
  TransportInstance tp;
  std::vector<double> s(h), dm(h);
  for (int k = 0; k < h; ++k) s[k] = point[v.x[i * h + k]];
  for (int m = 0; m < h; ++m) dm[m] = point[v.at_ijm(v.z, i, j, m)];
  // Simplex noise leaves totals a few ulps off one; rescale both sides.
  tp.supplies = normalized(std::move(s));
  tp.demands = normalized(std::move(dm));
  tp.costs.resize(static_cast<std::size_t>(h) * h);
  for (int k = 0; k < h; ++k)
    for (int m = 0; m < h; ++m) tp.costs[k * h + m] = pair_cost(model, inst, i, j, k, m);
  if (backend == CortesBackend::Lp) return dual_by_lp(tp);
  auto du = solve_transport(tp);
  return PairDuals{std::move(du.e), std::move(du.f), du.objective};
}

std::vector<Cut> separate_cortes(const std::vector<double>& point, const MipModel& model,
                                 const Instance& inst, const CutPolicy& policy) {
  std::vector<Cut> out;
  if (model.form != Formulation::F1P && model.form != Formulation::F1PD) return out;
  const auto& v = model.vars;
  const int o = v.o, d = v.d, h = v.h;
  const auto& carrier = model.form == Formulation::F1P ? v.pi : v.delta;

  std::vector<std::optional<Cut>> per_origin(o);
  auto work = [&](int i) {
    std::vector<double> ecoef(h, 0.0);
    std::vector<double> fcoef(static_cast<std::size_t>(d) * h, 0.0);
    for (int j = 0; j < d; ++j) {
      const auto du = cortes_pair_duals(point, model, inst, i, j, policy.backend);
      for (int k = 0; k < h; ++k) ecoef[k] += du.e[k];
      for (int m = 0; m < h; ++m) fcoef[j * h + m] = du.f[m];
    }
    double rhs_at_point = 0.0;
    for (int k = 0; k < h; ++k) rhs_at_point += ecoef[k] * point[v.x[i * h + k]];
    for (int j = 0; j < d; ++j)
      for (int m = 0; m < h; ++m) rhs_at_point += fcoef[j * h + m] * point[v.at_ijm(v.z, i, j, m)];
    const double viol = rhs_at_point - point[carrier[i]];
    if (viol <= policy.violation_tol) return;
    Cut c;
    c.family = CutFamily::CORTES;
    c.origin = i;
    c.violation = viol;
    c.row.sense = Sense::GreaterEqual;
    c.row.rhs = 0.0;
    c.row.index.push_back(carrier[i]);
    c.row.value.push_back(1.0);
    for (int k = 0; k < h; ++k) {
      if (ecoef[k] == 0.0) continue;
      c.row.index.push_back(v.x[i * h + k]);
      c.row.value.push_back(-ecoef[k]);
    }
    for (int j = 0; j < d; ++j)
      for (int m = 0; m < h; ++m) {
        if (fcoef[j * h + m] == 0.0) continue;
        c.row.index.push_back(v.at_ijm(v.z, i, j, m));
        c.row.value.push_back(-fcoef[j * h + m]);
      }
    per_origin[i] = std::move(c);
  };

  const int threads = std::max(1, std::min(policy.threads, o));
  if (threads == 1) {
    for (int i = 0; i < o; ++i) work(i);
  } else {
    // Static interleaved partition; results merge in origin order.
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int i = t; i < o; i += threads) work(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  for (auto& c : per_origin)
    if (c) out.push_back(std::move(*c));
  return out;
}

double max_cut_violation(const std::vector<Cut>& cuts, const std::vector<double>& point) {
  double worst = 0.0;
  for (const auto& c : cuts) {
    double act = 0.0;
    for (std::size_t e = 0; e < c.row.index.size(); ++e) act += c.row.value[e] * point[c.row.index[e]];
    worst = std::max(worst, c.row.rhs - act);
  }
  return worst;
}

}  // namespace hublab
