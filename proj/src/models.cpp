#include "hublab/models.hpp"

#include <algorithm>
#include <cmath>

#include "hublab/error.hpp"

namespace hublab {

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::F4: return "f4";
    case Formulation::F3: return "f3";
    case Formulation::F1P: return "1p-f";
    case Formulation::F1PD: return "1p-fd";
    case Formulation::SAHLP_F3: return "sahlp";
  }
  return "unknown";
}

namespace {

std::string name(const char* base, std::initializer_list<int> idx) {
  std::string s = base;
  for (int v : idx) s += "_" + std::to_string(v);
  return s;
}

class Builder {
 public:
  explicit Builder(MipModel& model) : m_(model) {}

  int binary(const std::string& n, double cost = 0.0) {
    const int j = m_.lp.add_variable(cost, 0.0, 1.0, n);
    m_.integer.push_back(1);
    return j;
  }
  int continuous(const std::string& n, double cost, double lb, double ub) {
    const int j = m_.lp.add_variable(cost, lb, ub, n);
    m_.integer.push_back(0);
    return j;
  }
  void row(const std::string& n, std::vector<int> idx, std::vector<double> val, Sense sense,
           double rhs) {
    Row r;
    r.index = std::move(idx);
    r.value = std::move(val);
    r.sense = sense;
    r.rhs = rhs;
    m_.lp.add_row(std::move(r), n);
  }

 private:
  MipModel& m_;
};

void init_map(VarMap& v, const Instance& inst) {
  v.o = inst.o();
  v.d = inst.d();
  v.h = inst.h();
}

// Hub rows shared by F4 and F3: (y), (xo), (xd), (r), (s).
void add_location_block(Builder& b, MipModel& model, const Instance& inst, int r_lim, int s_lim) {
  auto& v = model.vars;
  const int o = inst.o(), d = inst.d(), h = inst.h();
  v.y.resize(h);
  for (int k = 0; k < h; ++k) v.y[k] = b.binary(name("y", {k}));
  v.x_o.resize(o * h);
  for (int i = 0; i < o; ++i)
    for (int k = 0; k < h; ++k) v.x_o[i * h + k] = b.binary(name("xo", {i, k}));
  v.x_d.resize(d * h);
  for (int j = 0; j < d; ++j)
    for (int m = 0; m < h; ++m) v.x_d[j * h + m] = b.binary(name("xd", {j, m}));

  b.row("hubs", v.y, std::vector<double>(h, 1.0), Sense::LessEqual, inst.p());
  for (int i = 0; i < o; ++i)
    for (int k = 0; k < h; ++k)
      b.row(name("xo_y", {i, k}), {v.x_o[i * h + k], v.y[k]}, {1.0, -1.0}, Sense::LessEqual, 0.0);
  for (int j = 0; j < d; ++j)
    for (int m = 0; m < h; ++m)
      b.row(name("xd_y", {j, m}), {v.x_d[j * h + m], v.y[m]}, {1.0, -1.0}, Sense::LessEqual, 0.0);

  auto range_rows = [&](const char* base, const std::vector<int>& cols, int count, int limit) {
    for (int a = 0; a < count; ++a) {
      std::vector<int> idx(cols.begin() + a * h, cols.begin() + (a + 1) * h);
      const std::vector<double> ones(h, 1.0);
      if (limit == 1) {
        b.row(name(base, {a}), idx, ones, Sense::Equal, 1.0);
      } else {
        b.row(name(base, {a}) + "_lo", idx, ones, Sense::GreaterEqual, 1.0);
        b.row(name(base, {a}) + "_hi", idx, ones, Sense::LessEqual, limit);
      }
    }
  };
  range_rows("alloc_o", v.x_o, o, r_lim);
  range_rows("alloc_d", v.x_d, d, s_lim);
}

MipModel build_f3_impl(const Instance& inst, int r_lim, int s_lim, Formulation form) {
  MipModel model;
  model.form = form;
  model.p = inst.p();
  init_map(model.vars, inst);
  Builder b(model);
  add_location_block(b, model, inst, r_lim, s_lim);
  auto& v = model.vars;
  const int o = inst.o(), d = inst.d(), h = inst.h();
  const std::size_t odh = static_cast<std::size_t>(o) * d * h;
  v.z_o.resize(odh);
  v.z_d.resize(odh);
  v.mu.resize(static_cast<std::size_t>(o) * d);
  for (int i = 0; i < o; ++i)
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < h; ++k) v.z_o[(i * d + j) * h + k] = b.binary(name("zo", {i, j, k}));
      for (int m = 0; m < h; ++m) v.z_d[(i * d + j) * h + m] = b.binary(name("zd", {i, j, m}));
    }
  for (int i = 0; i < o; ++i)
    for (int j = 0; j < d; ++j) v.mu[i * d + j] = b.continuous(name("mu", {i, j}), 1.0, 0.0, kInfinity);

  const std::vector<double> ones(h, 1.0);
  std::vector<double> row_k(h), row_l(h);
  for (int i = 0; i < o; ++i)
    for (int j = 0; j < d; ++j) {
      const std::size_t base = (static_cast<std::size_t>(i) * d + j) * h;
      std::vector<int> zo(v.z_o.begin() + base, v.z_o.begin() + base + h);
      std::vector<int> zd(v.z_d.begin() + base, v.z_d.begin() + base + h);
      b.row(name("zo1", {i, j}), zo, ones, Sense::Equal, 1.0);
      b.row(name("zd1", {i, j}), zd, ones, Sense::Equal, 1.0);
      for (int k = 0; k < h; ++k)
        b.row(name("zxo", {i, j, k}), {zo[k], v.x_o[i * h + k]}, {1.0, -1.0}, Sense::LessEqual, 0.0);
      for (int m = 0; m < h; ++m)
        b.row(name("zxd", {i, j, m}), {zd[m], v.x_d[j * h + m]}, {1.0, -1.0}, Sense::LessEqual, 0.0);
      // mu_ij >= sum_m C_ijkm zd_ijm - sum_{l != k} max_m (C_ijkm - C_ijlm) zo_ijl
      for (int k = 0; k < h; ++k) {
        for (int m = 0; m < h; ++m) row_k[m] = inst.cost_at(i, j, k, m);
        std::vector<int> idx{v.mu[i * d + j]};
        std::vector<double> val{1.0};
        for (int m = 0; m < h; ++m) {
          if (row_k[m] == 0.0) continue;
          idx.push_back(zd[m]);
          val.push_back(-row_k[m]);
        }
        for (int l = 0; l < h; ++l) {
          if (l == k) continue;
          double mx = -kInfinity;
          for (int m = 0; m < h; ++m) mx = std::max(mx, row_k[m] - inst.cost_at(i, j, l, m));
          if (mx == 0.0) continue;
          idx.push_back(zo[l]);
          val.push_back(mx);
        }
        b.row(name("tela", {i, j, k}), idx, val, Sense::GreaterEqual, 0.0);
      }
    }
  return model;
}

void require_single_origin(const Instance& inst) {
  if (inst.r() != 1) {
    fail(ErrorCode::RequiresSingleOriginAllocation,
         "(1,p) models need r = 1, got r = " + std::to_string(inst.r()));
  }
}

// Common (1,p) skeleton: y, x, z and rows (hubs), (x), (x1), (zy), (z1).
void add_1p_block(Builder& b, MipModel& model, const Instance& inst, const double* collection) {
  auto& v = model.vars;
  const int o = inst.o(), d = inst.d(), h = inst.h();
  v.y.resize(h);
  for (int k = 0; k < h; ++k) v.y[k] = b.binary(name("y", {k}));
  v.x.resize(o * h);
  for (int i = 0; i < o; ++i)
    for (int k = 0; k < h; ++k)
      v.x[i * h + k] = b.binary(name("x", {i, k}), collection ? collection[i * h + k] : 0.0);
  v.z.resize(static_cast<std::size_t>(o) * d * h);
  for (int i = 0; i < o; ++i)
    for (int j = 0; j < d; ++j)
      for (int m = 0; m < h; ++m) v.z[(i * d + j) * h + m] = b.binary(name("z", {i, j, m}));

  b.row("hubs", v.y, std::vector<double>(h, 1.0), Sense::LessEqual, inst.p());
  for (int i = 0; i < o; ++i)
    for (int k = 0; k < h; ++k)
      b.row(name("x_y", {i, k}), {v.x[i * h + k], v.y[k]}, {1.0, -1.0}, Sense::LessEqual, 0.0);
  const std::vector<double> ones(h, 1.0);
  for (int i = 0; i < o; ++i) {
    std::vector<int> idx(v.x.begin() + i * h, v.x.begin() + (i + 1) * h);
    b.row(name("x1", {i}), idx, ones, Sense::Equal, 1.0);
  }
  for (int m = 0; m < h; ++m) {
    std::vector<int> idx;
    std::vector<double> val;
    for (int i = 0; i < o; ++i)
      for (int j = 0; j < d; ++j) {
        idx.push_back(v.z[(i * d + j) * h + m]);
        val.push_back(1.0);
      }
    idx.push_back(v.y[m]);
    val.push_back(-static_cast<double>(o) * d);
    b.row(name("zy", {m}), idx, val, Sense::LessEqual, 0.0);
  }
  for (int i = 0; i < o; ++i)
    for (int j = 0; j < d; ++j) {
      const std::size_t base = (static_cast<std::size_t>(i) * d + j) * h;
      std::vector<int> idx(v.z.begin() + base, v.z.begin() + base + h);
      b.row(name("z1", {i, j}), idx, ones, Sense::Equal, 1.0);
    }
}

// obj_i >= sum_j (sum_m T_ijkm z_ijm + M_ijk (x_ik - 1)) per (i, k).
template <class Cost>
void add_bigm_rows(Builder& b, const MipModel& model, const Instance& inst, const std::vector<int>& obj,
                   const BigM& bigm, const char* base, Cost cost) {
  const auto& v = model.vars;
  const int o = inst.o(), d = inst.d(), h = inst.h();
  for (int i = 0; i < o; ++i)
    for (int k = 0; k < h; ++k) {
      std::vector<int> idx{obj[i]};
      std::vector<double> val{1.0};
      double msum = 0.0;
      for (int j = 0; j < d; ++j) msum += bigm.at(i, j, k);
      if (msum != 0.0) {
        idx.push_back(v.x[i * h + k]);
        val.push_back(-msum);
      }
      for (int j = 0; j < d; ++j)
        for (int m = 0; m < h; ++m) {
          const double c = cost(i, j, k, m);
          if (c == 0.0) continue;
          idx.push_back(v.z[(i * d + j) * h + m]);
          val.push_back(-c);
        }
      b.row(name(base, {i, k}), idx, val, Sense::GreaterEqual, -msum);
    }
}

}  // namespace

BigM compute_bigm(const Instance& inst, BigMMode mode) {
  BigM out;
  out.o = inst.o();
  out.d = inst.d();
  out.h = inst.h();
  const int h = inst.h();
  const int pos = h - inst.p();  // (h-p+1)-th smallest, 0-based
  out.M.resize(static_cast<std::size_t>(out.o) * out.d * h);
  std::vector<double> vals(h);
  for (int i = 0; i < out.o; ++i)
    for (int j = 0; j < out.d; ++j)
      for (int k = 0; k < h; ++k) {
        for (int m = 0; m < h; ++m) {
          vals[m] = mode == BigMMode::Full ? inst.cost_at(i, j, k, m)
                                           : inst.transfer_distribution_cost(i, j, k, m);
        }
        std::nth_element(vals.begin(), vals.begin() + pos, vals.end());
        out.M[(static_cast<std::size_t>(i) * out.d + j) * h + k] = vals[pos];
      }
  return out;
}

MipModel build_f4(const Instance& inst, bool relax_X) {
  MipModel model;
  model.form = Formulation::F4;
  model.p = inst.p();
  init_map(model.vars, inst);
  Builder b(model);
  add_location_block(b, model, inst, inst.r(), inst.s());
  auto& v = model.vars;
  const int o = inst.o(), d = inst.d(), h = inst.h();
  v.X.resize(static_cast<std::size_t>(o) * d * h * h);
  for (int i = 0; i < o; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < h; ++k)
        for (int m = 0; m < h; ++m) {
          const std::string n = name("X", {i, j, k, m});
          const double c = inst.cost_at(i, j, k, m);
          v.X[((static_cast<std::size_t>(i) * d + j) * h + k) * h + m] =
              relax_X ? b.continuous(n, c, 0.0, 1.0) : b.binary(n, c);
        }
  auto X = [&](int i, int j, int k, int m) {
    return v.X[((static_cast<std::size_t>(i) * d + j) * h + k) * h + m];
  };
  for (int i = 0; i < o; ++i)
    for (int j = 0; j < d; ++j) {
      std::vector<int> all;
      for (int k = 0; k < h; ++k)
        for (int m = 0; m < h; ++m) all.push_back(X(i, j, k, m));
      b.row(name("X1", {i, j}), all, std::vector<double>(all.size(), 1.0), Sense::Equal, 1.0);
      for (int m = 0; m < h; ++m) {
        std::vector<int> idx;
        for (int k = 0; k < h; ++k) idx.push_back(X(i, j, k, m));
        std::vector<double> val(h, 1.0);
        idx.push_back(v.x_d[j * h + m]);
        val.push_back(-1.0);
        b.row(name("Xxd", {i, j, m}), idx, val, Sense::LessEqual, 0.0);
      }
      for (int k = 0; k < h; ++k) {
        std::vector<int> idx;
        for (int m = 0; m < h; ++m) idx.push_back(X(i, j, k, m));
        std::vector<double> val(h, 1.0);
        idx.push_back(v.x_o[i * h + k]);
        val.push_back(-1.0);
        b.row(name("Xxo", {i, j, k}), idx, val, Sense::LessEqual, 0.0);
      }
    }
  return model;
}

MipModel build_f3(const Instance& inst) {
  return build_f3_impl(inst, inst.r(), inst.s(), Formulation::F3);
}

MipModel build_1p_f(const Instance& inst) {
  require_single_origin(inst);
  return build_1p_f(inst, compute_bigm(inst, BigMMode::Full));
}

MipModel build_1p_f(const Instance& inst, const BigM& bigm) {
  require_single_origin(inst);
  MipModel model;
  model.form = Formulation::F1P;
  model.p = inst.p();
  init_map(model.vars, inst);
  Builder b(model);
  add_1p_block(b, model, inst, nullptr);
  auto& v = model.vars;
  v.pi.resize(inst.o());
  for (int i = 0; i < inst.o(); ++i) v.pi[i] = b.continuous(name("pi", {i}), 1.0, 0.0, kInfinity);
  add_bigm_rows(b, model, inst, v.pi, bigm, "idea",
                [&](int i, int j, int k, int m) { return inst.cost_at(i, j, k, m); });
  return model;
}

MipModel build_1p_fd(const Instance& inst) {
  const auto* dc = inst.disaggregated();
  if (dc == nullptr) {
    fail(ErrorCode::RequiresDisaggregatedCosts, "1p-fd needs a disaggregated cost model");
  }
  require_single_origin(inst);
  const int o = inst.o(), d = inst.d(), h = inst.h();
  std::vector<double> collection(static_cast<std::size_t>(o) * h);
  for (int i = 0; i < o; ++i) {
    double wsum = 0.0;
    for (int j = 0; j < d; ++j) wsum += dc->w[i * d + j];
    for (int k = 0; k < h; ++k) {
      collection[i * h + k] =
          dc->legs.gamma * dc->dist(dc->origin_site[i], dc->hub_site[k]) * wsum;
    }
  }
  MipModel model;
  model.form = Formulation::F1PD;
  model.p = inst.p();
  init_map(model.vars, inst);
  Builder b(model);
  add_1p_block(b, model, inst, collection.data());
  auto& v = model.vars;
  v.delta.resize(o);
  for (int i = 0; i < o; ++i) v.delta[i] = b.continuous(name("delta", {i}), 1.0, 0.0, kInfinity);
  add_bigm_rows(b, model, inst, v.delta, compute_bigm(inst, BigMMode::TransferDistribution),
                "idead", [&](int i, int j, int k, int m) {
                  return inst.transfer_distribution_cost(i, j, k, m);
                });
  return model;
}

MipModel build_sahlp(const Instance& inst) {
  if (!inst.identical_sets()) {
    fail(ErrorCode::RequiresIdenticalSets, "SAHLP needs O = D = H");
  }
  MipModel model = build_f3_impl(inst, 1, 1, Formulation::SAHLP_F3);
  Builder b(model);
  const auto& v = model.vars;
  const int h = inst.h();
  for (int i = 0; i < inst.o(); ++i)
    for (int k = 0; k < h; ++k)
      b.row(name("couple", {i, k}), {v.x_o[i * h + k], v.x_d[i * h + k]}, {1.0, -1.0},
            Sense::Equal, 0.0);
  return model;
}

MipModel build_model(const Instance& inst, Formulation form) {
  switch (form) {
    case Formulation::F4: return build_f4(inst);
    case Formulation::F3: return build_f3(inst);
    case Formulation::F1P: return build_1p_f(inst);
    case Formulation::F1PD: return build_1p_fd(inst);
    case Formulation::SAHLP_F3: return build_sahlp(inst);
  }
  fail(ErrorCode::InvalidProgram, "unknown formulation");
}

namespace {

constexpr double kIntTol = 1e-6;

bool on(const std::vector<double>& x, int col) { return x[col] > 0.5; }

std::vector<int> members(const std::vector<double>& x, const std::vector<int>& cols, int a, int h) {
  std::vector<int> out;
  for (int k = 0; k < h; ++k)
    if (on(x, cols[a * h + k])) out.push_back(k);
  return out;
}

}  // namespace

Extraction decode_solution(const MipModel& model, const Instance& inst,
                           const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != model.lp.num_vars()) {
    fail(ErrorCode::FractionalSolution, "point dimension does not match the model");
  }
  for (int j = 0; j < model.lp.num_vars(); ++j) {
    if (model.integer[j] && std::fabs(x[j] - std::round(x[j])) > kIntTol) {
      fail(ErrorCode::FractionalSolution,
           "column " + (model.lp.col_names.empty() ? std::to_string(j) : model.lp.col_names[j]) +
               " = " + std::to_string(x[j]));
    }
  }
  const auto& v = model.vars;
  const int o = inst.o(), d = inst.d(), h = inst.h();
  Extraction ex;
  double obj = 0.0;
  for (int j = 0; j < model.lp.num_vars(); ++j) obj += model.lp.objective[j] * x[j];
  ex.model_objective = obj;

  std::vector<int> hubs;
  for (int k = 0; k < h; ++k)
    if (on(x, v.y[k])) hubs.push_back(k);

  std::vector<std::vector<int>> osets(o), dsets(d);
  AllocationLimits limits{inst.r(), inst.s()};
  switch (model.form) {
    case Formulation::F4:
    case Formulation::F3:
    case Formulation::SAHLP_F3:
      for (int i = 0; i < o; ++i) osets[i] = members(x, v.x_o, i, h);
      for (int j = 0; j < d; ++j) dsets[j] = members(x, v.x_d, j, h);
      if (model.form == Formulation::SAHLP_F3) limits = {1, 1};
      break;
    case Formulation::F1P:
    case Formulation::F1PD: {
      for (int i = 0; i < o; ++i) {
        int best = 0;
        for (int k = 1; k < h; ++k)
          if (x[v.x[i * h + k]] > x[v.x[i * h + best]]) best = k;
        osets[i] = {best};
      }
      std::vector<std::vector<char>> used(d, std::vector<char>(h, 0));
      for (int i = 0; i < o; ++i)
        for (int j = 0; j < d; ++j)
          for (int m = 0; m < h; ++m)
            if (on(x, v.at_ijm(v.z, i, j, m))) used[j][m] = 1;
      for (int j = 0; j < d; ++j)
        for (int m = 0; m < h; ++m)
          if (used[j][m]) dsets[j].push_back(m);
      limits = {1, std::max(inst.p(), 1)};
      break;
    }
  }
  ex.solution = evaluate(inst, hubs, osets, dsets, limits);
  ex.mismatch = std::fabs(ex.solution.objective - obj) > 1e-6;
  return ex;
}

HubSolution extract_solution(const MipModel& model, const Instance& inst,
                             const std::vector<double>& values) {
  auto ex = decode_solution(model, inst, values);
  if (ex.mismatch) {
    fail(ErrorCode::ObjectiveMismatch, "model objective " + format_double(ex.model_objective) +
                                           " vs evaluated " + format_double(ex.solution.objective));
  }
  return std::move(ex.solution);
}

std::vector<double> solution_to_point(const MipModel& model, const Instance& inst,
                                      const HubSolution& sol) {
  const auto& v = model.vars;
  const int o = inst.o(), d = inst.d(), h = inst.h();
  std::vector<double> x(model.lp.num_vars(), 0.0);
  for (int k : sol.hubs) x[v.y[k]] = 1.0;
  std::vector<int> carriers;
  switch (model.form) {
    case Formulation::F4:
    case Formulation::F3:
    case Formulation::SAHLP_F3:
      for (int i = 0; i < o; ++i)
        for (int k : sol.origin_sets[i]) x[v.x_o[i * h + k]] = 1.0;
      for (int j = 0; j < d; ++j)
        for (int m : sol.dest_sets[j]) x[v.x_d[j * h + m]] = 1.0;
      for (int i = 0; i < o; ++i)
        for (int j = 0; j < d; ++j) {
          const auto [k, m] = sol.route(i, j, d);
          if (model.form == Formulation::F4) {
            x[v.X[((static_cast<std::size_t>(i) * d + j) * h + k) * h + m]] = 1.0;
          } else {
            x[v.at_ijm(v.z_o, i, j, k)] = 1.0;
            x[v.at_ijm(v.z_d, i, j, m)] = 1.0;
          }
        }
      carriers = v.mu;
      break;
    case Formulation::F1P:
    case Formulation::F1PD:
      for (int i = 0; i < o; ++i) x[v.x[i * h + sol.origin_sets[i][0]]] = 1.0;
      for (int i = 0; i < o; ++i)
        for (int j = 0; j < d; ++j) x[v.at_ijm(v.z, i, j, sol.route(i, j, d).second)] = 1.0;
      carriers = model.form == Formulation::F1P ? v.pi : v.delta;
      break;
  }
  // Carriers sit at the smallest value satisfying every >= row they appear in.
  std::vector<char> is_carrier(x.size(), 0);
  for (int c : carriers) is_carrier[c] = 1;
  for (const Row& row : model.lp.rows) {
    if (row.sense != Sense::GreaterEqual) continue;
    int carrier = -1;
    double rest = 0.0;
    for (std::size_t e = 0; e < row.index.size(); ++e) {
      if (is_carrier[row.index[e]] && row.value[e] == 1.0) carrier = row.index[e];
      else rest += row.value[e] * x[row.index[e]];
    }
    if (carrier >= 0) x[carrier] = std::max(x[carrier], row.rhs - rest);
  }
  return x;
}

}  // namespace hublab
