#include "hublab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "hublab/error.hpp"
#include "hublab/kernels.hpp"

namespace hublab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check(TransportInstance& tp) {
  const std::size_t cells = tp.supplies.size() * tp.demands.size();
  if (tp.costs.size() != cells) {
    fail(ErrorCode::Unbalanced, "cost matrix has " + std::to_string(tp.costs.size()) +
                                    " entries, expected " + std::to_string(cells));
  }
  for (double c : tp.costs) {
    if (!std::isfinite(c)) fail(ErrorCode::Unbalanced, "non-finite cost");
  }
  double total_s = 0.0;
  double total_d = 0.0;
  auto clamp = [](std::vector<double>& v, double& total, const char* what) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!std::isfinite(v[k]) || v[k] < -kBalanceTol) {
        fail(ErrorCode::NegativeMass, std::string(what) + " " + std::to_string(k) + " is negative");
      }
      v[k] = std::max(v[k], 0.0);
      total += v[k];
    }
  };
  clamp(tp.supplies, total_s, "supply");
  clamp(tp.demands, total_d, "demand");
  if (std::fabs(total_s - total_d) > kBalanceTol) {
    fail(ErrorCode::Unbalanced, "supply " + std::to_string(total_s) + " vs demand " +
                                    std::to_string(total_d));
  }
}

// Successive shortest paths with node potentials on the complete bipartite
// residual graph. Returns potentials (phi_row, phi_col) and the flow.
struct Ssp {
  const TransportInstance& tp;
  int R, C;
  std::vector<double> flow, phi_row, phi_col;

  explicit Ssp(const TransportInstance& t) : tp(t), R(t.rows()), C(t.cols()) {
    flow.assign(static_cast<std::size_t>(R) * C, 0.0);
    phi_row.assign(R, 0.0);
    phi_col.assign(C, kInf);
    for (int k = 0; k < R; ++k)
      for (int m = 0; m < C; ++m) phi_col[m] = std::min(phi_col[m], tp.cost(k, m));
  }

  void run() {
    const auto& kern = kernels::active();
    std::vector<double> supply = tp.supplies;
    std::vector<double> demand = tp.demands;
    std::vector<double> dist_row(R), dist_col(C);
    std::vector<std::uint8_t> done_row(R), done_col(C);
    std::vector<std::int32_t> pred_col(C), pred_row(R);

    const long max_rounds = 4L * (R + C) * (R + C) + 16;
    for (long round = 0; round < max_rounds; ++round) {
      bool any_supply = false, any_demand = false;
      for (int k = 0; k < R; ++k) any_supply |= supply[k] > kMassTol;
      for (int m = 0; m < C; ++m) any_demand |= demand[m] > kMassTol;
      if (!any_supply || !any_demand) return;

      std::fill(dist_row.begin(), dist_row.end(), kInf);
      std::fill(dist_col.begin(), dist_col.end(), kInf);
      std::fill(done_row.begin(), done_row.end(), 0);
      std::fill(done_col.begin(), done_col.end(), 0);
      std::fill(pred_col.begin(), pred_col.end(), -1);
      std::fill(pred_row.begin(), pred_row.end(), -1);
      for (int k = 0; k < R; ++k)
        if (supply[k] > kMassTol) dist_row[k] = 0.0;

      int sink = -1;
      while (true) {
        // Smallest tentative label; rows before columns, lower index first.
        int best_r = -1, best_c = -1;
        double best = kInf;
        for (int k = 0; k < R; ++k)
          if (!done_row[k] && dist_row[k] < best) { best = dist_row[k]; best_r = k; }
        for (int m = 0; m < C; ++m)
          if (!done_col[m] && dist_col[m] < best) { best = dist_col[m]; best_c = m; best_r = -1; }
        if (best == kInf) break;
        if (best_r >= 0) {
          done_row[best_r] = 1;
          kern.relax_min(best + phi_row[best_r], &tp.costs[static_cast<std::size_t>(best_r) * C],
                         phi_col.data(), done_col.data(), dist_col.data(), pred_col.data(),
                         best_r, C);
        } else {
          done_col[best_c] = 1;
          if (demand[best_c] > kMassTol) {
            sink = best_c;
            break;
          }
          for (int k = 0; k < R; ++k) {
            if (done_row[k] || flow[static_cast<std::size_t>(k) * C + best_c] <= 0.0) continue;
            const double cand = best - tp.cost(k, best_c) + phi_col[best_c] - phi_row[k];
            if (cand < dist_row[k]) {
              dist_row[k] = cand;
              pred_row[k] = best_c;
            }
          }
        }
      }
      if (sink < 0) return;

      const double dt = dist_col[sink];
      for (int k = 0; k < R; ++k) phi_row[k] += std::min(dist_row[k], dt);
      for (int m = 0; m < C; ++m) phi_col[m] += std::min(dist_col[m], dt);

      // Bottleneck along the path sink <- row <- col <- ... <- source row.
      double amount = demand[sink];
      int m = sink;
      int source = -1;
      while (true) {
        const int k = pred_col[m];
        if (pred_row[k] < 0) {
          source = k;
          break;
        }
        m = pred_row[k];
        amount = std::min(amount, flow[static_cast<std::size_t>(k) * C + m]);
      }
      amount = std::min(amount, supply[source]);

      m = sink;
      while (true) {
        const int k = pred_col[m];
        flow[static_cast<std::size_t>(k) * C + m] += amount;
        if (pred_row[k] < 0) break;
        const int back = pred_row[k];
        double& fb = flow[static_cast<std::size_t>(k) * C + back];
        fb -= amount;
        if (fb < kMassTol * 1e-3) fb = 0.0;
        m = back;
      }
      supply[source] -= amount;
      demand[sink] -= amount;
    }
    fail(ErrorCode::NumericalBreakdown, "transportation augmentations did not terminate");
  }
};

}  // namespace

ReducedTransport reduce_degenerate(const TransportInstance& tp) {
  ReducedTransport out;
  out.row_of.assign(tp.rows(), -1);
  out.col_of.assign(tp.cols(), -1);
  for (int k = 0; k < tp.rows(); ++k) {
    if (tp.supplies[k] > kMassTol) {
      out.row_of[k] = static_cast<int>(out.rows.size());
      out.rows.push_back(k);
    }
  }
  for (int m = 0; m < tp.cols(); ++m) {
    if (tp.demands[m] > kMassTol) {
      out.col_of[m] = static_cast<int>(out.cols.size());
      out.cols.push_back(m);
    }
  }
  if (out.rows.empty() || out.cols.empty()) {
    fail(ErrorCode::EmptyProblem, "no row or column carries mass");
  }
  auto& p = out.problem;
  for (int k : out.rows) p.supplies.push_back(tp.supplies[k]);
  for (int m : out.cols) p.demands.push_back(tp.demands[m]);
  p.costs.reserve(out.rows.size() * out.cols.size());
  for (int k : out.rows)
    for (int m : out.cols) p.costs.push_back(tp.cost(k, m));
  return out;
}

TransportDuals solve_transport(const TransportInstance& input) {
  TransportInstance tp = input;
  check(tp);
  const int R = tp.rows();
  const int C = tp.cols();

  TransportDuals out;
  out.e.assign(R, kInf);
  out.f.assign(C, kInf);
  out.flow.assign(static_cast<std::size_t>(R) * C, 0.0);

  std::vector<char> row_set(R, 0), col_set(C, 0);
  ReducedTransport red;
  bool empty = false;
  try {
    red = reduce_degenerate(tp);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::EmptyProblem) throw;
    empty = true;
  }

  if (empty) {
    for (int m = 0; m < C; ++m) {
      out.f[m] = 0.0;
      col_set[m] = 1;
    }
  } else {
    Ssp ssp(red.problem);
    ssp.run();
    const int rr = red.problem.rows();
    const int rc = red.problem.cols();
    // Rows are the first positive-supply rows in order, so row 0 anchors.
    const double shift = -ssp.phi_row[0];
    for (int a = 0; a < rr; ++a) {
      out.e[red.rows[a]] = -ssp.phi_row[a] - shift;
      row_set[red.rows[a]] = 1;
    }
    for (int b = 0; b < rc; ++b) {
      out.f[red.cols[b]] = ssp.phi_col[b] + shift;
      col_set[red.cols[b]] = 1;
    }
    for (int a = 0; a < rr; ++a)
      for (int b = 0; b < rc; ++b)
        out.flow[static_cast<std::size_t>(red.rows[a]) * C + red.cols[b]] =
            ssp.flow[static_cast<std::size_t>(a) * rc + b];
  }

  // Removed columns priced against active rows, then removed rows against all columns.
  for (int m = 0; m < C; ++m) {
    if (col_set[m]) continue;
    double v = kInf;
    for (int k = 0; k < R; ++k)
      if (row_set[k]) v = std::min(v, tp.cost(k, m) - out.e[k]);
    out.f[m] = v == kInf ? 0.0 : v;
  }
  for (int k = 0; k < R; ++k) {
    if (row_set[k]) continue;
    double v = kInf;
    for (int m = 0; m < C; ++m) v = std::min(v, tp.cost(k, m) - out.f[m]);
    out.e[k] = v == kInf ? 0.0 : v;
  }
  // Rounding can leave e + f a hair above c on active cells.
  for (int k = 0; k < R; ++k) {
    double excess = 0.0;
    for (int m = 0; m < C; ++m) excess = std::max(excess, out.e[k] + out.f[m] - tp.cost(k, m));
    out.e[k] -= excess;
  }

  double obj = 0.0;
  for (int k = 0; k < R; ++k) obj += out.e[k] * tp.supplies[k];
  for (int m = 0; m < C; ++m) obj += out.f[m] * tp.demands[m];
  out.objective = obj;
  return out;
}

}  // namespace hublab
