#include "dense_lu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hublab/kernels.hpp"

namespace hublab::detail {

DenseLu::Deficiency DenseLu::factor(const std::vector<SparseColumn>& columns,
                                    double pivot_tol) {
  const auto& kern = kernels::active();
  m_ = static_cast<int>(columns.size());
  const std::size_t m = static_cast<std::size_t>(m_);

  order_.resize(m);
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
    return columns[a].size() < columns[b].size();
  });

  work_.assign(m * m, 0.0);
  std::vector<double> col_scale(m, 1.0);
  for (std::size_t t = 0; t < m; ++t) {
    for (const auto& [row, v] : columns[order_[t]]) {
      work_[row * m + t] = v;
      col_scale[t] = std::max(col_scale[t], std::fabs(v));
    }
  }

  pivot_row_.assign(m, -1);
  step_of_row_.assign(m, -1);
  lower_.assign(m, {});
  std::vector<int> active(m);
  std::iota(active.begin(), active.end(), 0);

  Deficiency deficiency;
  for (std::size_t t = 0; t < m; ++t) {
    int best = -1;
    double best_abs = 0.0;
    std::size_t best_slot = 0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const double v = std::fabs(work_[active[a] * m + t]);
      if (v > best_abs) {
        best_abs = v;
        best = active[a];
        best_slot = a;
      }
    }
    if (best < 0 || best_abs <= pivot_tol * col_scale[t]) {
      deficiency.positions.push_back(order_[t]);
      continue;
    }
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_slot));
    pivot_row_[t] = best;
    step_of_row_[best] = static_cast<int>(t);

    const double* prow = &work_[best * m];
    const double pivot = prow[t];
    for (int row : active) {
      double* r = &work_[row * m];
      if (r[t] == 0.0) continue;
      const double l = r[t] / pivot;
      r[t] = 0.0;
      lower_[t].emplace_back(row, l);
      if (t + 1 < m) kern.axpy_sub(l, prow + t + 1, r + t + 1, m - t - 1);
    }
  }
  deficiency.free_rows = active;
  scratch_.assign(m, 0.0);
  return deficiency;
}

void DenseLu::ftran(std::vector<double>& b) const {
  const auto& kern = kernels::active();
  const std::size_t m = static_cast<std::size_t>(m_);
  // Forward: L z = P b, z stored by step.
  std::vector<double>& z = scratch_;
  for (std::size_t t = 0; t < m; ++t) {
    const double v = b[pivot_row_[t]];
    z[t] = v;
    if (v == 0.0) continue;
    for (const auto& [row, l] : lower_[t]) b[row] -= l * v;
  }
  // Backward: U y = z.
  for (std::size_t t = m; t-- > 0;) {
    const double* urow = &work_[pivot_row_[t] * m];
    double v = z[t];
    if (t + 1 < m) v -= kern.dot(urow + t + 1, z.data() + t + 1, m - t - 1);
    z[t] = v / urow[t];
  }
  for (std::size_t t = 0; t < m; ++t) b[order_[t]] = z[t];
}

void DenseLu::btran(std::vector<double>& c) const {
  const auto& kern = kernels::active();
  const std::size_t m = static_cast<std::size_t>(m_);
  std::vector<double>& w = scratch_;
  for (std::size_t t = 0; t < m; ++t) w[t] = c[order_[t]];
  // U' w = c.
  for (std::size_t t = 0; t < m; ++t) {
    const double* urow = &work_[pivot_row_[t] * m];
    const double v = w[t] / urow[t];
    w[t] = v;
    if (v != 0.0 && t + 1 < m) kern.axpy_sub(v, urow + t + 1, w.data() + t + 1, m - t - 1);
  }
  // L' v = w, v by step; multipliers of step t live on rows pivoted later.
  for (std::size_t t = m; t-- > 0;) {
    double v = w[t];
    for (const auto& [row, l] : lower_[t]) v -= l * w[step_of_row_[row]];
    w[t] = v;
  }
  for (std::size_t t = 0; t < m; ++t) c[pivot_row_[t]] = w[t];
}

}  // namespace hublab::detail
