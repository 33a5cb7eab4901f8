#include <cmath>

#include "hublab/kernels.hpp"

namespace hublab::kernels {
namespace {

void axpy_sub_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] -= a * x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

std::size_t argmax_abs_scalar(const double* v, std::size_t n) {
  std::size_t best = 0;
  double best_val = std::fabs(v[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double a = std::fabs(v[i]);
    if (a > best_val) {
      best_val = a;
      best = i;
    }
  }
  return best;
}

void relax_min_scalar(double base, const double* cost, const double* potential,
                      const std::uint8_t* done, double* dist,
                      std::int32_t* pred, std::int32_t from, std::size_t n) {
  for (std::size_t m = 0; m < n; ++m) {
    const double cand = (base + cost[m]) - potential[m];
    if (!done[m] && cand < dist[m]) {
      dist[m] = cand;
      pred[m] = from;
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", axpy_sub_scalar, dot_scalar,
                                 argmax_abs_scalar, relax_min_scalar};
  return table;
}

}  // namespace hublab::kernels
