#include <immintrin.h>

#include <cmath>

#include "hublab/kernels.hpp"

namespace hublab::kernels {
namespace {

void axpy_sub_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    __m256d y1 = _mm256_loadu_pd(y + i + 4);
    y0 = _mm256_sub_pd(y0, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    y1 = _mm256_sub_pd(y1, _mm256_mul_pd(va, _mm256_loadu_pd(x + i + 4)));
    _mm256_storeu_pd(y + i, y0);
    _mm256_storeu_pd(y + i + 4, y1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d y0 = _mm256_loadu_pd(y + i);
    y0 = _mm256_sub_pd(y0, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, y0);
  }
  for (; i < n; ++i) y[i] -= a * x[i];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(
        acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(x + i + 4),
                                             _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(
        acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

std::size_t argmax_abs_avx2(const double* v, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d vmax = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vmax = _mm256_max_pd(vmax, _mm256_andnot_pd(sign, _mm256_loadu_pd(v + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vmax);
  double best = std::fmax(std::fmax(lanes[0], lanes[1]),
                          std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) best = std::fmax(best, std::fabs(v[i]));

  // First index attaining the maximum, matching the scalar tie rule.
  const __m256d vbest = _mm256_set1_pd(best);
  i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_andnot_pd(sign, _mm256_loadu_pd(v + i));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(a, vbest, _CMP_EQ_OQ));
    if (mask != 0) return i + static_cast<std::size_t>(__builtin_ctz(mask));
  }
  for (; i < n; ++i) {
    if (std::fabs(v[i]) == best) return i;
  }
  return 0;
}

void relax_min_avx2(double base, const double* cost, const double* potential,
                    const std::uint8_t* done, double* dist, std::int32_t* pred,
                    std::int32_t from, std::size_t n) {
  const __m256d vbase = _mm256_set1_pd(base);
  std::size_t m = 0;
  for (; m + 4 <= n; m += 4) {
    const __m256d cand = _mm256_sub_pd(
        _mm256_add_pd(vbase, _mm256_loadu_pd(cost + m)),
        _mm256_loadu_pd(potential + m));
    const __m256d cur = _mm256_loadu_pd(dist + m);
    int mask = _mm256_movemask_pd(_mm256_cmp_pd(cand, cur, _CMP_LT_OQ));
    if (mask == 0) continue;
    alignas(32) double c[4];
    _mm256_store_pd(c, cand);
    while (mask != 0) {
      const int lane = __builtin_ctz(mask);
      mask &= mask - 1;
      if (!done[m + lane]) {
        dist[m + lane] = c[lane];
        pred[m + lane] = from;
      }
    }
  }
  for (; m < n; ++m) {
    const double cand = (base + cost[m]) - potential[m];
    if (!done[m] && cand < dist[m]) {
      dist[m] = cand;
      pred[m] = from;
    }
  }
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", axpy_sub_avx2, dot_avx2,
                                 argmax_abs_avx2, relax_min_avx2};
  return table;
}

}  // namespace hublab::kernels
