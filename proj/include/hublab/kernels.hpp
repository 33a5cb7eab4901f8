#pragma once

// Data-parallel inner loops shared by the LU factorization, simplex pricing
// and the transportation solver. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2 variant chosen at runtime.
//
// Elementwise kernels (axpy, relax_min, argmax_abs) are bit-identical across
// variants. dot() reassociates the sum in the vector variant.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace hublab::kernels {

struct KernelTable {
  std::string_view name;

  // y[i] -= a * x[i]
  void (*axpy_sub)(double a, const double* x, double* y, std::size_t n);

  // sum x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);

  // Index of the first entry with the largest |v[i]|; n must be > 0.
  std::size_t (*argmax_abs)(const double* v, std::size_t n);

  // Dijkstra relaxation over a dense row:
  //   cand = base + cost[m] - potential[m]
  //   if (!done[m] && cand < dist[m]) { dist[m] = cand; pred[m] = from; }
  void (*relax_min)(double base, const double* cost, const double* potential,
                    const std::uint8_t* done, double* dist, std::int32_t* pred,
                    std::int32_t from, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the build or the running CPU lacks AVX2.
const KernelTable* avx2_table();

// Table selected once per process. HUBLAB_SIMD=scalar|avx2|auto overrides
// the CPU probe (an unavailable request falls back to scalar).
const KernelTable& active();

}  // namespace hublab::kernels
