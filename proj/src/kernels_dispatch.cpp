#include <cstdlib>
#include <string_view>

#include "hublab/kernels.hpp"

namespace hublab::kernels {

#if defined(HUBLAB_BUILD_AVX2)
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(HUBLAB_BUILD_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& selected = []() -> const KernelTable& {
    const char* env = std::getenv("HUBLAB_SIMD");
    const std::string_view request = env != nullptr ? env : "auto";
    if (request == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return selected;
}

}  // namespace hublab::kernels
