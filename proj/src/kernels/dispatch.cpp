#include <cstdlib>
#include <string_view>

#include "tailcop/kernels.hpp"

namespace tailcop::kernels {

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", &detail::dominance_sums_scalar,
                                 &detail::weighted_sum_squares_scalar, &detail::weighted_dot_scalar};
  return table;
}

const KernelTable* avx2_table() {
#if defined(TAILCOP_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  static const KernelTable table{"avx2", &detail::dominance_sums_avx2,
                                 &detail::weighted_sum_squares_avx2, &detail::weighted_dot_avx2};
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = [&]() -> const KernelTable& {
    const char* forced = std::getenv("TAILCOP_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
    if (const KernelTable* simd = avx2_table()) return *simd;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace tailcop::kernels
