#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Data-parallel inner loops of the bootstrap and quadrature code. Every
// kernel has a portable scalar reference and, where the CPU allows, an AVX2
// variant selected once at runtime. Variants agree up to summation order.
namespace tailcop::kernels {

// out[j] = sum_i w[i] * [a[i] <= qa[j]] * [b[i] <= qb[j]]
using DominanceSumsFn = void (*)(const std::int32_t* a, const std::int32_t* b, const double* w,
                                 std::size_t m, const std::int32_t* qa, const std::int32_t* qb,
                                 double* out, std::size_t q);

// sum_j w[j] * v[j]^2
using WeightedSumSquaresFn = double (*)(const double* w, const double* v, std::size_t n);

// sum_j w[j] * u[j] * v[j]
using WeightedDotFn = double (*)(const double* w, const double* u, const double* v, std::size_t n);

struct KernelTable {
  std::string_view name;
  DominanceSumsFn dominance_sums;
  WeightedSumSquaresFn weighted_sum_squares;
  WeightedDotFn weighted_dot;
};

const KernelTable& scalar_table();

// nullptr when the binary was built without AVX2 support or the CPU lacks
// AVX2/FMA.
const KernelTable* avx2_table();

// The table used by the library: AVX2 when available unless the environment
// variable TAILCOP_SIMD=scalar forces the reference kernels.
const KernelTable& active();

inline void dominance_sums(std::span<const std::int32_t> a, std::span<const std::int32_t> b,
                           std::span<const double> w, std::span<const std::int32_t> qa,
                           std::span<const std::int32_t> qb, std::span<double> out) {
  active().dominance_sums(a.data(), b.data(), w.data(), a.size(), qa.data(), qb.data(), out.data(),
                          qa.size());
}

inline double weighted_sum_squares(std::span<const double> w, std::span<const double> v) {
  return active().weighted_sum_squares(w.data(), v.data(), w.size());
}

inline double weighted_dot(std::span<const double> w, std::span<const double> u,
                           std::span<const double> v) {
  return active().weighted_dot(w.data(), u.data(), v.data(), w.size());
}

namespace detail {
void dominance_sums_scalar(const std::int32_t*, const std::int32_t*, const double*, std::size_t,
                           const std::int32_t*, const std::int32_t*, double*, std::size_t);
double weighted_sum_squares_scalar(const double*, const double*, std::size_t);
double weighted_dot_scalar(const double*, const double*, const double*, std::size_t);
#if defined(TAILCOP_HAVE_AVX2)
void dominance_sums_avx2(const std::int32_t*, const std::int32_t*, const double*, std::size_t,
                         const std::int32_t*, const std::int32_t*, double*, std::size_t);
double weighted_sum_squares_avx2(const double*, const double*, std::size_t);
double weighted_dot_avx2(const double*, const double*, const double*, std::size_t);
#endif
}  // namespace detail

}  // namespace tailcop::kernels
