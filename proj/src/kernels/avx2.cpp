// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "tailcop/kernels.hpp"

namespace tailcop::kernels::detail {

namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

void dominance_sums_avx2(const std::int32_t* a, const std::int32_t* b, const double* w,
                         std::size_t m, const std::int32_t* qa, const std::int32_t* qb,
                         double* out, std::size_t q) {
  const std::size_t vec_end = m & ~std::size_t{7};
  for (std::size_t j = 0; j < q; ++j) {
    const __m256i ta = _mm256_set1_epi32(qa[j]);
    const __m256i tb = _mm256_set1_epi32(qb[j]);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (std::size_t i = 0; i < vec_end; i += 8) {
      const __m256i av = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
      const __m256i bv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
      // all-ones lanes are excluded: a > qa or b > qb
      const __m256i excluded = _mm256_or_si256(_mm256_cmpgt_epi32(av, ta), _mm256_cmpgt_epi32(bv, tb));
      const __m256d mask_lo = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm256_castsi256_si128(excluded)));
      const __m256d mask_hi = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm256_extracti128_si256(excluded, 1)));
      acc0 = _mm256_add_pd(acc0, _mm256_andnot_pd(mask_lo, _mm256_loadu_pd(w + i)));
      acc1 = _mm256_add_pd(acc1, _mm256_andnot_pd(mask_hi, _mm256_loadu_pd(w + i + 4)));
    }
    double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (std::size_t i = vec_end; i < m; ++i) {
      if (a[i] <= qa[j] && b[i] <= qb[j]) sum += w[i];
    }
    out[j] = sum;
  }
}

double weighted_sum_squares_avx2(const double* w, const double* v, std::size_t n) {
  const std::size_t vec_end = n & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t j = 0; j < vec_end; j += 4) {
    const __m256d vv = _mm256_loadu_pd(v + j);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + j), vv), vv, acc);
  }
  double sum = horizontal_sum(acc);
  for (std::size_t j = vec_end; j < n; ++j) sum += w[j] * v[j] * v[j];
  return sum;
}

double weighted_dot_avx2(const double* w, const double* u, const double* v, std::size_t n) {
  const std::size_t vec_end = n & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t j = 0; j < vec_end; j += 4) {
    const __m256d wu = _mm256_mul_pd(_mm256_loadu_pd(w + j), _mm256_loadu_pd(u + j));
    acc = _mm256_fmadd_pd(wu, _mm256_loadu_pd(v + j), acc);
  }
  double sum = horizontal_sum(acc);
  for (std::size_t j = vec_end; j < n; ++j) sum += w[j] * u[j] * v[j];
  return sum;
}

}  // namespace tailcop::kernels::detail
