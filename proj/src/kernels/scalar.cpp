#include "tailcop/kernels.hpp"

namespace tailcop::kernels::detail {

void dominance_sums_scalar(const std::int32_t* a, const std::int32_t* b, const double* w,
                           std::size_t m, const std::int32_t* qa, const std::int32_t* qb,
                           double* out, std::size_t q) {
  for (std::size_t j = 0; j < q; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (a[i] <= qa[j] && b[i] <= qb[j]) sum += w[i];
    }
    out[j] = sum;
  }
}

double weighted_sum_squares_scalar(const double* w, const double* v, std::size_t n) {
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += w[j] * v[j] * v[j];
  return sum;
}

double weighted_dot_scalar(const double* w, const double* u, const double* v, std::size_t n) {
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += w[j] * u[j] * v[j];
  return sum;
}

}  // namespace tailcop::kernels::detail
