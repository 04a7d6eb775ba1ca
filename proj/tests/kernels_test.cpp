#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tailcop/kernels.hpp"
#include "tailcop/rng.hpp"

namespace tailcop::kernels {
namespace {

struct Inputs {
  std::vector<std::int32_t> a, b, qa, qb;
  std::vector<double> w;
};

Inputs random_inputs(std::size_t m, std::size_t q, std::uint64_t seed) {
  RngStream rng(seed);
  Inputs in;
  for (std::size_t i = 0; i < m; ++i) {
    in.a.push_back(static_cast<std::int32_t>(rng.below(m + 1)));
    in.b.push_back(static_cast<std::int32_t>(rng.below(m + 1)));
    in.w.push_back(rng.below(3) == 0 ? 0.0 : 2.0 * rng.uniform());
  }
  for (std::size_t j = 0; j < q; ++j) {
    in.qa.push_back(static_cast<std::int32_t>(rng.below(m + 2)) - 1);
    in.qb.push_back(static_cast<std::int32_t>(rng.below(m + 2)) - 1);
  }
  return in;
}

std::vector<double> brute_dominance(const Inputs& in) {
  std::vector<double> out(in.qa.size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t i = 0; i < in.a.size(); ++i) {
      if (in.a[i] <= in.qa[j] && in.b[i] <= in.qb[j]) out[j] += in.w[i];
    }
  }
  return out;
}

TEST(ScalarKernels, DominanceSumsMatchBruteForce) {
  for (std::size_t m : {0u, 1u, 3u, 17u, 200u}) {
    const auto in = random_inputs(m, 23, m + 1);
    std::vector<double> out(23, -1.0);
    scalar_table().dominance_sums(in.a.data(), in.b.data(), in.w.data(), m, in.qa.data(),
                                  in.qb.data(), out.data(), out.size());
    const auto ref = brute_dominance(in);
    for (std::size_t j = 0; j < out.size(); ++j) EXPECT_NEAR(out[j], ref[j], 1e-12);
  }
}

TEST(ScalarKernels, Reductions) {
  const std::vector<double> w = {0.5, 1.0, 2.0}, u = {1.0, -2.0, 3.0}, v = {4.0, 5.0, -6.0};
  EXPECT_DOUBLE_EQ(scalar_table().weighted_sum_squares(w.data(), u.data(), 3), 0.5 + 4.0 + 18.0);
  EXPECT_DOUBLE_EQ(scalar_table().weighted_dot(w.data(), u.data(), v.data(), 3), 2.0 - 10.0 - 36.0);
}

class Avx2Equivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (avx2_table() == nullptr) GTEST_SKIP() << "AVX2 kernels unavailable";
  }
};

TEST_F(Avx2Equivalence, DominanceSums) {
  for (std::size_t m : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 64u, 1000u}) {
    for (std::size_t q : {1u, 2u, 5u, 100u}) {
      const auto in = random_inputs(m, q, 1000 * m + q);
      std::vector<double> s(q), v(q);
      scalar_table().dominance_sums(in.a.data(), in.b.data(), in.w.data(), m, in.qa.data(),
                                    in.qb.data(), s.data(), q);
      avx2_table()->dominance_sums(in.a.data(), in.b.data(), in.w.data(), m, in.qa.data(),
                                   in.qb.data(), v.data(), q);
      double scale = 0.0;
      for (double x : in.w) scale += x;
      for (std::size_t j = 0; j < q; ++j) EXPECT_NEAR(s[j], v[j], 1e-13 * (1.0 + scale));
    }
  }
}

TEST_F(Avx2Equivalence, IntegerWeightsAgreeExactly) {
  auto in = random_inputs(513, 50, 77);
  for (auto& w : in.w) w = std::round(w);
  std::vector<double> s(50), v(50);
  scalar_table().dominance_sums(in.a.data(), in.b.data(), in.w.data(), 513, in.qa.data(),
                                in.qb.data(), s.data(), 50);
  avx2_table()->dominance_sums(in.a.data(), in.b.data(), in.w.data(), 513, in.qa.data(),
                               in.qb.data(), v.data(), 50);
  EXPECT_EQ(s, v);
}

TEST_F(Avx2Equivalence, Reductions) {
  RngStream rng(5);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 8u, 13u, 100u, 1001u}) {
    std::vector<double> w(n), u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = rng.uniform();
      u[i] = 2 * rng.uniform() - 1;
      v[i] = 2 * rng.uniform() - 1;
    }
    const double s1 = scalar_table().weighted_sum_squares(w.data(), u.data(), n);
    const double v1 = avx2_table()->weighted_sum_squares(w.data(), u.data(), n);
    EXPECT_NEAR(s1, v1, 1e-13 * (1.0 + std::abs(s1)));
    const double s2 = scalar_table().weighted_dot(w.data(), u.data(), v.data(), n);
    const double v2 = avx2_table()->weighted_dot(w.data(), u.data(), v.data(), n);
    EXPECT_NEAR(s2, v2, 1e-13 * (1.0 + n));
  }
}

TEST(Dispatch, ActiveIsOneOfTheTables) {
  const auto& t = active();
  EXPECT_TRUE(&t == &scalar_table() || (avx2_table() != nullptr && &t == avx2_table()));
}

}  // namespace
}  // namespace tailcop::kernels
