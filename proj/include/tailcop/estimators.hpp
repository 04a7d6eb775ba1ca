#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tailcop/point.hpp"
#include "tailcop/sample.hpp"

namespace tailcop {

enum class Tail { Lower, Upper };

// Which of the two asymptotically equivalent estimators to evaluate.
//   Rank:   (1/k) #{R_i1 <= k x1, R_i2 <= k x2}
//   Copula: (n/k) C_n(k x1 / n, k x2 / n) with generalized-inverse margins,
//           i.e. rank thresholds ceil(k x).
enum class EstimatorForm { Rank, Copula };

// Counts #{i : a_i <= t1, b_i <= t2} for a permutation (a, b) of 1..n in
// O(log^2 n) per query after O(n log n) preprocessing (merge-sort levels over
// the first coordinate).
class DominanceCounter {
 public:
  DominanceCounter() = default;
  DominanceCounter(std::span<const std::int32_t> first, std::span<const std::int32_t> second);

  std::int64_t count(std::int64_t t1, std::int64_t t2) const;
  std::size_t size() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::size_t width_ = 0;                         // n rounded up to a power of two
  std::vector<std::vector<std::int32_t>> levels_;  // level L sorted within blocks of 2^L
};

// k * x for finite x >= 0, snapped to the nearest integer when it is one up to
// rounding (k * 0.6 = 60.000000000000007 becomes 60).
double scaled_coordinate(double x, int k);

// Integer rank threshold for coordinate x: floor(k x) for Rank, ceil(k x) for
// Copula, 0 at x = 0 and n at x = inf; always clamped to [0, n].
std::int64_t rank_threshold(double x, int k, std::size_t n, EstimatorForm form);

// Empirical lower or upper tail copula of a sample with threshold count k.
// The upper tail is evaluated by reflecting ranks R -> n + 1 - R and reusing
// the lower-tail counts.
class EmpiricalTailCopula {
 public:
  EmpiricalTailCopula(const BivariateSample& sample, int k, Tail tail = Tail::Lower);

  double rank_form(Point x) const;
  double copula_form(Point x) const;
  double eval(Point x, EstimatorForm form) const {
    return form == EstimatorForm::Rank ? rank_form(x) : copula_form(x);
  }

  // #{i : R'_i1 <= t1, R'_i2 <= t2} with R' the (possibly reflected) ranks.
  std::int64_t count(std::int64_t t1, std::int64_t t2) const { return counter_.count(t1, t2); }

  int k() const { return k_; }
  std::size_t n() const { return n_; }
  Tail tail() const { return tail_; }

 private:
  int k_;
  std::size_t n_;
  Tail tail_;
  DominanceCounter counter_;
};

// Free-function spellings of the two estimator forms.
double eval_rank_tail_copula(const EmpiricalTailCopula& etc, Point x);
double eval_copula_tail_copula(const EmpiricalTailCopula& etc, Point x);

// Known continuous marginal distribution functions.
struct Margins {
  std::function<double(double)> first;
  std::function<double(double)> second;

  // Identity on (0, 1), the margins of a copula sample.
  static Margins uniform();
};

// (1/k) #{F1(X_i1) <= k x1 / n, F2(X_i2) <= k x2 / n} (lower) or the survival
// analogue (1/k) #{F1(X_i1) > 1 - k x1 / n, ...} (upper).
double eval_known_margins_tail_copula(const BivariateSample& sample, int k, Point x,
                                      const Margins& margins, Tail tail = Tail::Lower);

// Right-continuous (optionally weighted) empirical distribution function of a
// finite set of reals, with left-continuous generalized inverses.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::span<const double> values, std::span<const double> weights = {});

  double operator()(double x) const;  // G(x) = share of mass at values <= x
  double survival(double x) const;    // 1 - G(x)

  // G^-(p) = inf{x : G(x) >= p} for 0 < p <= 1, sup{x : G(x) = 0} for p = 0.
  double inverse(double p) const;

  // Survival inverse sup{x : 1 - G(x) >= p} for 0 < p <= 1,
  // inf{x : 1 - G(x) = 0} for p = 0.
  double survival_inverse(double p) const;

  std::span<const double> sorted_values() const { return values_; }

 private:
  std::vector<double> values_;      // sorted
  std::vector<double> cumulative_;  // cumulative mass at values_[j]
  double total_ = 0.0;
};

// G^-(p) of the empirical distribution function of `values`.
double generalized_inverse(std::span<const double> values, double p);

// Finite-difference estimate of d/dx_which Lambda at x with bandwidth h:
// central difference for h <= x_p < inf, shifted to x + (h - x_p) e_p when
// x_p < h, and 0 for x_p = inf.
double estimate_partial_derivative(const EmpiricalTailCopula& etc, Point x, int which, double h,
                                   EstimatorForm form = EstimatorForm::Copula);

// Default bandwidth k^{-1/2}.
inline double default_bandwidth(int k) { return 1.0 / std::sqrt(static_cast<double>(k)); }

}  // namespace tailcop
