#include "tailcop/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tailcop/errors.hpp"

namespace tailcop {

DominanceCounter::DominanceCounter(std::span<const std::int32_t> first,
                                   std::span<const std::int32_t> second)
    : n_(first.size()) {
  width_ = 1;
  while (width_ < n_) width_ <<= 1;
  std::vector<std::int32_t> base(width_, std::numeric_limits<std::int32_t>::max());
  for (std::size_t i = 0; i < n_; ++i) base[first[i] - 1] = second[i];
  levels_.push_back(std::move(base));
  for (std::size_t block = 1; block < width_; block <<= 1) {
    const auto& prev = levels_.back();
    std::vector<std::int32_t> next(width_);
    for (std::size_t start = 0; start < width_; start += 2 * block) {
      std::merge(prev.begin() + start, prev.begin() + start + block, prev.begin() + start + block,
                 prev.begin() + start + 2 * block, next.begin() + start);
    }
    levels_.push_back(std::move(next));
  }
}

std::int64_t DominanceCounter::count(std::int64_t t1, std::int64_t t2) const {
  if (n_ == 0 || t1 <= 0 || t2 <= 0) return 0;
  const std::size_t prefix = static_cast<std::size_t>(std::min<std::int64_t>(t1, n_));
  const std::int32_t bound = static_cast<std::int32_t>(std::min<std::int64_t>(t2, n_));
  std::int64_t total = 0;
  std::size_t pos = 0;
  for (std::size_t level = levels_.size(); level-- > 0;) {
    const std::size_t block = std::size_t{1} << level;
    if (prefix & block) {
      const auto& lv = levels_[level];
      total += std::upper_bound(lv.begin() + pos, lv.begin() + pos + block, bound) -
               (lv.begin() + pos);
      pos += block;
    }
  }
  return total;
}

double scaled_coordinate(double x, int k) {
  const double kx = static_cast<double>(k) * x;
  const double nearest = std::round(kx);
  return std::abs(kx - nearest) <= 1e-12 * std::max(1.0, kx) ? nearest : kx;
}

std::int64_t rank_threshold(double x, int k, std::size_t n, EstimatorForm form) {
  if (std::isnan(x) || x < 0.0) throw DomainError("tail copula argument must lie in [0, inf]");
  if (x == 0.0) return 0;
  if (std::isinf(x)) return static_cast<std::int64_t>(n);
  const double kx = scaled_coordinate(x, k);
  if (kx >= static_cast<double>(n)) return static_cast<std::int64_t>(n);
  const double t = form == EstimatorForm::Rank ? std::floor(kx) : std::ceil(kx);
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(t), 0, static_cast<std::int64_t>(n));
}

namespace {

std::vector<std::int32_t> reflected(std::span<const std::int32_t> ranks) {
  const auto n = static_cast<std::int32_t>(ranks.size());
  std::vector<std::int32_t> out(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) out[i] = n + 1 - ranks[i];
  return out;
}

DominanceCounter make_counter(const BivariateSample& sample, Tail tail) {
  if (tail == Tail::Lower) return DominanceCounter(sample.ranks(1), sample.ranks(2));
  const auto r1 = reflected(sample.ranks(1));
  const auto r2 = reflected(sample.ranks(2));
  return DominanceCounter(r1, r2);
}

}  // namespace

EmpiricalTailCopula::EmpiricalTailCopula(const BivariateSample& sample, int k, Tail tail)
    : k_(k), n_(sample.size()), tail_(tail), counter_(make_counter(sample, tail)) {
  if (k < 1 || static_cast<std::size_t>(k) > n_) {
    throw DomainError("threshold count k must satisfy 1 <= k <= n");
  }
}

double EmpiricalTailCopula::rank_form(Point x) const {
  if (std::isinf(x.x1) && std::isinf(x.x2)) throw DomainError("cannot evaluate at (inf, inf)");
  // Upper tail: R > n - k x is R' <= ceil(k x) on reflected ranks.
  const EstimatorForm f = tail_ == Tail::Lower ? EstimatorForm::Rank : EstimatorForm::Copula;
  const auto t1 = rank_threshold(x.x1, k_, n_, f);
  const auto t2 = rank_threshold(x.x2, k_, n_, f);
  return static_cast<double>(counter_.count(t1, t2)) / k_;
}

double EmpiricalTailCopula::copula_form(Point x) const {
  if (std::isinf(x.x1) && std::isinf(x.x2)) throw DomainError("cannot evaluate at (inf, inf)");
  const auto t1 = rank_threshold(x.x1, k_, n_, EstimatorForm::Copula);
  const auto t2 = rank_threshold(x.x2, k_, n_, EstimatorForm::Copula);
  return static_cast<double>(counter_.count(t1, t2)) / k_;
}

double eval_rank_tail_copula(const EmpiricalTailCopula& etc, Point x) { return etc.rank_form(x); }

double eval_copula_tail_copula(const EmpiricalTailCopula& etc, Point x) {
  return etc.copula_form(x);
}

Margins Margins::uniform() {
  const auto identity = [](double u) { return u; };
  return {identity, identity};
}

double eval_known_margins_tail_copula(const BivariateSample& sample, int k, Point x,
                                      const Margins& margins, Tail tail) {
  const std::size_t n = sample.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw DomainError("threshold count k must satisfy 1 <= k <= n");
  }
  const auto level = [&](double xp) {
    return std::isinf(xp) ? kInf : scaled_coordinate(xp, k) / static_cast<double>(n);
  };
  const double q1 = level(x.x1);
  const double q2 = level(x.x2);
  const auto c1 = sample.column(1);
  const auto c2 = sample.column(2);
  std::int64_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f1 = margins.first(c1[i]);
    const double f2 = margins.second(c2[i]);
    const bool in1 = tail == Tail::Lower ? f1 <= q1 : f1 > 1.0 - q1;
    const bool in2 = tail == Tail::Lower ? f2 <= q2 : f2 > 1.0 - q2;
    count += (in1 && in2) ? 1 : 0;
  }
  return static_cast<double>(count) / k;
}

EmpiricalCdf::EmpiricalCdf(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw DomainError("empirical distribution of an empty set");
  if (!weights.empty() && weights.size() != values.size()) {
    throw DomainError("weights and values differ in length");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  values_.reserve(values.size());
  cumulative_.reserve(values.size());
  double running = 0.0;
  for (std::size_t idx : order) {
    const double w = weights.empty() ? 1.0 : weights[idx];
    if (w < 0.0) throw DomainError("negative weight");
    running += w;
    values_.push_back(values[idx]);
    cumulative_.push_back(running);
  }
  total_ = running;
  if (!(total_ > 0.0)) throw DomainError("empirical distribution with zero total mass");
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  if (it == values_.begin()) return 0.0;
  return cumulative_[(it - values_.begin()) - 1] / total_;
}

double EmpiricalCdf::survival(double x) const { return 1.0 - (*this)(x); }

double EmpiricalCdf::inverse(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0, 1]");
  if (p == 0.0) {
    // sup{x : G(x) = 0}: the first value carrying positive mass.
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), 0.0);
    return values_[it - cumulative_.begin()];
  }
  const double target = p * total_;
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) return values_.back();
  return values_[it - cumulative_.begin()];
}

double EmpiricalCdf::survival_inverse(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0, 1]");
  if (p == 0.0) {
    // inf{x : 1 - G(x) = 0}: the first value at which all mass is reached.
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), total_);
    return values_[it - cumulative_.begin()];
  }
  // Largest support point with survival mass >= p; below the support the
  // supremum is the smallest value.
  const double target = p * total_;
  for (std::size_t j = values_.size(); j-- > 0;) {
    if (total_ - cumulative_[j] >= target) return values_[j];
  }
  return values_.front();
}

double generalized_inverse(std::span<const double> values, double p) {
  return EmpiricalCdf(values).inverse(p);
}

double estimate_partial_derivative(const EmpiricalTailCopula& etc, Point x, int which, double h,
                                   EstimatorForm form) {
  if (!(h > 0.0)) throw DomainError("bandwidth must be positive");
  double& coord = which == 1 ? x.x1 : x.x2;
  if (std::isinf(coord)) return 0.0;
  if (coord < h) coord = h;
  Point up = x, down = x;
  (which == 1 ? up.x1 : up.x2) += h;
  (which == 1 ? down.x1 : down.x2) -= h;
  if ((which == 1 ? down.x1 : down.x2) < 0.0) (which == 1 ? down.x1 : down.x2) = 0.0;
  return (etc.eval(up, form) - etc.eval(down, form)) / (2.0 * h);
}

}  // namespace tailcop
