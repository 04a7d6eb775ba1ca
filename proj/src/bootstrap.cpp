#include "tailcop/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "tailcop/errors.hpp"
#include "tailcop/kernels.hpp"
#include "tailcop/parallel.hpp"

namespace tailcop {

MultiplierScheme MultiplierScheme::two_point() { return MultiplierScheme{}; }

MultiplierScheme MultiplierScheme::exponential() {
  MultiplierScheme s;
  s.distribution = MultiplierDistribution::Custom;
  s.name = "exponential";
  s.sampler = [](RngStream& rng) { return -std::log(rng.uniform()); };
  s.moment_note = "all moments finite";
  return s;
}

MultiplierScheme MultiplierScheme::custom(std::string name, double mu, double tau,
                                          std::function<double(RngStream&)> sampler,
                                          std::string moment_note) {
  if (!(mu > 0.0) || !(tau > 0.0)) throw ConfigError("multiplier mean and sd must be positive");
  if (!sampler) throw ConfigError("custom multiplier scheme needs a sampler");
  MultiplierScheme s;
  s.distribution = MultiplierDistribution::Custom;
  s.name = std::move(name);
  s.mu = mu;
  s.tau = tau;
  s.sampler = std::move(sampler);
  s.moment_note = std::move(moment_note);
  return s;
}

std::vector<double> draw_weights(const MultiplierScheme& scheme, std::size_t n, RngStream& rng) {
  std::vector<double> w(n);
  if (scheme.distribution == MultiplierDistribution::TwoPoint02) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng();
      w[i] = 2.0 * static_cast<double>((bits >> (i % 64)) & 1u);
    }
    return w;
  }
  for (auto& v : w) {
    v = scheme.sampler(rng);
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("multipliers must be finite and >= 0");
  }
  return w;
}

std::vector<double> draw_nondegenerate_weights(const MultiplierScheme& scheme, std::size_t n,
                                               RngStream& rng, std::size_t& redraws) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto w = draw_weights(scheme, n, rng);
    if (std::any_of(w.begin(), w.end(), [](double v) { return v > 0.0; })) return w;
    ++redraws;
  }
  throw DegenerateDrawError("all multipliers were zero twice in a row");
}

std::string_view kind_name(BootstrapKind kind) {
  switch (kind) {
    case BootstrapKind::KnownMargins: return "known_margins";
    case BootstrapKind::Beta: return "beta";
    case BootstrapKind::PDM: return "pdm";
    case BootstrapKind::DM: return "dm";
    case BootstrapKind::Resample: return "resample";
  }
  return "unknown";
}

BootstrapKind parse_kind(std::string_view name) {
  for (auto kind : {BootstrapKind::KnownMargins, BootstrapKind::Beta, BootstrapKind::PDM,
                    BootstrapKind::DM, BootstrapKind::Resample}) {
    if (kind_name(kind) == name) return kind;
  }
  if (name == "res") return BootstrapKind::Resample;
  throw ConfigError(fmt::format("unknown bootstrap kind '{}'", name));
}

namespace {

void check_inputs(const BivariateSample& sample, int k, std::span<const double> weights) {
  if (k < 1 || static_cast<std::size_t>(k) > sample.size()) {
    throw DomainError("threshold count k must satisfy 1 <= k <= n");
  }
  if (weights.size() != sample.size()) throw DomainError("one multiplier per observation required");
}

double total_weight(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw DegenerateDrawError("multipliers sum to zero");
  return total;
}

// Value of the generalized inverse at k x / n of the (weighted) empirical
// distribution of `values`: the first order statistic whose cumulative mass
// reaches k x * (total / n). -inf selects nothing and +inf everything.
double literal_threshold(std::span<const double> values, std::span<const double> weights, double x,
                         int k) {
  if (x == 0.0) return -kInf;
  if (std::isinf(x)) return kInf;
  const std::size_t n = values.size();
  const double kx = scaled_coordinate(x, k);
  if (kx >= static_cast<double>(n)) return kInf;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double total = static_cast<double>(n);
  if (!weights.empty()) total = total_weight(weights);
  const double target = kx * total / static_cast<double>(n);
  double cum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cum += weights.empty() ? 1.0 : weights[order[j]];
    if (cum >= target) return values[order[j]];
  }
  return kInf;
}

// (mu / tau) k^{-1/2} sum_i (xi_i / xibar - 1) [X_i1 <= t1, X_i2 <= t2]
double centered_weighted_sum(const BivariateSample& sample, int k, std::span<const double> weights,
                             double t1, double t2, const MultiplierScheme& scheme) {
  const double mean = total_weight(weights) / static_cast<double>(weights.size());
  const auto c1 = sample.column(1);
  const auto c2 = sample.column(2);
  double sum = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (c1[i] <= t1 && c2[i] <= t2) sum += weights[i] / mean - 1.0;
  }
  return scheme.mu / scheme.tau * sum / std::sqrt(static_cast<double>(k));
}

}  // namespace

double process_known_margins(const BivariateSample& sample, const Margins& margins, int k,
                             std::span<const double> weights, Point x,
                             const MultiplierScheme& scheme) {
  check_inputs(sample, k, weights);
  const double n = static_cast<double>(sample.size());
  const double mean = total_weight(weights) / n;
  const auto in = [&](double value, double coord, const std::function<double(double)>& F) {
    if (coord == 0.0) return false;
    if (std::isinf(coord)) return true;
    return F(value) <= scaled_coordinate(coord, k) / n;
  };
  const auto c1 = sample.column(1);
  const auto c2 = sample.column(2);
  double sum = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (in(c1[i], x.x1, margins.first) && in(c2[i], x.x2, margins.second)) {
      sum += weights[i] / mean - 1.0;
    }
  }
  return scheme.mu / scheme.tau * sum / std::sqrt(static_cast<double>(k));
}

double process_beta(const BivariateSample& sample, int k, std::span<const double> weights, Point x,
                    const MultiplierScheme& scheme) {
  check_inputs(sample, k, weights);
  const double t1 = literal_threshold(sample.column(1), {}, x.x1, k);
  const double t2 = literal_threshold(sample.column(2), {}, x.x2, k);
  return centered_weighted_sum(sample, k, weights, t1, t2, scheme);
}

double process_pdm(const BivariateSample& sample, int k, std::span<const double> weights, Point x,
                   double h, const MultiplierScheme& scheme) {
  check_inputs(sample, k, weights);
  const EmpiricalTailCopula etc(sample, k);
  const double d1 = estimate_partial_derivative(etc, x, 1, h);
  const double d2 = estimate_partial_derivative(etc, x, 2, h);
  double value = process_beta(sample, k, weights, x, scheme);
  if (d1 != 0.0) value -= d1 * process_beta(sample, k, weights, {x.x1, kInf}, scheme);
  if (d2 != 0.0) value -= d2 * process_beta(sample, k, weights, {kInf, x.x2}, scheme);
  return value;
}

double process_dm(const BivariateSample& sample, int k, std::span<const double> weights, Point x,
                  const MultiplierScheme& scheme) {
  check_inputs(sample, k, weights);
  const double mean = total_weight(weights) / static_cast<double>(sample.size());
  const double t1 = literal_threshold(sample.column(1), weights, x.x1, k);
  const double t2 = literal_threshold(sample.column(2), weights, x.x2, k);
  const auto c1 = sample.column(1);
  const auto c2 = sample.column(2);
  double sum = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (c1[i] <= t1 && c2[i] <= t2) sum += weights[i] / mean;
  }
  const double weighted = sum / k;
  const double plain = EmpiricalTailCopula(sample, k).copula_form(x);
  return scheme.mu / scheme.tau * std::sqrt(static_cast<double>(k)) * (weighted - plain);
}

double process_resample(const BivariateSample& sample, int k, std::span<const std::size_t> indices,
                        Point x) {
  if (indices.size() != sample.size()) throw DomainError("resample must have n indices");
  if (k < 1 || static_cast<std::size_t>(k) > sample.size()) {
    throw DomainError("threshold count k must satisfy 1 <= k <= n");
  }
  std::vector<double> r1(indices.size()), r2(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    r1[j] = sample.column(1)[indices[j]];
    r2[j] = sample.column(2)[indices[j]];
  }
  const double t1 = literal_threshold(r1, {}, x.x1, k);
  const double t2 = literal_threshold(r2, {}, x.x2, k);
  std::int64_t count = 0;
  for (std::size_t j = 0; j < r1.size(); ++j) count += (r1[j] <= t1 && r2[j] <= t2) ? 1 : 0;
  const double plain = EmpiricalTailCopula(sample, k).copula_form(x);
  return std::sqrt(static_cast<double>(k)) * (static_cast<double>(count) / k - plain);
}

std::vector<std::size_t> draw_resample_indices(std::size_t n, RngStream& rng) {
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
  return idx;
}

std::vector<double> BootstrapEnsemble::covariance() const {
  const std::size_t P = width();
  std::vector<double> cov(P * P, 0.0);
  if (B < 2) return cov;
  std::vector<double> mean(P, 0.0);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t p = 0; p < P; ++p) mean[p] += at(b, p);
  }
  for (auto& m : mean) m /= static_cast<double>(B);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t p = 0; p < P; ++p) {
      const double dp = at(b, p) - mean[p];
      for (std::size_t q = p; q < P; ++q) cov[p * P + q] += dp * (at(b, q) - mean[q]);
    }
  }
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t q = p; q < P; ++q) {
      cov[p * P + q] /= static_cast<double>(B - 1);
      cov[q * P + p] = cov[p * P + q];
    }
  }
  return cov;
}

namespace {

// Shared, read-only state of one ensemble; rows are filled independently.
class Engine {
 public:
  Engine(BootstrapKind kind, const BivariateSample& sample, int k, std::span<const Point> points,
         const MultiplierScheme& scheme, const EnsembleOptions& options)
      : kind_(kind), sample_(sample), k_(k), n_(sample.size()), points_(points.begin(), points.end()),
        scheme_(scheme), options_(options) {
    const std::size_t P = points_.size();
    t1_.resize(P);
    t2_.resize(P);
    for (std::size_t p = 0; p < P; ++p) {
      t1_[p] = static_cast<std::int32_t>(rank_threshold(points_[p].x1, k_, n_, options_.form));
      t2_[p] = static_cast<std::int32_t>(rank_threshold(points_[p].x2, k_, n_, options_.form));
    }
    if (kind_ == BootstrapKind::KnownMargins) known_margin_thresholds();
    if (kind_ == BootstrapKind::DM || kind_ == BootstrapKind::Resample || kind_ == BootstrapKind::PDM) {
      const EmpiricalTailCopula etc(sample_, k_);
      plain_.resize(P);
      for (std::size_t p = 0; p < P; ++p) plain_[p] = etc.eval(points_[p], options_.form);
      if (kind_ == BootstrapKind::PDM) {
        d1_.resize(P);
        d2_.resize(P);
        for (std::size_t p = 0; p < P; ++p) {
          d1_[p] = estimate_partial_derivative(etc, points_[p], 1, options_.bandwidth);
          d2_[p] = estimate_partial_derivative(etc, points_[p], 2, options_.bandwidth);
          if (d1_[p] != 0.0) max_m1_ = std::max(max_m1_, t1_[p]);
          if (d2_[p] != 0.0) max_m2_ = std::max(max_m2_, t2_[p]);
        }
      }
    }
    if (kind_ != BootstrapKind::DM && kind_ != BootstrapKind::Resample) fixed_candidates();
  }

  struct Workspace {
    std::vector<double> weights;
    std::vector<std::int32_t> a, b;
    std::vector<double> w;
    std::vector<double> cum1, cum2;
    std::vector<std::int32_t> q1, q2;
    std::vector<double> sums;
    std::vector<std::uint32_t> counts;
    std::vector<std::int32_t> minrank1, minrank2;
  };

  void fill_row(RngStream rng, Workspace& ws, double* out, std::size_t& redraws) const {
    ws.sums.resize(points_.size());
    if (kind_ == BootstrapKind::Resample) {
      resample_row(rng, ws, out);
      return;
    }
    if (options_.constant_weights) {
      ws.weights.assign(n_, scheme_.mu);
    } else {
      ws.weights = draw_nondegenerate_weights(scheme_, n_, rng, redraws);
    }
    if (kind_ == BootstrapKind::DM) {
      dm_row(ws, out);
    } else {
      multiplier_row(ws, out);
    }
  }

 private:
  void known_margin_thresholds() {
    const Margins margins = options_.margins != nullptr ? *options_.margins : Margins::uniform();
    std::vector<double> f1(n_), f2(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      f1[i] = margins.first(sample_.column(1)[i]);
      f2[i] = margins.second(sample_.column(2)[i]);
    }
    std::sort(f1.begin(), f1.end());
    std::sort(f2.begin(), f2.end());
    const auto count_below = [&](const std::vector<double>& f, double x) -> std::int32_t {
      if (x == 0.0) return 0;
      if (std::isinf(x)) return static_cast<std::int32_t>(n_);
      const double q = scaled_coordinate(x, k_) / static_cast<double>(n_);
      return static_cast<std::int32_t>(std::upper_bound(f.begin(), f.end(), q) - f.begin());
    };
    for (std::size_t p = 0; p < points_.size(); ++p) {
      t1_[p] = count_below(f1, points_[p].x1);
      t2_[p] = count_below(f2, points_[p].x2);
    }
  }

  // Observations that can enter any indicator for the fixed-threshold kinds.
  void fixed_candidates() {
    const std::int32_t m1 = t1_.empty() ? 0 : *std::max_element(t1_.begin(), t1_.end());
    const std::int32_t m2 = t2_.empty() ? 0 : *std::max_element(t2_.begin(), t2_.end());
    const auto r1 = sample_.ranks(1);
    const auto r2 = sample_.ranks(2);
    for (std::size_t i = 0; i < n_; ++i) {
      if (r1[i] <= m1 && r2[i] <= m2) {
        cand_.push_back(static_cast<std::int32_t>(i));
        cand_r1_.push_back(r1[i]);
        cand_r2_.push_back(r2[i]);
      }
    }
  }

  double mean_weight(const std::vector<double>& weights) const {
    double total = 0.0;
    for (double w : weights) total += w;
    return total / static_cast<double>(n_);
  }

  void multiplier_row(Workspace& ws, double* out) const {
    const double mean = mean_weight(ws.weights);
    ws.w.resize(cand_.size());
    for (std::size_t c = 0; c < cand_.size(); ++c) ws.w[c] = ws.weights[cand_[c]] / mean - 1.0;
    kernels::dominance_sums(cand_r1_, cand_r2_, ws.w, t1_, t2_, ws.sums);
    const double scale = scheme_.mu / scheme_.tau / std::sqrt(static_cast<double>(k_));
    for (std::size_t p = 0; p < points_.size(); ++p) out[p] = scale * ws.sums[p];
    if (kind_ != BootstrapKind::PDM) return;
    // Marginal sections beta(x1, inf) and beta(inf, x2) as prefix sums in rank order.
    const auto prefix = [&](int column, std::int32_t upto, std::vector<double>& acc) {
      const auto owner = sample_.owner(column);
      acc.assign(static_cast<std::size_t>(upto) + 1, 0.0);
      for (std::int32_t r = 1; r <= upto; ++r) {
        acc[r] = acc[r - 1] + (ws.weights[owner[r - 1]] / mean - 1.0);
      }
    };
    prefix(1, max_m1_, ws.cum1);
    prefix(2, max_m2_, ws.cum2);
    for (std::size_t p = 0; p < points_.size(); ++p) {
      if (d1_[p] != 0.0) out[p] -= d1_[p] * scale * ws.cum1[t1_[p]];
      if (d2_[p] != 0.0) out[p] -= d2_[p] * scale * ws.cum2[t2_[p]];
    }
  }

  // Copula form: first rank whose cumulative weight in rank order reaches
  // k x (total / n). Rank form: last rank whose cumulative weight stays within it.
  void weighted_thresholds(int column, const Workspace& ws, double total, std::vector<double>& cum,
                           std::vector<std::int32_t>& q) const {
    const auto owner = sample_.owner(column);
    const std::size_t P = points_.size();
    q.resize(P);
    std::vector<double> targets(P, -1.0);
    double max_target = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      const double x = column == 1 ? points_[p].x1 : points_[p].x2;
      if (x == 0.0) {
        q[p] = 0;
      } else if (std::isinf(x) || scaled_coordinate(x, k_) >= static_cast<double>(n_)) {
        q[p] = static_cast<std::int32_t>(n_);
      } else {
        targets[p] = scaled_coordinate(x, k_) * total / static_cast<double>(n_);
        max_target = std::max(max_target, targets[p]);
      }
    }
    cum.clear();
    double running = 0.0;
    // the rank form also needs the ranks whose cumulative weight equals the target
    const bool rank = options_.form == EstimatorForm::Rank;
    for (std::size_t r = 0; r < n_ && (cum.empty() || running < max_target || (rank && running == max_target));
         ++r) {
      running += ws.weights[owner[r]];
      cum.push_back(running);
    }
    for (std::size_t p = 0; p < P; ++p) {
      if (targets[p] < 0.0) continue;
      if (options_.form == EstimatorForm::Rank) {
        q[p] = static_cast<std::int32_t>(std::upper_bound(cum.begin(), cum.end(), targets[p]) - cum.begin());
        continue;
      }
      const auto it = std::lower_bound(cum.begin(), cum.end(), targets[p]);
      q[p] = it == cum.end() ? static_cast<std::int32_t>(n_)
                             : static_cast<std::int32_t>(it - cum.begin()) + 1;
    }
  }

  void dm_row(Workspace& ws, double* out) const {
    double total = 0.0;
    for (double w : ws.weights) total += w;
    const double mean = total / static_cast<double>(n_);
    weighted_thresholds(1, ws, total, ws.cum1, ws.q1);
    weighted_thresholds(2, ws, total, ws.cum2, ws.q2);
    const std::int32_t m1 = *std::max_element(ws.q1.begin(), ws.q1.end());
    const std::int32_t m2 = *std::max_element(ws.q2.begin(), ws.q2.end());
    const auto owner1 = sample_.owner(1);
    const auto r2 = sample_.ranks(2);
    ws.a.clear();
    ws.b.clear();
    ws.w.clear();
    for (std::int32_t r = 1; r <= m1; ++r) {
      const std::int32_t i = owner1[r - 1];
      if (r2[i] <= m2 && ws.weights[i] > 0.0) {
        ws.a.push_back(r);
        ws.b.push_back(r2[i]);
        ws.w.push_back(ws.weights[i] / mean);
      }
    }
    kernels::dominance_sums(ws.a, ws.b, ws.w, ws.q1, ws.q2, ws.sums);
    const double scale = scheme_.mu / scheme_.tau * std::sqrt(static_cast<double>(k_));
    for (std::size_t p = 0; p < points_.size(); ++p) {
      out[p] = scale * (ws.sums[p] / k_ - plain_[p]);
    }
  }

  void resample_row(RngStream& rng, Workspace& ws, double* out) const {
    ws.counts.assign(n_, 0);
    for (std::size_t j = 0; j < n_; ++j) ++ws.counts[rng.below(n_)];
    // Smallest rank within the resample of the value with original rank r.
    const auto min_ranks = [&](int column, std::vector<std::int32_t>& mr) {
      const auto owner = sample_.owner(column);
      mr.resize(n_);
      std::int32_t below = 0;
      for (std::size_t r = 0; r < n_; ++r) {
        const std::uint32_t c = ws.counts[owner[r]];
        mr[r] = below + 1;
        below += static_cast<std::int32_t>(c);
      }
    };
    min_ranks(1, ws.minrank1);
    min_ranks(2, ws.minrank2);
    const std::int32_t m1 = *std::max_element(t1_.begin(), t1_.end());
    const std::int32_t m2 = *std::max_element(t2_.begin(), t2_.end());
    const auto r1 = sample_.ranks(1);
    const auto r2 = sample_.ranks(2);
    ws.a.clear();
    ws.b.clear();
    ws.w.clear();
    for (std::size_t i = 0; i < n_; ++i) {
      if (ws.counts[i] == 0) continue;
      const std::int32_t p1 = ws.minrank1[r1[i] - 1];
      const std::int32_t p2 = ws.minrank2[r2[i] - 1];
      if (p1 <= m1 && p2 <= m2) {
        ws.a.push_back(p1);
        ws.b.push_back(p2);
        ws.w.push_back(static_cast<double>(ws.counts[i]));
      }
    }
    kernels::dominance_sums(ws.a, ws.b, ws.w, t1_, t2_, ws.sums);
    const double root_k = std::sqrt(static_cast<double>(k_));
    for (std::size_t p = 0; p < points_.size(); ++p) {
      out[p] = root_k * (ws.sums[p] / k_ - plain_[p]);
    }
  }

  BootstrapKind kind_;
  const BivariateSample& sample_;
  int k_;
  std::size_t n_;
  std::vector<Point> points_;
  const MultiplierScheme& scheme_;
  EnsembleOptions options_;
  std::vector<std::int32_t> t1_, t2_;
  std::vector<double> plain_;
  std::vector<double> d1_, d2_;
  std::int32_t max_m1_ = 0, max_m2_ = 0;
  std::vector<std::int32_t> cand_, cand_r1_, cand_r2_;
};

}  // namespace

BootstrapEnsemble build_ensemble(BootstrapKind kind, const BivariateSample& sample, int k,
                                 std::size_t B, std::span<const Point> points,
                                 const MultiplierScheme& scheme, const RngStream& stream,
                                 const EnsembleOptions& options) {
  if (B == 0) throw ConfigError("number of bootstrap draws must be positive");
  if (points.empty()) throw ConfigError("empty point set");
  if (k < 1 || static_cast<std::size_t>(k) > sample.size()) {
    throw DomainError("threshold count k must satisfy 1 <= k <= n");
  }
  for (const Point& x : points) {
    if (!(x.x1 >= 0.0) || !(x.x2 >= 0.0)) throw DomainError("points must lie in [0, inf]^2");
    if (std::isinf(x.x1) && std::isinf(x.x2)) throw DomainError("cannot evaluate at (inf, inf)");
  }
  EnsembleOptions opts = options;
  if (kind == BootstrapKind::PDM && opts.bandwidth <= 0.0) opts.bandwidth = default_bandwidth(k);

  BootstrapEnsemble ens;
  ens.kind = kind;
  ens.points.assign(points.begin(), points.end());
  ens.n = sample.size();
  ens.k = k;
  ens.B = B;
  ens.bandwidth = kind == BootstrapKind::PDM ? opts.bandwidth : 0.0;
  ens.seed = stream.seed();
  ens.form = opts.form;
  if (kind == BootstrapKind::Resample) {
    ens.scheme_name = "multinomial";
    ens.moment_note = "";
  } else {
    ens.scheme_name = scheme.name;
    ens.mu = scheme.mu;
    ens.tau = scheme.tau;
    ens.moment_note = scheme.moment_note;
  }
  ens.draws.resize(B * points.size());

  const Engine engine(kind, sample, k, points, scheme, opts);
  const unsigned threads = std::min<unsigned>(resolve_threads(opts.threads), static_cast<unsigned>(B));
  std::vector<Engine::Workspace> spaces(threads);
  std::vector<std::size_t> redraws(B, 0);
  parallel_for(B, threads, [&](std::size_t b, unsigned worker) {
    engine.fill_row(stream.child(b), spaces[worker], ens.draws.data() + b * points.size(), redraws[b]);
  });
  ens.redraws = std::accumulate(redraws.begin(), redraws.end(), std::size_t{0});
  return ens;
}

void write_ensemble_csv(const BootstrapEnsemble& ensemble, std::ostream& out) {
  out << "draw";
  for (std::size_t p = 0; p < ensemble.width(); ++p) out << ",p" << p;
  out << '\n';
  for (std::size_t b = 0; b < ensemble.B; ++b) {
    out << b;
    for (double v : ensemble.row(b)) out << ',' << fmt::format("{:.17g}", v);
    out << '\n';
  }
}

nlohmann::json ensemble_metadata(const BootstrapEnsemble& ensemble) {
  nlohmann::json points = nlohmann::json::array();
  for (const Point& x : ensemble.points) {
    const auto coord = [](double v) -> nlohmann::json {
      if (std::isinf(v)) return "inf";
      return v;
    };
    points.push_back({coord(x.x1), coord(x.x2)});
  }
  nlohmann::json meta = {
      {"kind", kind_name(ensemble.kind)},
      {"form", ensemble.form == EstimatorForm::Rank ? "rank" : "copula"},
      {"n", ensemble.n},
      {"k", ensemble.k},
      {"B", ensemble.B},
      {"seed", ensemble.seed},
      {"points", points},
      {"redraws", ensemble.redraws},
      {"kernel", kernels::active().name},
      {"multipliers",
       {{"name", ensemble.scheme_name},
        {"mu", ensemble.mu},
        {"tau", ensemble.tau},
        {"moment_condition", ensemble.moment_note}}},
  };
  if (ensemble.kind == BootstrapKind::PDM) meta["bandwidth"] = ensemble.bandwidth;
  return meta;
}

}  // namespace tailcop
