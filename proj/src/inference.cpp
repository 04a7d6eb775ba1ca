#include "tailcop/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "tailcop/errors.hpp"
#include "tailcop/kernels.hpp"

namespace tailcop {

AngularGrid::AngularGrid(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (nodes_.empty() || nodes_.size() != weights_.size()) {
    throw ConfigError("angular grid needs matching, nonempty nodes and weights");
  }
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    if (!(nodes_[j] >= 0.0 && nodes_[j] <= std::numbers::pi / 2)) {
      throw ConfigError("angular nodes must lie in [0, pi/2]");
    }
    if (j > 0 && !(nodes_[j] > nodes_[j - 1])) throw ConfigError("angular nodes must increase");
    if (!(weights_[j] > 0.0)) throw ConfigError("quadrature weights must be positive");
  }
  points_.reserve(nodes_.size());
  for (double phi : nodes_) points_.push_back(angular_point(phi));
}

AngularGrid AngularGrid::midpoint(std::size_t m) {
  if (m == 0) throw ConfigError("angular grid needs at least one node");
  const double h = std::numbers::pi / (2.0 * static_cast<double>(m));
  std::vector<double> nodes(m), weights(m, h);
  for (std::size_t j = 0; j < m; ++j) nodes[j] = (static_cast<double>(j) + 0.5) * h;
  return {std::move(nodes), std::move(weights)};
}

double AngularGrid::integrate(std::span<const double> values) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) sum += weights_[j] * values[j];
  return sum;
}

AngularGrid AngularGrid::rescaled(double c) const {
  std::vector<double> w(weights_);
  for (auto& v : w) v *= c;
  return {nodes_, std::move(w)};
}

double angular_distance(std::span<const double> f, std::span<const double> g,
                        const AngularGrid& grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) {
    throw DomainError("curves must be given on the grid nodes");
  }
  std::vector<double> diff(grid.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = f[j] - g[j];
  return kernels::weighted_sum_squares(grid.weights(), diff);
}

double angular_distance(const std::function<double(double)>& f,
                        const std::function<double(double)>& g, const AngularGrid& grid) {
  std::vector<double> fv(grid.size()), gv(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    fv[j] = f(grid.nodes()[j]);
    gv[j] = g(grid.nodes()[j]);
  }
  return angular_distance(fv, gv, grid);
}

std::vector<double> model_curve(const TailCopulaModel& model, const AngularGrid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = model.eval(grid.points()[j]);
  return v;
}

std::vector<double> empirical_curve(const EmpiricalTailCopula& etc, const AngularGrid& grid,
                                    EstimatorForm form) {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = etc.eval(grid.points()[j], form);
  return v;
}

double true_cov_Ghat(const TailCopulaModel& model, Point x, Point y) {
  const auto L = [&](double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return model.eval({a, b});
  };
  const double x1y1 = std::min(x.x1, y.x1);
  const double x2y2 = std::min(x.x2, y.x2);
  const double dx1 = model.process_partial(x, 1), dx2 = model.process_partial(x, 2);
  const double dy1 = model.process_partial(y, 1), dy2 = model.process_partial(y, 2);
  return L(x1y1, x2y2)                     //
         - dy1 * L(x1y1, x.x2)             //
         - dy2 * L(x.x1, x2y2)             //
         - dx1 * L(x1y1, y.x2)             //
         - dx2 * L(y.x1, x2y2)             //
         + dx1 * dy1 * x1y1                //
         + dx1 * dy2 * L(x.x1, y.x2)       //
         + dx2 * dy1 * L(y.x1, x.x2)       //
         + dx2 * dy2 * x2y2;
}

std::vector<double> true_cov_matrix(const TailCopulaModel& model, std::span<const Point> points) {
  const std::size_t P = points.size();
  std::vector<double> m(P * P);
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t j = i; j < P; ++j) {
      m[i * P + j] = m[j * P + i] = true_cov_Ghat(model, points[i], points[j]);
    }
  }
  return m;
}

double empirical_quantile(std::span<const double> values, double beta) {
  if (values.empty()) throw DomainError("quantile of an empty set");
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("quantile level outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = static_cast<double>(sorted.size()) * beta;
  // B * beta lands a hair above an integer for levels such as 0.95.
  const double nearest = std::round(pos);
  const double rank = std::abs(pos - nearest) <= 1e-9 ? nearest : std::ceil(pos);
  const auto idx = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(sorted.size())));
  return sorted[idx - 1];
}

bool TestReport::rejects_at(double level) const {
  return statistic > empirical_quantile(boot, 1.0 - level);
}

nlohmann::json TestReport::to_json(bool include_boot) const {
  nlohmann::json quantiles;
  for (double q : {0.85, 0.90, 0.95}) quantiles[fmt::format("{:.2f}", q)] = empirical_quantile(boot, q);
  nlohmann::json j = {
      {"test", test},
      {"statistic", statistic},
      {"alpha", alpha},
      {"quantile", quantile},
      {"p_value", p_value},
      {"decision", reject ? "reject" : "retain"},
      {"B", boot.size()},
      {"quantiles", quantiles},
      {"config", config},
  };
  if (include_boot) j["boot"] = boot;
  return j;
}

TestReport make_report(std::string test, double statistic, std::vector<double> boot, double alpha) {
  if (boot.empty()) throw ConfigError("number of bootstrap draws must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  TestReport r;
  r.test = std::move(test);
  r.statistic = statistic;
  r.alpha = alpha;
  r.quantile = empirical_quantile(boot, 1.0 - alpha);
  const auto exceed = std::count_if(boot.begin(), boot.end(), [&](double v) { return v >= statistic; });
  r.p_value = static_cast<double>(exceed) / static_cast<double>(boot.size());
  r.reject = statistic > r.quantile;
  r.boot = std::move(boot);
  return r;
}

namespace {

nlohmann::json scheme_json(const MultiplierScheme& s) {
  return {{"name", s.name}, {"mu", s.mu}, {"tau", s.tau}, {"moment_condition", s.moment_note}};
}

}  // namespace

TestReport two_sample_test(const BivariateSample& x, const BivariateSample& y, int k1, int k2,
                           std::size_t B, double alpha, BootstrapKind kind, const RngStream& rng,
                           const TestOptions& options) {
  if (B == 0) throw ConfigError("number of bootstrap draws must be positive");
  if (kind == BootstrapKind::KnownMargins || kind == BootstrapKind::Beta) {
    throw ConfigError(fmt::format("{} processes cannot drive the two-sample test", kind_name(kind)));
  }
  const AngularGrid& grid = options.grid;
  const EmpiricalTailCopula ex(x, k1), ey(y, k2);
  const double kk = static_cast<double>(k1) * k2 / (static_cast<double>(k1) + k2);
  const double statistic = kk * angular_distance(empirical_curve(ex, grid, options.form), empirical_curve(ey, grid, options.form), grid);

  EnsembleOptions eo;
  eo.threads = options.threads;
  eo.form = options.form;
  const auto bx = build_ensemble(kind, x, k1, B, grid.points(), options.scheme, rng.child(1), eo);
  const auto by = build_ensemble(kind, y, k2, B, grid.points(), options.scheme, rng.child(2), eo);
  const double cx = std::sqrt(static_cast<double>(k2) / (k1 + k2));
  const double cy = std::sqrt(static_cast<double>(k1) / (k1 + k2));
  std::vector<double> boot(B), diff(grid.size());
  for (std::size_t b = 0; b < B; ++b) {
    const auto rx = bx.row(b), ry = by.row(b);
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = cx * rx[j] - cy * ry[j];
    boot[b] = kernels::weighted_sum_squares(grid.weights(), diff);
  }
  TestReport r = make_report("two_sample", statistic, std::move(boot), alpha);
  r.config = {{"n1", x.size()}, {"n2", y.size()}, {"k1", k1}, {"k2", k2},
              {"B", B},        {"alpha", alpha},  {"kind", kind_name(kind)},
              {"seed", rng.seed()}, {"grid_nodes", grid.size()},
              {"form", options.form == EstimatorForm::Rank ? "rank" : "copula"},
              {"multipliers", scheme_json(options.scheme)}};
  return r;
}

std::pair<double, double> default_theta_bounds(Family family) {
  switch (family) {
    case Family::Mixed: return {0.0, 1.0};
    default: return {0.05, 20.0};
  }
}

namespace {

struct Objective {
  std::span<const double> curve;
  Family family;
  const AngularGrid& grid;
  ModelShape shape;

  double operator()(double theta) const {
    const TailCopulaModel model(family, theta, shape);
    double sum = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double d = curve[j] - model.eval(grid.points()[j]);
      sum += grid.weights()[j] * d * d;
    }
    if (!std::isfinite(sum)) {
      throw ModelError(fmt::format("minimum-distance objective is not finite at theta = {}", theta));
    }
    return sum;
  }

  // Newton step sum w (curve - Lambda) delta / A.
  double newton_step(double theta) const {
    const TailCopulaModel model(family, theta, shape);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const Point& p = grid.points()[j];
      const double r = curve[j] - model.eval(p);
      const double d = model.dtheta(p);
      num += grid.weights()[j] * r * d;
      den += grid.weights()[j] * (d * d - r * model.d2theta(p));
    }
    return den > 0.0 ? num / den : 0.0;
  }
};

}  // namespace

double md_estimate(std::span<const double> curve, Family family, const AngularGrid& grid,
                   std::pair<double, double> bounds, const ModelShape& shape) {
  if (curve.size() != grid.size()) throw DomainError("curve must be given on the grid nodes");
  auto [lo, hi] = bounds;
  const ThetaDomain dom = theta_domain(family);
  if (!(lo < hi) || !dom.contains(lo) || !dom.contains(hi)) {
    throw ConfigError("theta bounds must be an interval inside the family domain");
  }
  const Objective f{curve, family, grid, shape};
  const bool log_spaced = lo > 0.0;
  constexpr int kStarts = 5;
  double best_theta = lo, best_value = f(lo);
  if (const double v = f(hi); v < best_value) best_theta = hi, best_value = v;
  for (int s = 0; s < kStarts; ++s) {
    const auto edge = [&](int i) {
      if (i == 0) return lo;
      if (i == kStarts) return hi;
      return log_spaced ? lo * std::pow(hi / lo, static_cast<double>(i) / kStarts)
                        : lo + (hi - lo) * i / kStarts;
    };
    const double a = edge(s), b = edge(s + 1);
    std::uintmax_t iters = 200;
    auto [theta, value] = boost::math::tools::brent_find_minima(f, a, b, 26, iters);
    // Newton polish beyond the sqrt(epsilon) resolution of a derivative-free search.
    for (int it = 0; it < 5; ++it) {
      const double next = theta + f.newton_step(theta);
      if (!(next >= lo && next <= hi)) break;
      const double nv = f(next);
      if (!(nv <= value)) break;
      const bool done = std::abs(next - theta) <= 1e-14 * std::max(1.0, std::abs(theta));
      theta = next;
      value = nv;
      if (done) break;
    }
    if (value < best_value) best_theta = theta, best_value = value;
  }
  return best_theta;
}

double md_estimate(const BivariateSample& sample, int k, Family family, const AngularGrid& grid,
                   std::pair<double, double> bounds, const ModelShape& shape) {
  const EmpiricalTailCopula etc(sample, k);
  return md_estimate(empirical_curve(etc, grid), family, grid, bounds, shape);
}

MDLinearization md_linearization(const TailCopulaModel& fitted, std::span<const double> curve,
                                 const AngularGrid& grid) {
  MDLinearization lin;
  lin.delta.resize(grid.size());
  std::vector<double> integrand(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Point& p = grid.points()[j];
    const double d = fitted.dtheta(p);
    lin.delta[j] = d;
    integrand[j] = d * d;
    if (!curve.empty()) integrand[j] += fitted.d2theta(p) * (fitted.eval(p) - curve[j]);
  }
  lin.A = grid.integrate(integrand);
  if (!(std::abs(lin.A) >= 1e-10)) {
    throw SingularityError(fmt::format("minimum-distance Hessian {} is numerically zero", lin.A));
  }
  lin.gamma.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) lin.gamma[j] = lin.delta[j] / lin.A;
  return lin;
}

std::vector<double> md_bootstrap(const MDLinearization& lin, const BootstrapEnsemble& ensemble,
                                 const AngularGrid& grid) {
  if (ensemble.width() != grid.size()) throw DomainError("ensemble must live on the grid points");
  if (!(std::abs(lin.A) >= 1e-10)) {
    throw SingularityError(fmt::format("minimum-distance Hessian {} is numerically zero", lin.A));
  }
  std::vector<double> out(ensemble.B);
  for (std::size_t b = 0; b < ensemble.B; ++b) {
    out[b] = kernels::weighted_dot(grid.weights(), lin.gamma, ensemble.row(b));
  }
  return out;
}

std::vector<double> md_bootstrap(const BivariateSample& sample, int k,
                                 const TailCopulaModel& fitted, const BootstrapEnsemble& ensemble,
                                 const AngularGrid& grid) {
  const EmpiricalTailCopula etc(sample, k);
  return md_bootstrap(md_linearization(fitted, empirical_curve(etc, grid), grid), ensemble, grid);
}

double analytic_md_variance(const TailCopulaModel& model, const AngularGrid& grid) {
  const MDLinearization lin = md_linearization(model, {}, grid);
  const std::size_t m = grid.size();
  std::vector<double> wg(m);
  for (std::size_t j = 0; j < m; ++j) wg[j] = grid.weights()[j] * lin.gamma[j];
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      row += wg[j] * true_cov_Ghat(model, grid.points()[i], grid.points()[j]);
    }
    sum += wg[i] * row;
  }
  return sum;
}

Interval md_confidence_interval(double theta_hat, std::span<const double> boot, int k, double alpha) {
  if (boot.empty()) throw ConfigError("number of bootstrap draws must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const double root_k = std::sqrt(static_cast<double>(k));
  return {theta_hat - empirical_quantile(boot, 1.0 - alpha / 2) / root_k,
          theta_hat - empirical_quantile(boot, alpha / 2) / root_k};
}

Interval MDEstimate::interval(double level_alpha) const {
  return md_confidence_interval(theta_hat, boot, k_estimate, level_alpha);
}

nlohmann::json MDEstimate::to_json(bool include_boot) const {
  nlohmann::json j = {
      {"family", family_name(family)},
      {"theta_hat", theta_hat},
      {"alpha", alpha},
      {"ci", {ci.lower, ci.upper}},
      {"k_estimate", k_estimate},
      {"k_bootstrap", k_bootstrap},
      {"ci_scaling_k", k_estimate},
      {"B", boot.size()},
      {"config", config},
  };
  nlohmann::json quantiles;
  for (double q : {0.85, 0.90, 0.95}) quantiles[fmt::format("{:.2f}", q)] = empirical_quantile(boot, q);
  j["quantiles"] = quantiles;
  if (sigma2) j["sigma2_analytic"] = *sigma2;
  if (include_boot) j["boot"] = boot;
  return j;
}

MDEstimate md_inference(const BivariateSample& sample, int k, Family family, std::size_t B,
                        double alpha, BootstrapKind kind, const RngStream& rng,
                        const TestOptions& options, const MDOptions& md) {
  if (B == 0) throw ConfigError("number of bootstrap draws must be positive");
  const AngularGrid& grid = options.grid;
  const auto bounds = md.bounds.value_or(default_theta_bounds(family));
  const EmpiricalTailCopula etc(sample, k);
  const auto curve = empirical_curve(etc, grid, options.form);
  MDEstimate est;
  est.family = family;
  est.alpha = alpha;
  est.k_estimate = k;
  est.k_bootstrap = md.k_bootstrap > 0 ? md.k_bootstrap : k;
  est.theta_hat = md_estimate(curve, family, grid, bounds, md.shape);
  const TailCopulaModel fitted(family, est.theta_hat, md.shape);
  const MDLinearization lin = md_linearization(fitted, curve, grid);
  EnsembleOptions eo;
  eo.threads = options.threads;
  eo.form = options.form;
  const auto ens = build_ensemble(kind, sample, est.k_bootstrap, B, grid.points(), options.scheme,
                                  rng.child(1), eo);
  est.boot = md_bootstrap(lin, ens, grid);
  est.ci = md_confidence_interval(est.theta_hat, est.boot, k, alpha);
  if (md.with_sigma2) est.sigma2 = analytic_md_variance(fitted, grid);
  est.config = {{"n", sample.size()}, {"B", B}, {"kind", kind_name(kind)},
                {"seed", rng.seed()}, {"bounds", {bounds.first, bounds.second}},
                {"grid_nodes", grid.size()},
              {"form", options.form == EstimatorForm::Rank ? "rank" : "copula"}, {"multipliers", scheme_json(options.scheme)},
                {"ci_scaling_k", k}};
  return est;
}

TestReport gof_test(const BivariateSample& sample, int k, Family family, std::size_t B,
                    double alpha, BootstrapKind kind, const RngStream& rng,
                    const TestOptions& options, const MDOptions& md) {
  if (B == 0) throw ConfigError("number of bootstrap draws must be positive");
  const AngularGrid& grid = options.grid;
  const auto bounds = md.bounds.value_or(default_theta_bounds(family));
  const EmpiricalTailCopula etc(sample, k);
  const auto curve = empirical_curve(etc, grid, options.form);
  const double theta_hat = md_estimate(curve, family, grid, bounds, md.shape);
  const TailCopulaModel fitted(family, theta_hat, md.shape);
  const double statistic = k * angular_distance(curve, model_curve(fitted, grid), grid);
  const MDLinearization lin = md_linearization(fitted, curve, grid);

  EnsembleOptions eo;
  eo.threads = options.threads;
  eo.form = options.form;
  const auto ens = build_ensemble(kind, sample, k, B, grid.points(), options.scheme, rng.child(1), eo);
  std::vector<double> boot(B), h(grid.size());
  for (std::size_t b = 0; b < B; ++b) {
    const auto row = ens.row(b);
    const double proj = kernels::weighted_dot(grid.weights(), lin.gamma, row);
    for (std::size_t j = 0; j < h.size(); ++j) h[j] = row[j] - lin.delta[j] * proj;
    boot[b] = kernels::weighted_sum_squares(grid.weights(), h);
  }
  TestReport r = make_report("goodness_of_fit", statistic, std::move(boot), alpha);
  r.config = {{"n", sample.size()}, {"k", k}, {"B", B}, {"alpha", alpha},
              {"family", family_name(family)}, {"theta_hat", theta_hat},
              {"kind", kind_name(kind)}, {"seed", rng.seed()}, {"grid_nodes", grid.size()},
              {"form", options.form == EstimatorForm::Rank ? "rank" : "copula"},
              {"multipliers", scheme_json(options.scheme)}};
  return r;
}

}  // namespace tailcop
