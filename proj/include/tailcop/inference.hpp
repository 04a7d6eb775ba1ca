#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tailcop/bootstrap.hpp"
#include "tailcop/estimators.hpp"
#include "tailcop/models.hpp"
#include "tailcop/point.hpp"
#include "tailcop/rng.hpp"
#include "tailcop/sample.hpp"

namespace tailcop {

// Quadrature rule for integrals over phi in [0, pi/2] of functions evaluated
// at (cos phi, sin phi).
class AngularGrid {
 public:
  AngularGrid(std::vector<double> nodes, std::vector<double> weights);

  // m midpoint nodes (j - 1/2) pi / (2m) with equal weights pi / (2m).
  static AngularGrid midpoint(std::size_t m = 100);

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  const std::vector<Point>& points() const { return points_; }

  // sum_j w_j v_j
  double integrate(std::span<const double> values) const;

  // Same nodes, weights multiplied by c > 0.
  AngularGrid rescaled(double c) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<Point> points_;
};

// int (f(phi) - g(phi))^2 dphi by the grid rule.
double angular_distance(const std::function<double(double)>& f,
                        const std::function<double(double)>& g, const AngularGrid& grid);
// Same with both functions given by their values on the grid nodes.
double angular_distance(std::span<const double> f, std::span<const double> g,
                        const AngularGrid& grid);

// Values of the model and of an empirical tail copula (copula form) on the
// grid points.
std::vector<double> model_curve(const TailCopulaModel& model, const AngularGrid& grid);
std::vector<double> empirical_curve(const EmpiricalTailCopula& etc, const AngularGrid& grid,
                                    EstimatorForm form = EstimatorForm::Copula);

// Covariance of the limit process of sqrt(k) (Lambda_hat - Lambda) at finite
// points x and y.
double true_cov_Ghat(const TailCopulaModel& model, Point x, Point y);
std::vector<double> true_cov_matrix(const TailCopulaModel& model, std::span<const Point> points);

// ceil(B beta)-th order statistic; beta = 0 gives the minimum.
double empirical_quantile(std::span<const double> values, double beta);

struct TestReport {
  std::string test;
  double statistic = 0.0;
  std::vector<double> boot;
  double alpha = 0.05;
  double quantile = 0.0;  // empirical (1 - alpha)-quantile of boot
  double p_value = 1.0;   // share of boot values >= statistic
  bool reject = false;
  nlohmann::json config;

  // Decision at another level from the same bootstrap values.
  bool rejects_at(double level) const;
  nlohmann::json to_json(bool include_boot = false) const;
};

// Assembles quantile, p-value and decision from a statistic and its draws.
TestReport make_report(std::string test, double statistic, std::vector<double> boot, double alpha);

struct TestOptions {
  MultiplierScheme scheme = MultiplierScheme::two_point();
  AngularGrid grid = AngularGrid::midpoint();
  EstimatorForm form = EstimatorForm::Copula;  // thresholds of statistics and ensembles
  unsigned threads = 1;
};

// Test of Lambda_X = Lambda_Y from independent samples. The bootstrap kind
// is PDM or DM; X uses rng.child(1) and Y rng.child(2).
TestReport two_sample_test(const BivariateSample& x, const BivariateSample& y, int k1, int k2,
                           std::size_t B, double alpha, BootstrapKind kind, const RngStream& rng,
                           const TestOptions& options = {});

std::pair<double, double> default_theta_bounds(Family family);

// Minimizer over theta in [lower, upper] of int (curve - Lambda(.; theta))^2
// for a curve given on the grid nodes.
double md_estimate(std::span<const double> curve, Family family, const AngularGrid& grid,
                   std::pair<double, double> bounds, const ModelShape& shape = {});
double md_estimate(const BivariateSample& sample, int k, Family family, const AngularGrid& grid,
                   std::pair<double, double> bounds, const ModelShape& shape = {});

// Linearization of the minimum-distance functional at a fitted model:
// delta = d/dtheta Lambda, A = int delta^2 + d2/dtheta2 Lambda (Lambda_theta -
// curve), gamma = delta / A, all on the grid nodes.
struct MDLinearization {
  std::vector<double> delta;
  std::vector<double> gamma;
  double A = 0.0;
};

// Pass an empty curve to drop the correction term (true-model form).
MDLinearization md_linearization(const TailCopulaModel& fitted, std::span<const double> curve,
                                 const AngularGrid& grid);

// Draws int gamma Gamma_b dphi for every ensemble row Gamma_b.
std::vector<double> md_bootstrap(const MDLinearization& lin, const BootstrapEnsemble& ensemble,
                                 const AngularGrid& grid);
std::vector<double> md_bootstrap(const BivariateSample& sample, int k,
                                 const TailCopulaModel& fitted, const BootstrapEnsemble& ensemble,
                                 const AngularGrid& grid);

double analytic_md_variance(const TailCopulaModel& model, const AngularGrid& grid);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double v) const { return lower <= v && v <= upper; }
};

// [theta - q_{1 - alpha/2} / sqrt(k), theta - q_{alpha/2} / sqrt(k)]
Interval md_confidence_interval(double theta_hat, std::span<const double> boot, int k, double alpha);

struct MDEstimate {
  Family family = Family::Clayton;
  double theta_hat = 0.0;
  std::vector<double> boot;
  double alpha = 0.05;
  Interval ci;
  std::optional<double> sigma2;
  int k_estimate = 0;
  int k_bootstrap = 0;
  nlohmann::json config;

  Interval interval(double level_alpha) const;
  nlohmann::json to_json(bool include_boot = false) const;
};

struct MDOptions {
  int k_bootstrap = 0;  // 0 uses the estimation k
  std::optional<std::pair<double, double>> bounds;
  ModelShape shape;
  bool with_sigma2 = false;
};

// Fit, bootstrap draws and confidence interval. The interval is scaled by
// the estimation k also when the ensemble uses a different k.
MDEstimate md_inference(const BivariateSample& sample, int k, Family family, std::size_t B,
                        double alpha, BootstrapKind kind, const RngStream& rng,
                        const TestOptions& options = {}, const MDOptions& md = {});

// Goodness-of-fit test of the parametric family with the minimum-distance fit.
TestReport gof_test(const BivariateSample& sample, int k, Family family, std::size_t B,
                    double alpha, BootstrapKind kind, const RngStream& rng,
                    const TestOptions& options = {}, const MDOptions& md = {});

}  // namespace tailcop
