#include "tailcop/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "tailcop/errors.hpp"
#include "tailcop/sample.hpp"

namespace tailcop {

namespace {

// Clayton tail copula (a^-theta + b^-theta)^(-1/theta) for finite a, b > 0,
// evaluated through log-sum-exp so that tiny coordinates do not overflow.
struct ClaytonTerms {
  double value;  // Lambda
  double p1;     // a^-theta / S
  double p2;     // b^-theta / S
  double log_s;  // log S
};

ClaytonTerms clayton_terms(double a, double b, double theta) {
  const double l1 = -theta * std::log(a);
  const double l2 = -theta * std::log(b);
  const double m = std::max(l1, l2);
  const double log_s = m + std::log(std::exp(l1 - m) + std::exp(l2 - m));
  return {std::exp(-log_s / theta), std::exp(l1 - log_s), std::exp(l2 - log_s), log_s};
}

double clayton_value(double a, double b, double theta) {
  return clayton_terms(a, b, theta).value;
}

// d/dtheta and d^2/dtheta^2 of the Clayton form. With g = log Lambda =
// -log S / theta, M1 = sum p_j log a_j and M2 = sum p_j log^2 a_j:
//   g'  = log S / theta^2 + M1 / theta
//   g'' = -2 log S / theta^3 - 2 M1 / theta^2 - (M2 - M1^2) / theta
void clayton_theta_derivatives(double a, double b, double theta, double& d1, double& d2) {
  const ClaytonTerms t = clayton_terms(a, b, theta);
  const double la = std::log(a);
  const double lb = std::log(b);
  const double m1 = t.p1 * la + t.p2 * lb;
  const double m2 = t.p1 * la * la + t.p2 * lb * lb;
  const double g1 = t.log_s / (theta * theta) + m1 / theta;
  const double g2 = -2.0 * t.log_s / (theta * theta * theta) - 2.0 * m1 / (theta * theta) -
                    (m2 - m1 * m1) / theta;
  d1 = t.value * g1;
  d2 = t.value * (g2 + g1 * g1);
}

double clayton_partial(double a, double b, double theta, int which) {
  const ClaytonTerms t = clayton_terms(a, b, theta);
  return which == 1 ? t.value * t.p1 / a : t.value * t.p2 / b;
}

void check_point(Point x) {
  if (!(x.x1 >= 0.0) || !(x.x2 >= 0.0)) {
    throw DomainError("tail copula argument must lie in [0, inf]^2");
  }
  if (std::isinf(x.x1) && std::isinf(x.x2)) {
    throw DomainError("tail copula is undefined at (inf, inf)");
  }
}

}  // namespace

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Clayton: return "clayton";
    case Family::ConvexClayton: return "convex_clayton";
    case Family::AsymNegLogistic: return "aneglog";
    case Family::Mixed: return "mixed";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "clayton") return Family::Clayton;
  if (name == "convex_clayton") return Family::ConvexClayton;
  if (name == "aneglog") return Family::AsymNegLogistic;
  if (name == "mixed") return Family::Mixed;
  throw ConfigError("unknown family '" + std::string(name) +
                    "' (expected clayton|convex_clayton|aneglog|mixed)");
}

bool ThetaDomain::contains(double theta) const {
  if (!std::isfinite(theta)) return false;
  const bool above = lower_open ? theta > lower : theta >= lower;
  const bool below = upper_open ? theta < upper : theta <= upper;
  return above && below;
}

ThetaDomain theta_domain(Family family) {
  if (family == Family::Mixed) return {0.0, 1.0, false, false};
  return {0.0, kInf, true, true};
}

TailCopulaModel::TailCopulaModel(Family family, double theta, ModelShape shape)
    : family_(family), theta_(theta), shape_(shape) {
  if (!theta_domain(family).contains(theta)) {
    throw DomainError("theta = " + std::to_string(theta) + " outside the domain of family " +
                      std::string(family_name(family)));
  }
  if (family == Family::ConvexClayton && !(shape.convex_weight > 0.0 && shape.convex_weight <= 1.0)) {
    throw DomainError("convex weight must lie in (0, 1]");
  }
  if (family == Family::AsymNegLogistic &&
      !(shape.psi1 > 0.0 && shape.psi1 <= 1.0 && shape.psi2 > 0.0 && shape.psi2 <= 1.0)) {
    throw DomainError("aneglog shape parameters must lie in (0, 1]");
  }
}

double TailCopulaModel::eval_at(Point x, double theta) const {
  check_point(x);
  if (std::isinf(x.x1)) return x.x2;
  if (std::isinf(x.x2)) return x.x1;
  if (x.x1 == 0.0 || x.x2 == 0.0) return 0.0;
  switch (family_) {
    case Family::Clayton: return clayton_value(x.x1, x.x2, theta);
    case Family::ConvexClayton: return shape_.convex_weight * clayton_value(x.x1, x.x2, theta);
    case Family::AsymNegLogistic:
      return clayton_value(shape_.psi1 * x.x1, shape_.psi2 * x.x2, theta);
    case Family::Mixed: return theta * x.x1 * x.x2 / (x.x1 + x.x2);
  }
  return 0.0;
}

double TailCopulaModel::eval(Point x) const { return eval_at(x, theta_); }

double TailCopulaModel::axis_limit() const {
  switch (family_) {
    case Family::Clayton: return 1.0;
    case Family::ConvexClayton: return shape_.convex_weight;
    case Family::AsymNegLogistic: return shape_.psi1;
    case Family::Mixed: return theta_;
  }
  return 0.0;
}

double TailCopulaModel::partial(Point x, int which) const {
  check_point(x);
  const double self = which == 1 ? x.x1 : x.x2;
  const double other = which == 1 ? x.x2 : x.x1;
  if (std::isinf(self)) return 0.0;
  if (std::isinf(other)) return 1.0;  // Lambda(x, inf) = x
  if (self == 0.0) {
    if (other == 0.0) return 0.0;
    // lim_{t->inf} Lambda(1, t) for which = 1, Lambda(t, 1) for which = 2.
    if (family_ == Family::AsymNegLogistic) return which == 1 ? shape_.psi1 : shape_.psi2;
    return axis_limit();
  }
  if (other == 0.0) return 0.0;
  switch (family_) {
    case Family::Clayton: return clayton_partial(x.x1, x.x2, theta_, which);
    case Family::ConvexClayton:
      return shape_.convex_weight * clayton_partial(x.x1, x.x2, theta_, which);
    case Family::AsymNegLogistic: {
      const double scale = which == 1 ? shape_.psi1 : shape_.psi2;
      return scale * clayton_partial(shape_.psi1 * x.x1, shape_.psi2 * x.x2, theta_, which);
    }
    case Family::Mixed: {
      const double s = x.x1 + x.x2;
      return theta_ * other * other / (s * s);
    }
  }
  return 0.0;
}

double TailCopulaModel::process_partial(Point x, int which) const {
  const double self = which == 1 ? x.x1 : x.x2;
  if (self == 0.0 || std::isinf(self)) return 0.0;
  return partial(x, which);
}

double TailCopulaModel::dtheta(Point x) const {
  check_point(x);
  if (std::isinf(x.x1) || std::isinf(x.x2) || x.x1 == 0.0 || x.x2 == 0.0) return 0.0;
  double d1 = 0.0, d2 = 0.0;
  switch (family_) {
    case Family::Clayton:
      clayton_theta_derivatives(x.x1, x.x2, theta_, d1, d2);
      return d1;
    case Family::ConvexClayton:
      clayton_theta_derivatives(x.x1, x.x2, theta_, d1, d2);
      return shape_.convex_weight * d1;
    case Family::Mixed: return x.x1 * x.x2 / (x.x1 + x.x2);
    case Family::AsymNegLogistic: {
      const double h = 1e-5 * std::max(1.0, std::abs(theta_));
      if (theta_ - h <= 0.0) return (eval_at(x, theta_ + h) - eval_at(x, theta_)) / h;
      return (eval_at(x, theta_ + h) - eval_at(x, theta_ - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

double TailCopulaModel::d2theta(Point x) const {
  check_point(x);
  if (std::isinf(x.x1) || std::isinf(x.x2) || x.x1 == 0.0 || x.x2 == 0.0) return 0.0;
  double d1 = 0.0, d2 = 0.0;
  switch (family_) {
    case Family::Clayton:
      clayton_theta_derivatives(x.x1, x.x2, theta_, d1, d2);
      return d2;
    case Family::ConvexClayton:
      clayton_theta_derivatives(x.x1, x.x2, theta_, d1, d2);
      return shape_.convex_weight * d2;
    case Family::Mixed: return 0.0;
    case Family::AsymNegLogistic: {
      double h = 1e-4 * std::max(1.0, std::abs(theta_));
      double center = theta_;
      if (center - h <= 0.0) center = h * 1.5;  // stay inside (0, inf)
      const double f0 = eval_at(x, center);
      return (eval_at(x, center + h) - 2.0 * f0 + eval_at(x, center - h)) / (h * h);
    }
  }
  return 0.0;
}

double TailCopulaModel::tail_dependence() const { return eval({1.0, 1.0}); }

double max_tail_dependence(Family family, const ModelShape& shape) {
  switch (family) {
    case Family::Clayton: return 1.0;
    case Family::ConvexClayton: return shape.convex_weight;
    case Family::AsymNegLogistic: return std::min(shape.psi1, shape.psi2);
    case Family::Mixed: return 0.5;
  }
  return 0.0;
}

double solve_theta_for_lambda(Family family, double lambda, const ModelShape& shape) {
  const double sup = max_tail_dependence(family, shape);
  const auto unattainable = [&] {
    return RangeError("tail dependence " + std::to_string(lambda) + " is not attainable by family " +
                      std::string(family_name(family)));
  };
  const auto coefficient = [&](double theta) {
    return TailCopulaModel(family, theta, shape).tail_dependence();
  };

  if (family == Family::Mixed) {
    if (!(lambda >= 0.0 && lambda <= sup)) throw unattainable();
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (coefficient(mid) < lambda ? lo : hi) = mid;
    }
    return std::abs(coefficient(lo) - lambda) <= std::abs(coefficient(hi) - lambda) ? lo : hi;
  }

  if (!(lambda > 0.0 && lambda < sup)) throw unattainable();
  // Coefficients are increasing in theta; bisect on log(theta).
  double log_lo = std::log(1e-4), log_hi = std::log(1e4);
  while (coefficient(std::exp(log_lo)) > lambda) {
    log_lo -= 4.0;
    if (log_lo < -700.0) throw unattainable();
  }
  while (coefficient(std::exp(log_hi)) < lambda) {
    log_hi += 4.0;
    if (log_hi > 700.0) throw unattainable();
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (mid == log_lo || mid == log_hi) break;
    (coefficient(std::exp(mid)) < lambda ? log_lo : log_hi) = mid;
  }
  const double lo = std::exp(log_lo), hi = std::exp(log_hi);
  const double theta = std::abs(coefficient(lo) - lambda) <= std::abs(coefficient(hi) - lambda) ? lo : hi;
  if (!(std::abs(coefficient(theta) - lambda) < 1e-12)) throw unattainable();
  return theta;
}

namespace {

// Conditional inversion for the survival copula of the extreme-value copula
// C(u, v) = exp(-l(-log u, -log v)) with l(x, y) = x + y - Lambda(x, y).
// Returns (1 - U, 1 - V); its lower tail copula is Lambda.
void sample_ev_survival(const TailCopulaModel& model, RngStream& rng, double& out1, double& out2) {
  const double a = rng.uniform();
  const double p = rng.uniform();
  const double x = -std::log1p(-a);  // -log U with U = 1 - a
  // h(s) = C_{2|1}(1 - s | U) = exp(Lambda(x, y) - y) (1 - d1 Lambda(x, y)),
  // y = -log(1 - s); decreasing from 1 at s = 0 to 0 at s = 1.
  const auto excess = [&](double s) {
    if (s <= 0.0) return 1.0 - p;
    if (s >= 1.0) return -p;
    const double y = -std::log1p(-s);
    const Point pt{x, y};
    return std::exp(model.eval(pt) - y) * (1.0 - model.partial(pt, 1)) - p;
  };
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      excess, 0.0, 1.0, 1.0 - p, -p, boost::math::tools::eps_tolerance<double>(52), max_iter);
  out1 = a;
  out2 = 0.5 * (bracket.first + bracket.second);
}

void sample_clayton(double theta, RngStream& rng, double& out1, double& out2) {
  const double u = rng.uniform();
  const double w = rng.uniform();
  const double inner = std::pow(u, -theta) * (std::pow(w, -theta / (1.0 + theta)) - 1.0) + 1.0;
  out1 = u;
  out2 = std::pow(inner, -1.0 / theta);
}

}  // namespace

void sample_copula_into(const TailCopulaModel& model, std::size_t n, RngStream& rng, double* u1,
                        double* u2) {
  for (std::size_t i = 0; i < n; ++i) {
    switch (model.family()) {
      case Family::Clayton: sample_clayton(model.theta(), rng, u1[i], u2[i]); break;
      case Family::ConvexClayton: {
        // Mixture of Clayton (probability w) and independence.
        const bool clayton = rng.uniform() < model.shape().convex_weight;
        if (clayton) {
          sample_clayton(model.theta(), rng, u1[i], u2[i]);
        } else {
          u1[i] = rng.uniform();
          u2[i] = rng.uniform();
        }
        break;
      }
      case Family::AsymNegLogistic:
      case Family::Mixed: sample_ev_survival(model, rng, u1[i], u2[i]); break;
    }
  }
}

BivariateSample sample_copula(const TailCopulaModel& model, std::size_t n, RngStream& rng) {
  std::vector<double> u1(n), u2(n);
  sample_copula_into(model, n, rng, u1.data(), u2.data());
  return BivariateSample(std::move(u1), std::move(u2));
}

}  // namespace tailcop
