#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

#include "tailcop/point.hpp"
#include "tailcop/rng.hpp"

namespace tailcop {

class BivariateSample;

enum class Family { Clayton, ConvexClayton, AsymNegLogistic, Mixed };

// Config names: clayton | convex_clayton | aneglog | mixed.
std::string_view family_name(Family family);
Family parse_family(std::string_view name);

// Fixed shape parameters of the non-Clayton families.
struct ModelShape {
  double convex_weight = 1.0 / 3.0;  // ConvexClayton: weight of the Clayton part
  double psi1 = 2.0 / 3.0;           // AsymNegLogistic
  double psi2 = 1.0;                 // AsymNegLogistic
};

// Closed interval of admissible theta values; open ends are flagged.
struct ThetaDomain {
  double lower;
  double upper;
  bool lower_open;
  bool upper_open;

  bool contains(double theta) const;
};

ThetaDomain theta_domain(Family family);

// A parametric lower tail copula Lambda(x; theta) on [0, inf]^2.
//
// The angular families (AsymNegLogistic, Mixed) are specified on the segment
// (1 - t, t) and extended to the quadrant by homogeneity, Lambda(c x) =
// c Lambda(x). On marginal sections Lambda(x, inf) = x, the value every tail
// copula of a distribution with continuous margins takes there.
class TailCopulaModel {
 public:
  TailCopulaModel(Family family, double theta, ModelShape shape = {});

  Family family() const { return family_; }
  double theta() const { return theta_; }
  const ModelShape& shape() const { return shape_; }
  TailCopulaModel with_theta(double theta) const { return {family_, theta, shape_}; }

  double eval(Point x) const;
  double operator()(Point x) const { return eval(x); }

  // Analytic d/dx_which Lambda(x). On an axis x_which = 0 with the other
  // coordinate positive this returns the one-sided limit lim_{t->inf}
  // Lambda(1, t); at the origin it returns 0. A coordinate equal to
  // infinity yields 0.
  double partial(Point x, int which) const;

  // Same as partial() but with the convention used by the limit process of
  // the empirical tail copula: 0 whenever x_which is 0 or infinite.
  double process_partial(Point x, int which) const;

  // d/dtheta and d^2/dtheta^2 of Lambda(x; theta) at finite x.
  double dtheta(Point x) const;
  double d2theta(Point x) const;

  // Coefficient of tail dependence Lambda(1, 1).
  double tail_dependence() const;

  // lim_{t->inf} Lambda(1, t).
  double axis_limit() const;

 private:
  double eval_at(Point x, double theta) const;

  Family family_;
  double theta_;
  ModelShape shape_;
};

// Supremum of the attainable tail-dependence coefficients (exclusive for all
// families except Mixed, where theta = 1 attains 1/2).
double max_tail_dependence(Family family, const ModelShape& shape = {});

// Solves tail_dependence(theta) = lambda by bisection.
double solve_theta_for_lambda(Family family, double lambda, const ModelShape& shape = {});

// Draws n i.i.d. pairs with uniform margins from a copula whose lower tail
// copula is the model. Ties are impossible up to floating-point collisions.
BivariateSample sample_copula(const TailCopulaModel& model, std::size_t n, RngStream& rng);

// Fills u1/u2 without building a BivariateSample (used by the harness).
void sample_copula_into(const TailCopulaModel& model, std::size_t n, RngStream& rng, double* u1,
                        double* u2);

}  // namespace tailcop
