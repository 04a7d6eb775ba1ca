#pragma once

#include <cmath>
#include <limits>

namespace tailcop {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A point of [0, inf]^2 minus (inf, inf). Either coordinate may be +inf,
// which drops the corresponding constraint (a marginal section).
struct Point {
  double x1 = 0.0;
  double x2 = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// The point (cos phi, sin phi) on the unit quarter circle, phi in [0, pi/2].
inline Point angular_point(double phi) { return {std::cos(phi), std::sin(phi)}; }

}  // namespace tailcop
