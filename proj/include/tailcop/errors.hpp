#pragma once

#include <stdexcept>

namespace tailcop {

// Parameter outside a model family's domain, or a probability outside [0, 1].
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A requested target (e.g. a tail dependence coefficient) is not attainable.
struct RangeError : std::range_error {
  using std::range_error::range_error;
};

// Invalid configuration: bad CLI arguments, malformed campaign files, B == 0.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid input data: ties (under the default policy), NaN or infinite values.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A multiplier draw with zero mean survived the single redraw.
struct DegenerateDrawError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The scalar Hessian of the minimum-distance objective is numerically zero.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A model objective evaluated to a non-finite value.
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tailcop
