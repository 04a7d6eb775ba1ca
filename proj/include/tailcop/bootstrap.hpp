#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tailcop/estimators.hpp"
#include "tailcop/point.hpp"
#include "tailcop/rng.hpp"
#include "tailcop/sample.hpp"

namespace tailcop {

enum class MultiplierDistribution { TwoPoint02, Custom };

// Distribution of the i.i.d. nonnegative multipliers xi_i.
//
// Custom schemes must have finite ||xi||_{2,1} = int_0^inf sqrt(P(|xi| > x)) dx;
// this cannot be checked by the library and is carried as metadata.
struct MultiplierScheme {
  MultiplierDistribution distribution = MultiplierDistribution::TwoPoint02;
  std::string name = "two_point_0_2";
  double mu = 1.0;
  double tau = 1.0;
  std::function<double(RngStream&)> sampler;  // Custom only
  std::string moment_note = "bounded support";

  // P(xi = 0) = P(xi = 2) = 1/2, so mu = tau = 1.
  static MultiplierScheme two_point();
  // Standard exponential, mu = tau = 1.
  static MultiplierScheme exponential();
  static MultiplierScheme custom(std::string name, double mu, double tau,
                                 std::function<double(RngStream&)> sampler,
                                 std::string moment_note);
};

// n multipliers from one stream. TwoPoint02 maps bit j of the (j / 64)-th
// 64-bit output to weight 2 * bit.
std::vector<double> draw_weights(const MultiplierScheme& scheme, std::size_t n, RngStream& rng);

// Draws weights with positive sum. An all-zero vector is redrawn once and
// counted in `redraws`; a second all-zero vector throws DegenerateDrawError.
std::vector<double> draw_nondegenerate_weights(const MultiplierScheme& scheme, std::size_t n,
                                               RngStream& rng, std::size_t& redraws);

enum class BootstrapKind { KnownMargins, Beta, PDM, DM, Resample };

std::string_view kind_name(BootstrapKind kind);
BootstrapKind parse_kind(std::string_view name);

// Point-level bootstrap processes, evaluated literally from the defining sums
// with generalized inverses of (weighted) empirical distribution functions.
// They cost O(n log n) per call and are the reference for build_ensemble.
// A coordinate equal to 0 selects the empty indicator set.

double process_known_margins(const BivariateSample& sample, const Margins& margins, int k,
                             std::span<const double> weights, Point x,
                             const MultiplierScheme& scheme = MultiplierScheme::two_point());

double process_beta(const BivariateSample& sample, int k, std::span<const double> weights, Point x,
                    const MultiplierScheme& scheme = MultiplierScheme::two_point());

double process_pdm(const BivariateSample& sample, int k, std::span<const double> weights, Point x,
                   double h, const MultiplierScheme& scheme = MultiplierScheme::two_point());

double process_dm(const BivariateSample& sample, int k, std::span<const double> weights, Point x,
                  const MultiplierScheme& scheme = MultiplierScheme::two_point());

// sqrt(k) (Lambda*(x) - Lambda(x)) for the resample X_{indices[0]}, ...,
// X_{indices[n-1]} (0-based). Resampled ties are handled by the generalized
// inverse of the resample's empirical distribution function.
double process_resample(const BivariateSample& sample, int k, std::span<const std::size_t> indices,
                        Point x);
std::vector<std::size_t> draw_resample_indices(std::size_t n, RngStream& rng);

struct EnsembleOptions {
  double bandwidth = 0.0;            // PDM; 0 selects k^{-1/2}
  const Margins* margins = nullptr;  // KnownMargins; nullptr selects uniform margins
  bool constant_weights = false;     // every multiplier equal to mu (test hook)
  // Copula: thresholds at the ceil(k x)-th order statistic (weighted inverse for
  // dm). Rank: ranks up to floor(k x) (weighted empirical CDF at most k x / n).
  EstimatorForm form = EstimatorForm::Copula;
  unsigned threads = 1;              // 0 selects the hardware concurrency
};

// B draws of a bootstrap process on a fixed point set. Row b is generated
// from stream.child(b).
struct BootstrapEnsemble {
  BootstrapKind kind = BootstrapKind::PDM;
  std::vector<Point> points;
  std::vector<double> draws;  // B x points.size(), row-major
  std::size_t n = 0;
  int k = 0;
  std::size_t B = 0;
  double bandwidth = 0.0;
  std::uint64_t seed = 0;
  std::string scheme_name;
  double mu = 1.0;
  double tau = 1.0;
  std::string moment_note;
  std::size_t redraws = 0;
  EstimatorForm form = EstimatorForm::Copula;

  std::size_t width() const { return points.size(); }
  std::span<const double> row(std::size_t b) const {
    return {draws.data() + b * points.size(), points.size()};
  }
  double at(std::size_t b, std::size_t p) const { return draws[b * points.size() + p]; }

  // Sample covariance matrix (divisor B - 1, row-major) over the draws.
  std::vector<double> covariance() const;
};

BootstrapEnsemble build_ensemble(BootstrapKind kind, const BivariateSample& sample, int k,
                                 std::size_t B, std::span<const Point> points,
                                 const MultiplierScheme& scheme, const RngStream& stream,
                                 const EnsembleOptions& options = {});

// Rows = draws, columns = points, with a header row naming the points.
void write_ensemble_csv(const BootstrapEnsemble& ensemble, std::ostream& out);
nlohmann::json ensemble_metadata(const BootstrapEnsemble& ensemble);

}  // namespace tailcop
