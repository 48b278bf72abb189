// Two-parameter extreme-value model for margins below a threshold.
//
//   G(y; a, sigma) = 1 - (1 - a y / sigma)^(1/a)
//   g(y; a, sigma) = (1 - a y / sigma)^(1/a - 1) / sigma
//
// For a > 0 the support is [0, sigma/a]; for a <= 0 it is [0, inf). The
// a -> 0 limit is the exponential distribution with mean sigma. Whenever
// |a| < kShapeEpsilon the exponential forms are used, with a first-order
// correction in a.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "record_edge/random.hpp"

namespace record_edge {

inline constexpr double kShapeEpsilon = 1e-8;

// Finite stand-in for log(0), returned by log_likelihood() outside the support.
inline constexpr double kLogLikOutOfDomain = -1e300;

struct ModelParams {
  double a = 0.0;      // shape
  double sigma = 1.0;  // scale, seconds

  // Throws std::domain_error unless both are finite and sigma > 0.
  void validate() const;

  bool is_exponential() const;

  // y >= 0 and a y / sigma < 1.
  bool domain_ok(double y) const;
};

double cdf(const ModelParams& params, double y);
double survival(const ModelParams& params, double y);
double pdf(const ModelParams& params, double y);
double log_pdf(const ModelParams& params, double y);

/// Inverse of cdf() on [0, 1).
double quantile(const ModelParams& params, double u);

/// Sum of log densities; kLogLikOutOfDomain if any margin lies outside the
/// support. Throws std::invalid_argument on an empty sample.
double log_likelihood(const ModelParams& params, std::span<const double> sample);

/// sigma / a for a > 0, nothing for a <= 0 (infinite support).
std::optional<double> endpoint(const ModelParams& params);

/// n margins by inverse-transform sampling.
std::vector<double> simulate_margins(const ModelParams& params, std::size_t n, Rng& rng);

}  // namespace record_edge
