// Profile-likelihood confidence curves.
//
// For a focus parameter psi the profile log-likelihood is the maximum of the
// log-likelihood over all (a, sigma) with psi(a, sigma) fixed. The deviance
// D(psi) = 2 {max profile - profile(psi)} is mapped to a confidence curve
// cc(psi) = Gamma_1(D(psi)), Gamma_1 the chi-squared(1) cdf, and level sets
// of cc give confidence intervals.

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "record_edge/estimation.hpp"
#include "record_edge/prediction.hpp"

namespace record_edge {

/// erf(sqrt(d / 2)). Throws std::invalid_argument for d < 0.
double chi2_1_cdf(double deviance);

/// Deviance at which chi2_1_cdf reaches `level`.
double chi2_1_quantile(double level);

struct CurvePoint {
  double focus = 0.0;
  double deviance = 0.0;
  double confidence = 0.0;
  double profile_loglik = 0.0;
  bool feasible = true;
};

struct ConfidenceCurve {
  std::string focus_name;
  std::vector<CurvePoint> points;  // ascending focus
  std::optional<double> mle_focus;
  double max_loglik = 0.0;
  // Natural limits of the focus parameter (0 and 1 for probabilities).
  std::optional<double> lower_limit;
  std::optional<double> upper_limit;
  // Indices where the curve fails to rise monotonically away from its minimum.
  std::vector<std::size_t> non_monotone;
};

/// Profiled log-likelihood at a focus value; empty when the constraint
/// cannot be met inside the parameter space.
using ProfileFunction = std::function<std::optional<double>(double)>;

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;         // level set runs past the first grid point
  bool hi_open = false;         // level set runs past the last grid point
  bool lo_at_boundary = false;  // lo clipped to the natural lower limit
  bool hi_at_boundary = false;

  bool covers(double value) const {
    return (lo_open || lo <= value) && (hi_open || value <= hi);
  }
};

/// Smallest and largest focus values with confidence <= level, interpolated
/// linearly in deviance between the bracketing grid points.
ConfidenceInterval interval_from_curve(const ConfidenceCurve& curve, double level);

/// Inserts bisection points around the crossings of `level` until the
/// bracketing grid points are within `tolerance` focus units.
void refine_curve(ConfidenceCurve& curve, const ProfileFunction& profile, double level,
                  double tolerance = 1e-4);

/// Evaluates `profile` on the grid (plus the MLE focus, where deviance is 0)
/// and converts to deviance and confidence.
ConfidenceCurve build_curve(std::string focus_name, std::span<const double> grid,
                            std::optional<double> mle_focus, double mle_loglik,
                            const ProfileFunction& profile);

// ---- record probability ---------------------------------------------------

/// Profile over p = P(some race in the horizon has margin above y0).
class ProbabilityProfile {
 public:
  ProbabilityProfile(std::span<const double> sample, double y0, VolumeModel volume,
                     FitResult fit);

  /// Maximum log-likelihood subject to prob_break = p.
  std::optional<double> loglik(double p) const;

  /// Scale satisfying the constraint for shape a, if any.
  std::optional<double> sigma_for(double a, double p) const;

  double mle_probability() const { return p_hat_; }
  const FitResult& fit() const { return fit_; }

  ConfidenceCurve curve(std::span<const double> p_grid) const;
  ProfileFunction function() const;

 private:
  std::vector<double> sample_;
  double y0_;
  double y_max_;
  VolumeModel volume_;
  FitResult fit_;
  double p_hat_;
};

ConfidenceCurve profile_prob(std::span<const double> sample, double y0, const VolumeModel& volume,
                             std::span<const double> p_grid);

std::vector<double> default_probability_grid();

// ---- endpoint --------------------------------------------------------------

/// Profile over the endpoint gamma = sigma / a, restricted to a > 0.
class EndpointProfile {
 public:
  EndpointProfile(std::span<const double> sample, FitResult fit);

  std::optional<double> loglik(double gamma) const;
  /// sigma / a at the MLE, or nothing when a <= 0.
  std::optional<double> gamma_hat() const;

  const FitResult& fit() const { return fit_; }
  ConfidenceCurve curve(std::span<const double> gamma_grid) const;
  ProfileFunction function() const;

 private:
  std::vector<double> sample_;
  double y_max_;
  FitResult fit_;
};

struct EndpointEstimate {
  std::optional<double> gamma_hat;
  std::optional<double> r0_s;  // threshold - gamma_hat
  std::string r0_text;         // M:SS.ss, or a note when there is no finite endpoint
  ConfidenceCurve curve;
};

EndpointEstimate profile_endpoint(std::span<const double> sample, std::span<const double> gamma_grid,
                                  double threshold_s);

/// 201 points on [max(y) + 0.01, max(y) + 30].
std::vector<double> default_gamma_grid(std::span<const double> sample);

}  // namespace record_edge
