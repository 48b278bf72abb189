// Maximum-likelihood fitting of the two-parameter model.

#pragma once

#include <optional>
#include <span>

#include "record_edge/evd.hpp"

namespace record_edge {

struct StandardErrors {
  double se_a = 0.0;
  double se_sigma = 0.0;
  double cov_a_sigma = 0.0;
};

struct FitResult {
  ModelParams params;
  std::optional<StandardErrors> se;  // empty when the observed information is not positive definite
  double loglik = 0.0;
  std::size_t n = 0;
  bool converged = false;
  bool at_boundary = false;  // a * max(y) / sigma within 1e-9 of 1
  int iterations = 0;        // objective evaluations
};

struct FitOptions {
  int max_evaluations = 2000;
  double f_tolerance = 1e-10;
  double x_tolerance = 1e-8;
};

/// Fits (a, sigma) by a Nelder-Mead search over (a, log sigma).
///
/// Requires at least three non-negative margins that are not all equal;
/// throws std::invalid_argument otherwise. Without `init` the search starts
/// at (0.01, mean(y)). The returned log-likelihood is never below that of
/// the starting point or of the exponential fit (a = 0, sigma = mean).
FitResult fit_mle(std::span<const double> sample, std::optional<ModelParams> init = std::nullopt,
                  const FitOptions& options = {});

/// Standard errors from the inverse observed information at `params`.
/// The Hessian is taken by central differences in (a, log sigma) with steps
/// `step_scale * max(1, |a|)` and `step_scale`, then mapped to (a, sigma).
std::optional<StandardErrors> observed_information_se(std::span<const double> sample,
                                                      const ModelParams& params,
                                                      double step_scale = 1e-5);

}  // namespace record_edge
