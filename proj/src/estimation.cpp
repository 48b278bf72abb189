#include "record_edge/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "record_edge/optimize.hpp"

namespace record_edge {

namespace {

constexpr double kBoundaryGap = 1e-9;

void check_sample(std::span<const double> sample) {
  if (sample.size() < 3) throw std::invalid_argument("fit_mle: need at least 3 margins");
  for (double y : sample) {
    if (!std::isfinite(y) || y < 0.0)
      throw std::invalid_argument("fit_mle: margins must be finite and non-negative");
  }
  const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  if (*lo == *hi) throw std::invalid_argument("fit_mle: all margins are equal");
}

// Negative log-likelihood over (a, log sigma).
Objective negative_loglik(std::span<const double> sample) {
  return [sample](std::span<const double> x) {
    const double sigma = std::exp(x[1]);
    if (!std::isfinite(x[0]) || !std::isfinite(sigma) || sigma <= 0.0) return -kLogLikOutOfDomain;
    return -log_likelihood({x[0], sigma}, sample);
  };
}

}  // namespace

std::optional<StandardErrors> observed_information_se(std::span<const double> sample,
                                                      const ModelParams& params,
                                                      double step_scale) {
  params.validate();
  const auto objective = negative_loglik(sample);
  const std::vector<double> x{params.a, std::log(params.sigma)};
  const std::vector<double> steps{step_scale * std::max(1.0, std::fabs(params.a)), step_scale};
  const Eigen::MatrixXd info = finite_difference_hessian(objective, x, steps);
  if (!info.allFinite()) return std::nullopt;

  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(2, 2));
  if (!(cov(0, 0) > 0.0) || !(cov(1, 1) > 0.0)) return std::nullopt;

  // d sigma = sigma d(log sigma)
  return StandardErrors{std::sqrt(cov(0, 0)), params.sigma * std::sqrt(cov(1, 1)),
                        params.sigma * cov(0, 1)};
}

FitResult fit_mle(std::span<const double> sample, std::optional<ModelParams> init,
                  const FitOptions& options) {
  check_sample(sample);
  const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) /
                      static_cast<double>(sample.size());
  const double y_max = *std::max_element(sample.begin(), sample.end());
  const ModelParams exponential_fit{0.0, mean};

  ModelParams start = init.value_or(ModelParams{0.01, mean});
  start.validate();
  if (!start.domain_ok(y_max)) start = exponential_fit;

  const auto objective = negative_loglik(sample);
  NelderMeadOptions nm;
  nm.max_evaluations = options.max_evaluations;
  nm.f_tolerance = options.f_tolerance;
  nm.x_tolerance = options.x_tolerance;
  nm.initial_step = {0.1, 0.1};

  auto result = nelder_mead(objective, {start.a, std::log(start.sigma)}, nm);
  int evaluations = result.evaluations;

  // The search must not end below the exponential fit; if it does, rerun from there.
  const double exp_value = objective(std::vector<double>{0.0, std::log(mean)});
  if (exp_value < result.value) {
    auto retry = nelder_mead(objective, {0.0, std::log(mean)}, nm);
    evaluations += retry.evaluations;
    if (retry.value <= result.value) result = retry;
  }

  FitResult fit;
  fit.params = {result.x[0], std::exp(result.x[1])};
  fit.loglik = -result.value;
  fit.n = sample.size();
  fit.iterations = evaluations;
  fit.converged = result.converged;
  if (fit.params.a > 0.0 && fit.params.a * y_max / fit.params.sigma > 1.0 - kBoundaryGap) {
    fit.at_boundary = true;
    fit.converged = false;
  }
  if (fit.converged) fit.se = observed_information_se(sample, fit.params);
  return fit;
}

}  // namespace record_edge
