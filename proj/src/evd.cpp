#include "record_edge/evd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace record_edge {

namespace {

void check_margin(double y) {
  if (!std::isfinite(y) || y < 0.0) {
    throw std::domain_error("margin must be finite and non-negative, got " + std::to_string(y));
  }
}

// Near a = 0 the functions below keep the first-order term in a of their
// expansions, so values match the general formulas across |a| = kShapeEpsilon.

// log(1 - a y / sigma) / a, the log survival on the interior of the support.
double log_survival_interior(const ModelParams& p, double y) {
  if (p.is_exponential()) {
    const double z = y / p.sigma;
    return -z - 0.5 * p.a * z * z;
  }
  return std::log1p(-p.a * y / p.sigma) / p.a;
}

// log density minus -log(sigma), exponential branch.
double log_density_near_zero(const ModelParams& p, double y) {
  const double z = y / p.sigma;
  return -z + p.a * (z - 0.5 * z * z);
}

bool beyond_endpoint(const ModelParams& p, double y) {
  return p.a > 0.0 && !p.is_exponential() && p.a * y / p.sigma >= 1.0;
}

}  // namespace

void ModelParams::validate() const {
  if (!std::isfinite(a) || !std::isfinite(sigma) || sigma <= 0.0) {
    throw std::domain_error("invalid model parameters (a=" + std::to_string(a) +
                            ", sigma=" + std::to_string(sigma) + ")");
  }
}

bool ModelParams::is_exponential() const { return std::fabs(a) < kShapeEpsilon; }

bool ModelParams::domain_ok(double y) const {
  if (!(y >= 0.0)) return false;
  if (is_exponential() || a <= 0.0) return std::isfinite(y);
  return a * y / sigma < 1.0;
}

double survival(const ModelParams& params, double y) {
  params.validate();
  check_margin(y);
  if (beyond_endpoint(params, y)) return 0.0;
  return std::exp(log_survival_interior(params, y));
}

double cdf(const ModelParams& params, double y) {
  params.validate();
  check_margin(y);
  if (beyond_endpoint(params, y)) return 1.0;
  const double g = -std::expm1(log_survival_interior(params, y));
  return std::clamp(g, 0.0, 1.0);
}

double pdf(const ModelParams& params, double y) {
  params.validate();
  check_margin(y);
  if (params.is_exponential()) return std::exp(log_density_near_zero(params, y)) / params.sigma;
  const double z = params.a * y / params.sigma;
  if (params.a > 0.0 && z >= 1.0) {
    // At the endpoint itself only a == 1 (uniform) has a finite non-zero limit.
    if (z == 1.0 && params.a == 1.0) return 1.0 / params.sigma;
    return 0.0;
  }
  return std::exp((1.0 / params.a - 1.0) * std::log1p(-z)) / params.sigma;
}

double log_pdf(const ModelParams& params, double y) {
  params.validate();
  check_margin(y);
  if (params.is_exponential()) return -std::log(params.sigma) + log_density_near_zero(params, y);
  const double z = params.a * y / params.sigma;
  if (params.a > 0.0 && z >= 1.0) return -std::numeric_limits<double>::infinity();
  return -std::log(params.sigma) + (1.0 / params.a - 1.0) * std::log1p(-z);
}

double quantile(const ModelParams& params, double u) {
  params.validate();
  if (!(u >= 0.0 && u < 1.0)) {
    throw std::domain_error("quantile level must lie in [0, 1), got " + std::to_string(u));
  }
  const double log_tail = std::log1p(-u);
  if (params.is_exponential()) return -params.sigma * log_tail * (1.0 + 0.5 * params.a * log_tail);
  // (sigma/a) * (1 - (1-u)^a)
  return -(params.sigma / params.a) * std::expm1(params.a * log_tail);
}

double log_likelihood(const ModelParams& params, std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("log_likelihood: empty sample");
  params.validate();
  const double log_sigma = std::log(params.sigma);
  double total = 0.0;
  if (params.is_exponential()) {
    for (double y : sample) {
      if (!(y >= 0.0) || !std::isfinite(y)) return kLogLikOutOfDomain;
      total += -log_sigma + log_density_near_zero(params, y);
    }
    return total;
  }
  const double power = 1.0 / params.a - 1.0;
  for (double y : sample) {
    if (!(y >= 0.0) || !std::isfinite(y)) return kLogLikOutOfDomain;
    const double z = params.a * y / params.sigma;
    if (z >= 1.0) return kLogLikOutOfDomain;
    total += -log_sigma + power * std::log1p(-z);
  }
  return total;
}

std::optional<double> endpoint(const ModelParams& params) {
  params.validate();
  if (params.a <= 0.0) return std::nullopt;
  return params.sigma / params.a;
}

std::vector<double> simulate_margins(const ModelParams& params, std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  for (auto& y : out) y = quantile(params, uniform01(rng));
  return out;
}

}  // namespace record_edge
