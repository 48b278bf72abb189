// Model adequacy: the monitoring process
//   Z_n(y) = sqrt(n) {G(y; a_hat, sigma_hat) - G_n(y)}
// with a parametric-bootstrap envelope, and a log-linear trend in the scale
// across seasons.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "record_edge/estimation.hpp"
#include "record_edge/ingest.hpp"

namespace record_edge {

/// `points` equally spaced values on [0, y_max].
std::vector<double> monitor_grid(double y_max = 10.0, std::size_t points = 501);

/// Z_n on `grid`, G_n the right-continuous empirical cdf.
std::vector<double> monitor_process(std::span<const double> sample, const ModelParams& params,
                                    std::span<const double> grid);

/// sup over y >= 0 of |Z_n(y)|, taking left and right limits at each jump.
double monitor_sup(std::span<const double> sample, const ModelParams& params);

struct MonitorOptions {
  std::vector<double> grid = monitor_grid();
  bool refit = true;  // refit each simulated dataset; false plugs in the observed fit
};

struct MonitorResult {
  std::vector<double> grid;
  std::vector<double> observed;
  std::vector<std::vector<double>> envelope;  // one curve per kept replicate
  std::vector<double> band_lo;
  std::vector<double> band_hi;
  std::size_t sim = 0;      // replicates requested
  std::size_t dropped = 0;  // replicates whose refit failed
  double exceed_fraction = 0.0;
  double observed_sup = 0.0;
  std::uint64_t seed = 0;
};

/// Simulates `sim` datasets of the observed size from `params` by inverse
/// transform, each from its own stream split off `seed`.
MonitorResult monitor_envelope(std::span<const double> sample, const ModelParams& params,
                               std::size_t sim, std::uint64_t seed,
                               const MonitorOptions& options = {});

struct TrendFit {
  double a = 0.0;
  double sigma0 = 0.0;
  double trend_gamma = 0.0;              // per year, on log sigma
  std::optional<double> se_trend;
  std::optional<double> wald_z;
  std::vector<int> seasons;
  std::vector<std::size_t> counts;
  std::vector<double> x_values;          // season minus mean season
  double loglik = 0.0;
  bool converged = false;
  bool trend_identifiable = true;
};

struct TrendOptions {
  bool freeze_trend = false;  // hold the slope at 0
};

/// Maximises sum_j sum_i log g(y_ji; a, sigma exp(trend_gamma x_j)).
/// Throws std::invalid_argument with fewer than two season groups or an
/// empty group.
TrendFit fit_trend(std::span<const SeasonGroup> seasons, const TrendOptions& options = {});

}  // namespace record_edge
