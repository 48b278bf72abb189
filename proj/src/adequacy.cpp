#include "record_edge/adequacy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "record_edge/optimize.hpp"
#include "record_edge/random.hpp"

namespace record_edge {

std::vector<double> monitor_grid(double y_max, std::size_t points) {
  if (points < 2 || !(y_max > 0.0)) throw std::invalid_argument("monitor_grid: need at least two points and a positive range");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = y_max * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

std::vector<double> monitor_process(std::span<const double> sample, const ModelParams& params,
                                    std::span<const double> grid) {
  if (sample.empty()) throw std::invalid_argument("monitor_process: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double root_n = std::sqrt(n);
  std::vector<double> z(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double y = grid[k];
    const auto at_or_below = std::upper_bound(sorted.begin(), sorted.end(), y) - sorted.begin();
    z[k] = root_n * (cdf(params, y) - static_cast<double>(at_or_below) / n);
  }
  return z;
}

double monitor_sup(std::span<const double> sample, const ModelParams& params) {
  if (sample.empty()) throw std::invalid_argument("monitor_sup: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // Between jumps |G - G_n| is monotone, so the supremum is attained at a
  // jump (from either side) or approached at 0 or infinity, where it is 0.
  double sup = 0.0;
  for (auto it = sorted.begin(); it != sorted.end();) {
    const double y = *it;
    const auto below = static_cast<double>(it - sorted.begin());
    const auto next = std::upper_bound(it, sorted.end(), y);
    const auto at_or_below = static_cast<double>(next - sorted.begin());
    const double g = cdf(params, y);
    sup = std::max({sup, std::fabs(g - below / n), std::fabs(g - at_or_below / n)});
    it = next;
  }
  return std::sqrt(n) * sup;
}

MonitorResult monitor_envelope(std::span<const double> sample, const ModelParams& params,
                               std::size_t sim, std::uint64_t seed,
                               const MonitorOptions& options) {
  if (sim < 1) throw std::invalid_argument("monitor_envelope: sim must be at least 1");
  if (options.grid.empty()) throw std::invalid_argument("monitor_envelope: empty grid");
  MonitorResult out;
  out.grid = options.grid;
  out.sim = sim;
  out.seed = seed;
  out.observed = monitor_process(sample, params, out.grid);
  out.observed_sup = monitor_sup(sample, params);

  const std::size_t n = sample.size();
  for (std::size_t r = 0; r < sim; ++r) {
    Rng rng(split_seed(seed, r));
    const auto simulated = simulate_margins(params, n, rng);
    ModelParams replicate_params = params;
    if (options.refit) {
      try {
        const auto fit = fit_mle(simulated);
        if (!fit.converged) {
          ++out.dropped;
          continue;
        }
        replicate_params = fit.params;
      } catch (const std::invalid_argument&) {
        ++out.dropped;
        continue;
      }
    }
    out.envelope.push_back(monitor_process(simulated, replicate_params, out.grid));
  }

  const std::size_t m = out.grid.size();
  out.band_lo.assign(m, 0.0);
  out.band_hi.assign(m, 0.0);
  if (out.envelope.empty()) {
    out.exceed_fraction = 1.0;
    return out;
  }
  std::size_t outside = 0;
  for (std::size_t k = 0; k < m; ++k) {
    double lo = out.envelope.front()[k], hi = lo;
    for (const auto& curve : out.envelope) {
      lo = std::min(lo, curve[k]);
      hi = std::max(hi, curve[k]);
    }
    out.band_lo[k] = lo;
    out.band_hi[k] = hi;
    if (out.observed[k] < lo || out.observed[k] > hi) ++outside;
  }
  out.exceed_fraction = static_cast<double>(outside) / static_cast<double>(m);
  return out;
}

namespace {

struct SeasonData {
  std::vector<std::span<const double>> values;
  std::vector<double> x;
};

double trend_loglik(const SeasonData& data, double a, double log_sigma0, double slope) {
  double total = 0.0;
  for (std::size_t j = 0; j < data.values.size(); ++j) {
    const double sigma = std::exp(log_sigma0 + slope * data.x[j]);
    if (!std::isfinite(sigma) || sigma <= 0.0) return kLogLikOutOfDomain;
    const double l = log_likelihood({a, sigma}, data.values[j]);
    if (l <= kLogLikOutOfDomain) return kLogLikOutOfDomain;
    total += l;
  }
  return total;
}

}  // namespace

TrendFit fit_trend(std::span<const SeasonGroup> seasons, const TrendOptions& options) {
  if (seasons.size() < 2) {
    throw std::invalid_argument("fit_trend: need at least two seasons, trend is unidentifiable");
  }
  TrendFit out;
  SeasonData data;
  std::vector<double> pooled;
  double mean_season = 0.0;
  for (const auto& g : seasons) {
    if (g.values.empty()) throw std::invalid_argument("fit_trend: empty season group");
    mean_season += g.season;
  }
  mean_season /= static_cast<double>(seasons.size());
  for (const auto& g : seasons) {
    out.seasons.push_back(g.season);
    out.counts.push_back(g.values.size());
    out.x_values.push_back(g.season - mean_season);
    data.values.emplace_back(g.values);
    pooled.insert(pooled.end(), g.values.begin(), g.values.end());
  }
  data.x = out.x_values;
  out.trend_identifiable =
      std::any_of(data.x.begin(), data.x.end(), [](double x) { return x != 0.0; });

  const auto pooled_fit = fit_mle(pooled);
  const bool freeze = options.freeze_trend || !out.trend_identifiable;

  NelderMeadOptions nm;
  nm.max_evaluations = 4000;
  if (freeze) {
    nm.initial_step = {0.1, 0.1};
    const Objective objective = [&](std::span<const double> x) {
      return -trend_loglik(data, x[0], x[1], 0.0);
    };
    const auto r = nelder_mead(objective, {pooled_fit.params.a, std::log(pooled_fit.params.sigma)}, nm);
    out.a = r.x[0];
    out.sigma0 = std::exp(r.x[1]);
    out.trend_gamma = 0.0;
    out.loglik = -r.value;
    out.converged = r.converged;
    return out;
  }

  nm.initial_step = {0.1, 0.1, 0.01};
  const Objective objective = [&](std::span<const double> x) {
    return -trend_loglik(data, x[0], x[1], x[2]);
  };
  const std::vector<double> start{pooled_fit.params.a, std::log(pooled_fit.params.sigma), 0.0};
  const auto r = nelder_mead(objective, start, nm);
  out.a = r.x[0];
  out.sigma0 = std::exp(r.x[1]);
  out.trend_gamma = r.x[2];
  out.loglik = -r.value;
  out.converged = r.converged;

  const std::vector<double> steps{1e-5 * std::max(1.0, std::fabs(out.a)), 1e-5, 1e-5};
  const Eigen::MatrixXd info = finite_difference_hessian(objective, r.x, steps);
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (info.allFinite() && llt.info() == Eigen::Success) {
    const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(3, 3));
    if (cov(2, 2) > 0.0) {
      out.se_trend = std::sqrt(cov(2, 2));
      out.wald_z = out.trend_gamma / *out.se_trend;
    }
  }
  return out;
}

}  // namespace record_edge
