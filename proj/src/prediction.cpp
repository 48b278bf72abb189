#include "record_edge/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace record_edge {

VolumeModel VolumeModel::poisson(double lambda) {
  if (!std::isfinite(lambda) || lambda <= 0.0)
    throw std::invalid_argument("lambda must be positive, got " + std::to_string(lambda));
  return VolumeModel(lambda, std::nullopt);
}

VolumeModel VolumeModel::fixed(int n) {
  if (n < 1) throw std::invalid_argument("race count must be at least 1, got " + std::to_string(n));
  return VolumeModel(static_cast<double>(n), n);
}

double VolumeModel::prob_none_beyond(double tail) const {
  if (fixed_n_) return std::exp(static_cast<double>(*fixed_n_) * std::log1p(-tail));
  return std::exp(-lambda_ * tail);
}

double VolumeModel::prob_some_beyond(double tail) const {
  if (fixed_n_) return -std::expm1(static_cast<double>(*fixed_n_) * std::log1p(-tail));
  return -std::expm1(-lambda_ * tail);
}

std::optional<double> VolumeModel::tail_for_break_probability(double p) const {
  if (!(p > 0.0 && p < 1.0)) return std::nullopt;
  double tail = 0.0;
  if (fixed_n_) {
    tail = -std::expm1(std::log1p(-p) / static_cast<double>(*fixed_n_));
  } else {
    tail = -std::log1p(-p) / lambda_;
  }
  if (!(tail > 0.0 && tail < 1.0)) return std::nullopt;
  return tail;
}

double best_of_season_cdf(const ModelParams& params, const VolumeModel& volume, double y0) {
  return volume.prob_none_beyond(survival(params, y0));
}

double prob_break(const ModelParams& params, const VolumeModel& volume, double target_s,
                  double threshold_s) {
  if (!(target_s < threshold_s)) {
    throw std::invalid_argument("target time must be below the threshold");
  }
  return volume.prob_some_beyond(survival(params, threshold_s - target_s));
}

PredictionCurve prediction_curve(const ModelParams& params, const VolumeModel& volume,
                                 double threshold_s, std::span<const double> time_grid) {
  if (time_grid.empty()) throw std::invalid_argument("prediction_curve: empty time grid");
  PredictionCurve curve{{}, params, volume, threshold_s};
  curve.points.reserve(time_grid.size());
  for (double t : time_grid) curve.points.push_back({t, prob_break(params, volume, t, threshold_s)});
  std::sort(curve.points.begin(), curve.points.end(),
            [](const PredictionPoint& l, const PredictionPoint& r) {
              return l.race_time_s < r.race_time_s;
            });
  return curve;
}

std::vector<double> default_time_grid(const ModelParams& params, double threshold_s,
                                      double step_s) {
  if (!(step_s > 0.0)) throw std::invalid_argument("grid step must be positive");
  const auto gamma = endpoint(params);
  const double lowest = threshold_s - (gamma ? *gamma : 15.0);
  std::vector<double> grid;
  for (long k = 1;; ++k) {
    const double t = threshold_s - static_cast<double>(k) * step_s;
    if (t < lowest) break;
    grid.push_back(t);
  }
  std::reverse(grid.begin(), grid.end());
  return grid;
}

}  // namespace record_edge
