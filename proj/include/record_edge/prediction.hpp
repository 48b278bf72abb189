// Season-best probabilities. With N sub-threshold races in a horizon,
// P(best margin <= y0) = G(y0)^N; with N ~ Poisson(lambda) this becomes
// exp{-lambda (1 - a y0 / sigma)^(1/a)}.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "record_edge/evd.hpp"

namespace record_edge {

class VolumeModel {
 public:
  static VolumeModel poisson(double lambda);
  static VolumeModel fixed(int n);

  bool is_poisson() const { return !fixed_n_.has_value(); }
  double lambda() const { return lambda_; }
  std::optional<int> fixed_n() const { return fixed_n_; }

  /// P(no race in the horizon lands beyond a level whose single-race
  /// survival probability is `tail`), and its complement.
  double prob_none_beyond(double tail) const;
  double prob_some_beyond(double tail) const;

  /// Inverse of 1 - prob_none_beyond: the single-race tail probability that
  /// gives break probability p. Returns nothing when p is not reachable.
  std::optional<double> tail_for_break_probability(double p) const;

 private:
  VolumeModel(double lambda, std::optional<int> n) : lambda_(lambda), fixed_n_(n) {}
  double lambda_ = 25.0;
  std::optional<int> fixed_n_;
};

inline constexpr double kDefaultLambda = 25.0;

/// P(Y* <= y0) for the season-best margin Y*.
double best_of_season_cdf(const ModelParams& params, const VolumeModel& volume, double y0);

/// p(t): probability that some race in the horizon beats `target_s`.
/// Throws std::invalid_argument unless target_s < threshold_s.
double prob_break(const ModelParams& params, const VolumeModel& volume, double target_s,
                  double threshold_s);

struct PredictionPoint {
  double race_time_s;
  double p_break;
};

struct PredictionCurve {
  std::vector<PredictionPoint> points;  // ascending race time
  ModelParams params;
  VolumeModel volume = VolumeModel::poisson(kDefaultLambda);
  double threshold_s = 0.0;
};

PredictionCurve prediction_curve(const ModelParams& params, const VolumeModel& volume,
                                 double threshold_s, std::span<const double> time_grid);

/// Threshold down to the endpoint time (or threshold - 15 s when there is
/// no finite endpoint) in steps of `step_s`, ascending.
std::vector<double> default_time_grid(const ModelParams& params, double threshold_s,
                                      double step_s = 0.01);

}  // namespace record_edge
