#include "record_edge/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "record_edge/ingest.hpp"
#include "record_edge/optimize.hpp"

namespace record_edge {

namespace {

constexpr double kMonotoneSlack = 1e-9;

struct Maximum {
  double x;
  double value;
};

// Coarse scan followed by golden section around the best scan point.
Maximum maximize_1d(const std::function<double(double)>& f, double lo, double hi,
                    int scan_points = 32, double tolerance = 1e-10) {
  std::vector<double> xs(scan_points + 1), fs(scan_points + 1);
  for (int i = 0; i <= scan_points; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / scan_points;
    fs[i] = f(xs[i]);
  }
  const auto best = static_cast<int>(std::max_element(fs.begin(), fs.end()) - fs.begin());
  const double a = xs[std::max(best - 1, 0)];
  const double b = xs[std::min(best + 1, scan_points)];
  auto r = golden_section_minimize([&](double x) { return -f(x); }, a, b, tolerance);
  if (-r.value >= fs[best]) return {r.x, -r.value};
  return {xs[best], fs[best]};
}

double fit_loglik_or_throw(const FitResult& fit) {
  if (!std::isfinite(fit.loglik) || fit.loglik <= kLogLikOutOfDomain) {
    throw std::invalid_argument("profile requires a fitted model with finite log-likelihood");
  }
  return fit.loglik;
}

void flag_non_monotone(ConfidenceCurve& curve) {
  curve.non_monotone.clear();
  const auto& pts = curve.points;
  if (pts.empty()) return;
  std::size_t centre = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].feasible && pts[i].deviance < best) {
      best = pts[i].deviance;
      centre = i;
    }
  }
  std::optional<std::size_t> prev;
  for (std::size_t i = centre + 1; i < pts.size(); ++i) {
    if (!pts[i].feasible) continue;
    if (prev && pts[i].deviance + kMonotoneSlack < pts[*prev].deviance) curve.non_monotone.push_back(i);
    prev = i;
  }
  prev.reset();
  for (std::size_t i = centre; i-- > 0;) {
    if (!pts[i].feasible) continue;
    if (prev && pts[i].deviance + kMonotoneSlack < pts[*prev].deviance) curve.non_monotone.push_back(i);
    prev = i;
  }
  std::sort(curve.non_monotone.begin(), curve.non_monotone.end());
}

CurvePoint make_point(double focus, std::optional<double> loglik, double max_loglik) {
  if (!loglik || *loglik <= kLogLikOutOfDomain) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {focus, nan, nan, nan, false};
  }
  const double deviance = std::max(0.0, 2.0 * (max_loglik - *loglik));
  return {focus, deviance, chi2_1_cdf(deviance), *loglik, true};
}

void recompute(ConfidenceCurve& curve) {
  for (auto& p : curve.points) {
    if (!p.feasible) continue;
    p.deviance = std::max(0.0, 2.0 * (curve.max_loglik - p.profile_loglik));
    p.confidence = chi2_1_cdf(p.deviance);
  }
  if (curve.mle_focus) {
    for (auto& p : curve.points) {
      if (p.focus == *curve.mle_focus) {
        p.deviance = 0.0;
        p.confidence = 0.0;
      }
    }
  }
}

void insert_point(ConfidenceCurve& curve, CurvePoint point) {
  auto it = std::lower_bound(curve.points.begin(), curve.points.end(), point.focus,
                             [](const CurvePoint& p, double f) { return p.focus < f; });
  if (it != curve.points.end() && it->focus == point.focus) return;
  curve.points.insert(it, point);
}

std::optional<std::size_t> minimum_index(const ConfidenceCurve& curve) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    if (!p.feasible) continue;
    if (!best || p.deviance < curve.points[*best].deviance) best = i;
  }
  return best;
}

// Focus value where the deviance crosses `target` between points i and j.
double crossing(const CurvePoint& inside, const CurvePoint& outside, double target) {
  const double span = outside.deviance - inside.deviance;
  if (!(span > 0.0)) return outside.focus;
  const double t = std::clamp((target - inside.deviance) / span, 0.0, 1.0);
  return inside.focus + t * (outside.focus - inside.focus);
}

}  // namespace

double chi2_1_cdf(double deviance) {
  if (std::isnan(deviance) || deviance < 0.0) {
    throw std::invalid_argument("chi2_1_cdf: deviance must be non-negative");
  }
  return std::erf(std::sqrt(deviance / 2.0));
}

double chi2_1_quantile(double level) {
  if (!(level >= 0.0 && level < 1.0)) {
    throw std::invalid_argument("chi2_1_quantile: level must lie in [0, 1)");
  }
  // erf(x) = level, then d = 2 x^2.
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::erf(mid) < level ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return 2.0 * x * x;
}

ConfidenceCurve build_curve(std::string focus_name, std::span<const double> grid,
                            std::optional<double> mle_focus, double mle_loglik,
                            const ProfileFunction& profile) {
  ConfidenceCurve curve;
  curve.focus_name = std::move(focus_name);
  curve.mle_focus = mle_focus;

  std::vector<double> foci(grid.begin(), grid.end());
  if (mle_focus) foci.push_back(*mle_focus);
  std::sort(foci.begin(), foci.end());
  foci.erase(std::unique(foci.begin(), foci.end()), foci.end());

  std::vector<std::optional<double>> logliks;
  logliks.reserve(foci.size());
  double max_loglik = mle_loglik;
  for (double f : foci) {
    auto l = profile(f);
    if (mle_focus && f == *mle_focus && (!l || *l < mle_loglik)) l = mle_loglik;
    if (l && *l > kLogLikOutOfDomain) max_loglik = std::max(max_loglik, *l);
    logliks.push_back(l);
  }
  curve.max_loglik = max_loglik;
  curve.points.reserve(foci.size());
  for (std::size_t i = 0; i < foci.size(); ++i) curve.points.push_back(make_point(foci[i], logliks[i], max_loglik));
  recompute(curve);
  flag_non_monotone(curve);
  return curve;
}

ConfidenceInterval interval_from_curve(const ConfidenceCurve& curve, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("interval_from_curve: level must lie in (0, 1)");
  }
  const auto centre = minimum_index(curve);
  if (!centre) throw std::invalid_argument("interval_from_curve: curve has no feasible points");
  const double target = chi2_1_quantile(level);
  const auto& pts = curve.points;

  ConfidenceInterval out;
  if (pts[*centre].confidence > level) {
    // Level set is empty on the grid; collapse onto the minimum.
    out.lo = out.hi = pts[*centre].focus;
    return out;
  }

  // Walk left.
  std::size_t inside = *centre;
  bool crossed = false;
  for (std::size_t i = *centre; i-- > 0;) {
    if (!pts[i].feasible) break;
    if (pts[i].confidence > level) {
      out.lo = crossing(pts[inside], pts[i], target);
      crossed = true;
      break;
    }
    inside = i;
  }
  if (!crossed) {
    if (curve.lower_limit) {
      out.lo = *curve.lower_limit;
      out.lo_at_boundary = true;
    } else {
      out.lo = pts[inside].focus;
      out.lo_open = true;
    }
  }

  // Walk right.
  inside = *centre;
  crossed = false;
  for (std::size_t i = *centre + 1; i < pts.size(); ++i) {
    if (!pts[i].feasible) break;
    if (pts[i].confidence > level) {
      out.hi = crossing(pts[inside], pts[i], target);
      crossed = true;
      break;
    }
    inside = i;
  }
  if (!crossed) {
    if (curve.upper_limit) {
      out.hi = *curve.upper_limit;
      out.hi_at_boundary = true;
    } else {
      out.hi = pts[inside].focus;
      out.hi_open = true;
    }
  }
  return out;
}

void refine_curve(ConfidenceCurve& curve, const ProfileFunction& profile, double level,
                  double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("refine_curve: tolerance must be positive");
  // Each side: bisect between the last inside point and the first outside point.
  for (int side : {-1, +1}) {
    for (int guard = 0; guard < 200; ++guard) {
      const auto centre = minimum_index(curve);
      if (!centre) return;
      const auto& pts = curve.points;
      if (pts[*centre].confidence > level) return;
      std::optional<std::size_t> in, out;
      std::size_t inside = *centre;
      if (side < 0) {
        for (std::size_t i = *centre; i-- > 0;) {
          if (!pts[i].feasible) break;
          if (pts[i].confidence > level) {
            out = i;
            break;
          }
          inside = i;
        }
      } else {
        for (std::size_t i = *centre + 1; i < pts.size(); ++i) {
          if (!pts[i].feasible) break;
          if (pts[i].confidence > level) {
            out = i;
            break;
          }
          inside = i;
        }
      }
      in = inside;
      if (!out) break;
      const double a = pts[*in].focus;
      const double b = pts[*out].focus;
      if (std::fabs(b - a) <= tolerance) break;
      const double mid = 0.5 * (a + b);
      auto point = make_point(mid, profile(mid), curve.max_loglik);
      if (point.feasible && point.profile_loglik > curve.max_loglik) {
        curve.max_loglik = point.profile_loglik;
        insert_point(curve, point);
        recompute(curve);
      } else {
        insert_point(curve, point);
      }
      if (!point.feasible) break;
    }
  }
  flag_non_monotone(curve);
}

// ---- record probability ---------------------------------------------------

ProbabilityProfile::ProbabilityProfile(std::span<const double> sample, double y0,
                                       VolumeModel volume, FitResult fit)
    : sample_(sample.begin(), sample.end()),
      y0_(y0),
      y_max_(0.0),
      volume_(volume),
      fit_(std::move(fit)),
      p_hat_(0.0) {
  if (sample_.empty()) throw std::invalid_argument("probability profile: empty sample");
  if (!(y0 > 0.0) || !std::isfinite(y0)) {
    throw std::invalid_argument("probability profile: y0 must be positive");
  }
  fit_loglik_or_throw(fit_);
  y_max_ = *std::max_element(sample_.begin(), sample_.end());
  p_hat_ = volume_.prob_some_beyond(survival(fit_.params, y0_));
}

std::optional<double> ProbabilityProfile::sigma_for(double a, double p) const {
  const auto tail = volume_.tail_for_break_probability(p);
  if (!tail) return std::nullopt;
  const double log_tail = std::log(*tail);
  double sigma = 0.0;
  if (std::fabs(a) < kShapeEpsilon) {
    // z + a z^2 / 2 = -log(tail), z = y0 / sigma
    const double l = -log_tail;
    sigma = y0_ / (l * (1.0 - 0.5 * a * l));
  } else {
    // (1 - a y0 / sigma)^(1/a) = tail
    sigma = a * y0_ / -std::expm1(a * log_tail);
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) return std::nullopt;
  return sigma;
}

std::optional<double> ProbabilityProfile::loglik(double p) const {
  const auto tail = volume_.tail_for_break_probability(p);
  if (!tail) return std::nullopt;
  const double log_tail = std::log(*tail);

  // Data stay inside the support while y_max (1 - tail^a) / y0 < 1.
  double upper = std::max(1.0, fit_.params.a + 0.5);
  if (y0_ < y_max_) upper = std::min(upper, std::log1p(-y0_ / y_max_) / log_tail);
  const double lower = std::min(-0.5, fit_.params.a - 0.5);
  if (!(upper > lower)) return std::nullopt;

  auto objective = [&](double a) {
    const auto sigma = sigma_for(a, p);
    if (!sigma) return kLogLikOutOfDomain;
    return log_likelihood({a, *sigma}, sample_);
  };
  const auto best = maximize_1d(objective, lower, upper);
  if (best.value <= kLogLikOutOfDomain) return std::nullopt;
  return best.value;
}

ConfidenceCurve ProbabilityProfile::curve(std::span<const double> p_grid) const {
  for (double p : p_grid) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("probability grid must lie in (0, 1)");
  }
  auto c = build_curve("p", p_grid, p_hat_, fit_.loglik, function());
  c.lower_limit = 0.0;
  c.upper_limit = 1.0;
  return c;
}

ProfileFunction ProbabilityProfile::function() const {
  return [this](double p) { return loglik(p); };
}

ConfidenceCurve profile_prob(std::span<const double> sample, double y0, const VolumeModel& volume,
                             std::span<const double> p_grid) {
  const ProbabilityProfile profile(sample, y0, volume, fit_mle(sample));
  return profile.curve(p_grid);
}

std::vector<double> default_probability_grid() {
  std::vector<double> grid{1e-6, 1e-5, 1e-4, 5e-4, 1e-3};
  for (int i = 1; i < 400; ++i) grid.push_back(0.0025 * i);
  return grid;
}

// ---- endpoint --------------------------------------------------------------

EndpointProfile::EndpointProfile(std::span<const double> sample, FitResult fit)
    : sample_(sample.begin(), sample.end()), y_max_(0.0), fit_(std::move(fit)) {
  if (sample_.empty()) throw std::invalid_argument("endpoint profile: empty sample");
  fit_loglik_or_throw(fit_);
  y_max_ = *std::max_element(sample_.begin(), sample_.end());
}

std::optional<double> EndpointProfile::gamma_hat() const {
  if (fit_.params.is_exponential()) return std::nullopt;
  return endpoint(fit_.params);
}

std::optional<double> EndpointProfile::loglik(double gamma) const {
  if (!(gamma > y_max_) || !std::isfinite(gamma)) return std::nullopt;
  // Search over log a; sigma = a gamma keeps every margin inside the support.
  auto objective = [&](double log_a) {
    const double a = std::exp(log_a);
    return log_likelihood({a, a * gamma}, sample_);
  };
  const double hi = std::log(std::max(5.0, 2.0 * fit_.params.a));
  const auto best = maximize_1d(objective, std::log(1e-6), hi, 48);
  if (best.value <= kLogLikOutOfDomain) return std::nullopt;
  return best.value;
}

ConfidenceCurve EndpointProfile::curve(std::span<const double> gamma_grid) const {
  return build_curve("gamma", gamma_grid, gamma_hat(), fit_.loglik, function());
}

ProfileFunction EndpointProfile::function() const {
  return [this](double g) { return loglik(g); };
}

EndpointEstimate profile_endpoint(std::span<const double> sample, std::span<const double> gamma_grid,
                                  double threshold_s) {
  const EndpointProfile profile(sample, fit_mle(sample));
  EndpointEstimate est;
  est.gamma_hat = profile.gamma_hat();
  est.curve = profile.curve(gamma_grid);
  if (est.gamma_hat) {
    est.r0_s = threshold_s - *est.gamma_hat;
    est.r0_text = format_time(*est.r0_s);
  } else {
    est.r0_text = "no finite endpoint at MLE";
  }
  return est;
}

std::vector<double> default_gamma_grid(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("default_gamma_grid: empty sample");
  const double y_max = *std::max_element(sample.begin(), sample.end());
  std::vector<double> grid(201);
  for (int i = 0; i <= 200; ++i) grid[i] = y_max + 0.01 + (30.0 - 0.01) * i / 200.0;
  return grid;
}

}  // namespace record_edge
