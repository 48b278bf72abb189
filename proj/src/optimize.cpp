#include "record_edge/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace record_edge {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

class CountingObjective {
 public:
  CountingObjective(const Objective& f, int budget) : f_(f), budget_(budget) {}

  // Past the budget every point is rejected unevaluated.
  double operator()(const std::vector<double>& x) {
    if (count_ >= budget_) return std::numeric_limits<double>::infinity();
    ++count_;
    const double v = f_(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }
  bool exhausted() const { return count_ >= budget_; }
  int count() const { return count_; }

 private:
  const Objective& f_;
  int budget_;
  int count_ = 0;
};

// One simplex run from `start`. Returns true on convergence.
bool run_simplex(CountingObjective& f, const std::vector<double>& start,
                 const std::vector<double>& steps, const NelderMeadOptions& opt, Vertex& best) {
  const std::size_t n = start.size();
  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  simplex.push_back({start, f(start)});
  for (std::size_t i = 0; i < n; ++i) {
    auto x = start;
    x[i] += steps[i];
    simplex.push_back({x, f(x)});
  }

  auto by_value = [](const Vertex& l, const Vertex& r) { return l.f < r.f; };
  std::vector<double> centroid(n), trial(n);

  auto point_along = [&](const std::vector<double>& worst, double coef) {
    for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + coef * (worst[k] - centroid[k]);
    return trial;
  };

  bool converged = false;
  while (!f.exhausted()) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    const Vertex& lo = simplex.front();
    const Vertex& hi = simplex.back();

    double diameter = 0.0;
    for (std::size_t v = 1; v <= n; ++v) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = simplex[v].x[k] - lo.x[k];
        d2 += d * d;
      }
      diameter = std::max(diameter, std::sqrt(d2));
    }
    if (std::isfinite(hi.f) && hi.f - lo.f <= opt.f_tolerance && diameter <= opt.x_tolerance) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[v].x[k] / static_cast<double>(n);

    Vertex& worst = simplex.back();
    const double second_worst = simplex[n - 1].f;

    auto reflected = point_along(worst.x, -1.0);
    const double fr = f(reflected);
    if (fr < lo.f) {
      auto expanded = point_along(worst.x, -2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        worst = {expanded, fe};
      } else {
        worst = {reflected, fr};
      }
      continue;
    }
    if (fr < second_worst) {
      worst = {reflected, fr};
      continue;
    }
    // Contraction, outside if the reflection improved on the worst vertex.
    const bool outside = fr < worst.f;
    auto contracted = point_along(worst.x, outside ? -0.5 : 0.5);
    const double fc = f(contracted);
    if (fc < (outside ? fr : worst.f)) {
      worst = {contracted, fc};
      continue;
    }
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t k = 0; k < n; ++k)
        simplex[v].x[k] = simplex[0].x[k] + 0.5 * (simplex[v].x[k] - simplex[0].x[k]);
      simplex[v].f = f(simplex[v].x);
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  if (simplex.front().f <= best.f) best = simplex.front();
  return converged;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& objective, std::vector<double> start,
                             const NelderMeadOptions& options) {
  if (start.empty()) throw std::invalid_argument("nelder_mead: empty start point");
  std::vector<double> steps = options.initial_step;
  if (steps.empty()) steps.assign(start.size(), 0.1);
  if (steps.size() != start.size()) throw std::invalid_argument("nelder_mead: step size mismatch");

  CountingObjective f(objective, options.max_evaluations);
  Vertex best{start, f(start)};
  bool converged = false;
  for (int run = 0; run <= options.restarts && !f.exhausted(); ++run) {
    converged = run_simplex(f, best.x, steps, options, best);
    if (!converged) break;
  }
  return {best.x, best.f, f.count(), converged};
}

LineSearchResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                         double hi, double tolerance, int max_iterations) {
  if (!(lo < hi)) throw std::invalid_argument("golden_section_minimize: empty bracket");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  int evaluations = 2;
  for (int it = 0; it < max_iterations && hi - lo > tolerance; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
    ++evaluations;
  }
  if (fc < fd) return {c, fc, evaluations};
  return {d, fd, evaluations};
}

Eigen::MatrixXd finite_difference_hessian(const Objective& f, std::span<const double> x,
                                          std::span<const double> steps) {
  const std::size_t n = x.size();
  Eigen::MatrixXd h(n, n);
  std::vector<double> p(x.begin(), x.end());
  const double f0 = f(p);

  auto eval_shift = [&](std::size_t i, double di, std::size_t j, double dj) {
    p.assign(x.begin(), x.end());
    p[i] += di;
    p[j] += dj;
    return f(p);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double hi = steps[i];
    const double fp = eval_shift(i, hi, i, 0.0);
    const double fm = eval_shift(i, -hi, i, 0.0);
    h(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (std::size_t j = 0; j < i; ++j) {
      const double hj = steps[j];
      const double fpp = eval_shift(i, hi, j, hj);
      const double fpm = eval_shift(i, hi, j, -hj);
      const double fmp = eval_shift(i, -hi, j, hj);
      const double fmm = eval_shift(i, -hi, j, -hj);
      h(i, j) = h(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
    }
  }
  return h;
}

Eigen::VectorXd finite_difference_gradient(const Objective& f, std::span<const double> x,
                                           std::span<const double> steps) {
  const std::size_t n = x.size();
  Eigen::VectorXd g(n);
  std::vector<double> p(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = x[i] + steps[i];
    const double fp = f(p);
    p[i] = x[i] - steps[i];
    const double fm = f(p);
    p[i] = x[i];
    g(i) = (fp - fm) / (2.0 * steps[i]);
  }
  return g;
}

}  // namespace record_edge
