#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "record_edge/adequacy.hpp"
#include "record_edge/estimation.hpp"
#include "record_edge/random.hpp"

using namespace record_edge;

namespace {

const ModelParams kTruth{0.208, 2.609};

std::vector<double> sample_at(const ModelParams& p, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_margins(p, n, rng);
}

// One-sample Kolmogorov-Smirnov distance from the order statistics.
double ks_distance(std::vector<double> ys, const ModelParams& p) {
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(ys.size());
  double d = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double f = cdf(p, ys[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double count_at_most(const std::vector<double>& ys, double y) {
  return static_cast<double>(std::count_if(ys.begin(), ys.end(), [&](double v) { return v <= y; }));
}

std::vector<SeasonGroup> seasonal_sample(double trend, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SeasonGroup> groups;
  const double centre = 2015.0;
  for (int season = 2006; season <= 2024; ++season) {
    const ModelParams p{kTruth.a, kTruth.sigma * std::exp(trend * (season - centre))};
    groups.push_back({season, simulate_margins(p, 7, rng)});
  }
  return groups;
}

}  // namespace

TEST_SUITE("adequacy") {

TEST_CASE("grid") {
  const auto g = monitor_grid();
  REQUIRE(g.size() == 501);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 10.0);
  CHECK(g[1] == doctest::Approx(0.02));
}

TEST_CASE("single observation jump") {
  const ModelParams p{0.2, 2.0};
  const double median = quantile(p, 0.5);
  const std::vector<double> ys{median};
  const std::vector<double> grid{0.0, median - 1e-9, median, median + 1e-9};
  const auto z = monitor_process(ys, p, grid);
  CHECK(z[0] == 0.0);
  CHECK(z[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(z[2] == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(z[3] == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("process matches direct evaluation") {
  const auto ys = sample_at(kTruth, 126, 4);
  const auto fit = fit_mle(ys);
  const auto grid = monitor_grid();
  const auto z = monitor_process(ys, fit.params, grid);
  const double n = static_cast<double>(ys.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double expect = std::sqrt(n) * (cdf(fit.params, grid[k]) - count_at_most(ys, grid[k]) / n);
    CHECK(z[k] == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
  }
  CHECK(z.front() == 0.0);
}

TEST_CASE("ties share one jump") {
  const ModelParams p{0.0, 1.0};
  const std::vector<double> ys{1.0, 1.0, 2.0, 3.0};
  const std::vector<double> grid{1.0};
  CHECK(monitor_process(ys, p, grid)[0] == doctest::Approx(2.0 * (cdf(p, 1.0) - 0.5)));
}

TEST_CASE("quantile-median sample stays small") {
  const std::size_t n = 200;
  std::vector<double> ys;
  for (std::size_t i = 0; i < n; ++i) ys.push_back(quantile(kTruth, (i + 0.5) / n));
  const auto z = monitor_process(ys, kTruth, monitor_grid());
  for (double v : z) CHECK(std::abs(v) <= 1.0 / std::sqrt(double(n)) + 1e-12);
}

TEST_CASE("supremum is root-n times the KS distance") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto ys = sample_at(kTruth, 126, seed);
    const auto fit = fit_mle(ys);
    CHECK(std::abs(monitor_sup(ys, fit.params) - std::sqrt(126.0) * ks_distance(ys, fit.params)) < 1e-10);
  }
}

TEST_CASE("empty sample") {
  const std::vector<double> none;
  CHECK_THROWS_AS(monitor_process(none, kTruth, monitor_grid()), std::invalid_argument);
}

TEST_CASE("envelope is deterministic and well formed") {
  const auto ys = sample_at(kTruth, 126, 5);
  const auto fit = fit_mle(ys);
  const auto r1 = monitor_envelope(ys, fit.params, 25, 42);
  const auto r2 = monitor_envelope(ys, fit.params, 25, 42);
  CHECK(r1.envelope == r2.envelope);
  CHECK(r1.observed == r2.observed);
  CHECK(r1.sim == 25);
  CHECK(r1.envelope.size() + r1.dropped == 25);
  CHECK(r1.exceed_fraction >= 0.0);
  CHECK(r1.exceed_fraction <= 1.0);
  for (const auto& curve : r1.envelope) {
    REQUIRE(curve.size() == r1.grid.size());
    CHECK(curve.front() == 0.0);
  }
  for (std::size_t k = 0; k < r1.grid.size(); ++k) CHECK(r1.band_lo[k] <= r1.band_hi[k]);
  const auto r3 = monitor_envelope(ys, fit.params, 25, 43);
  CHECK(r3.envelope != r1.envelope);
}

TEST_CASE("one replicate is its own band") {
  const auto ys = sample_at(kTruth, 60, 6);
  const auto fit = fit_mle(ys);
  const auto r = monitor_envelope(ys, fit.params, 1, 7);
  REQUIRE(r.envelope.size() == 1);
  CHECK(r.band_lo == r.envelope[0]);
  CHECK(r.band_hi == r.envelope[0]);
}

TEST_CASE("misfit data exceeds the band more often") {
  double own = 0.0, inflated = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto good = sample_at(kTruth, 126, 100 + seed);
    const auto bad = sample_at(ModelParams{kTruth.a, 1.5 * kTruth.sigma}, 126, 200 + seed);
    own += monitor_envelope(good, kTruth, 50, seed).exceed_fraction;
    inflated += monitor_envelope(bad, kTruth, 50, seed).exceed_fraction;
  }
  CHECK(inflated > own + 1.0);
}

TEST_CASE("trend is near zero under the null") {
  int quiet = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto groups = seasonal_sample(0.0, split_seed(500, r));
    const auto t = fit_trend(groups);
    REQUIRE(t.se_trend);
    quiet += std::abs(t.trend_gamma) < 2.0 * *t.se_trend;
  }
  CHECK(quiet >= 90);
}

TEST_CASE("injected trend has the right sign") {
  int positive = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto t = fit_trend(seasonal_sample(0.05, split_seed(600, r)));
    positive += t.trend_gamma > 0.0;
  }
  CHECK(positive >= 95);
}

TEST_CASE("trend fit bookkeeping") {
  const auto groups = seasonal_sample(0.0, 9);
  const auto t = fit_trend(groups);
  CHECK(t.seasons.size() == 19);
  CHECK(t.counts.front() == 7);
  double sum = 0.0;
  for (double x : t.x_values) sum += x;
  CHECK(std::abs(sum) < 1e-9);
  CHECK(t.x_values.front() == doctest::Approx(-9.0));
  REQUIRE(t.wald_z);
  CHECK(*t.wald_z == doctest::Approx(t.trend_gamma / *t.se_trend));
}

TEST_CASE("frozen trend reproduces the pooled fit") {
  const auto groups = seasonal_sample(0.0, 10);
  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.values.begin(), g.values.end());
  const auto fit = fit_mle(pooled);
  TrendOptions frozen;
  frozen.freeze_trend = true;
  const auto t = fit_trend(groups, frozen);
  CHECK(t.trend_gamma == 0.0);
  CHECK(std::abs(t.loglik - fit.loglik) < 1e-8);
  CHECK(fit_trend(groups).loglik >= t.loglik - 1e-9);
}

TEST_CASE("duplicated season makes the trend inert") {
  const auto ys = sample_at(kTruth, 40, 11);
  const std::vector<SeasonGroup> groups{{2020, ys}, {2020, ys}};
  std::vector<double> both(ys);
  both.insert(both.end(), ys.begin(), ys.end());
  const auto t = fit_trend(groups);
  CHECK_FALSE(t.trend_identifiable);
  CHECK(std::abs(t.trend_gamma) < 1e-12);
  CHECK(std::abs(t.loglik - fit_mle(both).loglik) < 1e-6);
}

TEST_CASE("trend argument errors") {
  const auto ys = sample_at(kTruth, 10, 1);
  CHECK_THROWS_AS(fit_trend(std::vector<SeasonGroup>{{2020, ys}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_trend(std::vector<SeasonGroup>{{2020, ys}, {2021, {}}}), std::invalid_argument);
}

}  // TEST_SUITE
