#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "record_edge/estimation.hpp"
#include "record_edge/optimize.hpp"
#include "record_edge/random.hpp"

using namespace record_edge;

namespace {

std::vector<double> draw(const ModelParams& p, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_margins(p, n, rng);
}

}  // namespace

TEST_SUITE("estimation") {

TEST_CASE("recovers the generating parameters") {
  const ModelParams truth{0.208, 2.609};
  int inside_a = 0, inside_s = 0, fitted = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ys = draw(truth, 126, split_seed(77, seed));
    const auto fit = fit_mle(ys);
    if (!fit.se) continue;
    ++fitted;
    inside_a += std::abs(fit.params.a - truth.a) < 3.0 * fit.se->se_a;
    inside_s += std::abs(fit.params.sigma - truth.sigma) < 3.0 * fit.se->se_sigma;
  }
  CHECK(fitted >= 95);
  CHECK(inside_a >= 95);
  CHECK(inside_s >= 95);
}

TEST_CASE("exponential data gives a shape near zero") {
  const auto ys = draw(ModelParams{0.0, 1.0}, 1000, 5);
  const auto fit = fit_mle(ys);
  CHECK(fit.converged);
  CHECK(std::abs(fit.params.a) < 0.1);
}

TEST_CASE("exponential standard error of the scale") {
  // Var(sigma_hat) = sigma^2 / n when the shape is known; with the shape free
  // the GPD information gives 2 sigma^2 (1 - a) / n at a = 0.
  const auto ys = draw(ModelParams{0.0, 1.0}, 10000, 9);
  const auto fit = fit_mle(ys);
  REQUIRE(fit.se);
  CHECK(fit.se->se_sigma == doctest::Approx(std::sqrt(2.0) / 100.0).epsilon(0.2));
  CHECK(fit.se->se_a == doctest::Approx(1.0 / 100.0).epsilon(0.2));
}

TEST_CASE("standard errors match the expected information") {
  // For the shape xi = -a: Var(xi) = (1 + xi)^2 / n, Var(sigma) = 2 sigma^2 (1 + xi) / n.
  const ModelParams truth{0.208, 2.609};
  const std::size_t n = 20000;
  const auto fit = fit_mle(draw(truth, n, 31));
  REQUIRE(fit.se);
  const double xi = -fit.params.a;
  CHECK(fit.se->se_a == doctest::Approx((1.0 + xi) / std::sqrt(double(n))).epsilon(0.1));
  CHECK(fit.se->se_sigma ==
        doctest::Approx(fit.params.sigma * std::sqrt(2.0 * (1.0 + xi) / n)).epsilon(0.1));
}

TEST_CASE("first-order condition at the optimum") {
  const auto ys = draw(ModelParams{0.208, 2.609}, 126, 3);
  const auto fit = fit_mle(ys);
  REQUIRE(fit.converged);
  const Objective ll = [&](std::span<const double> x) {
    return log_likelihood(ModelParams{x[0], std::exp(x[1])}, ys);
  };
  const std::vector<double> x{fit.params.a, std::log(fit.params.sigma)};
  const std::vector<double> h{1e-5, 1e-5};
  CHECK(finite_difference_gradient(ll, x, h).norm() < 1e-4);
  CHECK(fit.params.domain_ok(*std::max_element(ys.begin(), ys.end())));
  CHECK(std::isfinite(fit.loglik));
}

TEST_CASE("fit never loses to its starting point") {
  const auto ys = draw(ModelParams{-0.2, 1.5}, 80, 17);
  const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  for (const ModelParams init : {ModelParams{0.01, mean}, ModelParams{-0.5, 3.0}, ModelParams{0.3, 4.0}}) {
    const auto fit = fit_mle(ys, init);
    CHECK(fit.loglik >= log_likelihood(init, ys));
    CHECK(fit.loglik >= log_likelihood(ModelParams{0.0, mean}, ys) - 1e-9);
  }
}

TEST_CASE("scale equivariance") {
  const auto ys = draw(ModelParams{0.208, 2.609}, 126, 23);
  std::vector<double> scaled(ys);
  for (double& y : scaled) y *= 3.5;
  const auto f1 = fit_mle(ys);
  const auto f2 = fit_mle(scaled);
  CHECK(f2.params.a == doctest::Approx(f1.params.a).epsilon(1e-4).scale(1.0));
  CHECK(f2.params.sigma / 3.5 == doctest::Approx(f1.params.sigma).epsilon(1e-4));
}

TEST_CASE("hessian step halving is stable") {
  const auto ys = draw(ModelParams{0.208, 2.609}, 126, 41);
  const auto fit = fit_mle(ys);
  const auto s1 = observed_information_se(ys, fit.params, 1e-5);
  const auto s2 = observed_information_se(ys, fit.params, 0.5e-5);
  REQUIRE(s1);
  REQUIRE(s2);
  CHECK(s2->se_a == doctest::Approx(s1->se_a).epsilon(0.01));
  CHECK(s2->se_sigma == doctest::Approx(s1->se_sigma).epsilon(0.01));
}

TEST_CASE("boundary fits are flagged") {
  // best-per-nation margins pile up near the top and push a past 1
  const std::vector<double> ys{11.48, 9.77, 8.44, 8.16, 8.14, 8.02, 7.02, 5.79, 5.77,
                               3.25,  2.96, 2.19, 1.64, 1.36, 1.24, 1.17, 0.32};
  const auto fit = fit_mle(ys);
  CHECK(fit.at_boundary);
  CHECK_FALSE(fit.converged);
  CHECK_FALSE(fit.se.has_value());
  CHECK(std::isfinite(fit.loglik));
}

TEST_CASE("invalid samples") {
  CHECK_THROWS_AS(fit_mle(std::vector<double>{1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_mle(std::vector<double>{1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_mle(std::vector<double>{1.0, -2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_mle(std::vector<double>{1.0, NAN, 3.0}), std::invalid_argument);
}

}  // TEST_SUITE
