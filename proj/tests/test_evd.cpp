#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "record_edge/evd.hpp"
#include "record_edge/random.hpp"

using namespace record_edge;

namespace {

// Textbook forms with std::pow, no log1p/expm1.
double naive_cdf(double a, double s, double y) {
  if (a == 0.0) return 1.0 - std::exp(-y / s);
  const double base = 1.0 - a * y / s;
  if (base <= 0.0) return 1.0;
  return 1.0 - std::pow(base, 1.0 / a);
}

double naive_pdf(double a, double s, double y) {
  if (a == 0.0) return std::exp(-y / s) / s;
  const double base = 1.0 - a * y / s;
  if (base <= 0.0) return 0.0;
  return std::pow(base, 1.0 / a - 1.0) / s;
}

}  // namespace

TEST_SUITE("evd") {

TEST_CASE("cdf and pdf agree with the power form") {
  const ModelParams params[] = {{0.208, 2.609}, {-0.3, 1.5}, {0.9, 4.0}, {0.0, 2.0}};
  for (const auto& p : params) {
    for (double y = 0.0; y < 12.0; y += 0.37) {
      if (!p.domain_ok(y)) continue;
      CHECK(cdf(p, y) == doctest::Approx(naive_cdf(p.a, p.sigma, y)).epsilon(1e-12));
      CHECK(pdf(p, y) == doctest::Approx(naive_pdf(p.a, p.sigma, y)).epsilon(1e-11));
      CHECK(cdf(p, y) + survival(p, y) == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("reference parameters at the world-record margin") {
  const ModelParams p{0.208, 2.609};
  CHECK(cdf(p, 8.44) == doctest::Approx(naive_cdf(0.208, 2.609, 8.44)).epsilon(1e-13));
  CHECK(cdf(p, 8.44) == doctest::Approx(0.99536).epsilon(1e-4));
}

TEST_CASE("support beyond the endpoint") {
  const ModelParams p{0.5, 2.0};
  REQUIRE(endpoint(p).has_value());
  CHECK(*endpoint(p) == doctest::Approx(4.0));
  CHECK(cdf(p, 4.0) == 1.0);
  CHECK(cdf(p, 7.0) == 1.0);
  CHECK(pdf(p, 5.0) == 0.0);
  CHECK(std::isinf(log_pdf(p, 5.0)));
  CHECK_FALSE(p.domain_ok(4.0));
  CHECK(p.domain_ok(3.999));
  CHECK_FALSE(endpoint(ModelParams{-0.2, 1.0}).has_value());
  CHECK_FALSE(endpoint(ModelParams{0.0, 1.0}).has_value());
}

TEST_CASE("pdf at the endpoint for a = 1 is uniform density") {
  const ModelParams p{1.0, 3.0};
  CHECK(pdf(p, 1.5) == doctest::Approx(1.0 / 3.0));
  CHECK(pdf(p, 3.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("invalid arguments") {
  const ModelParams p{0.2, 2.0};
  CHECK_THROWS_AS(cdf(p, -0.1), std::domain_error);
  CHECK_THROWS_AS(cdf(p, std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  CHECK_THROWS_AS(quantile(p, 1.0), std::domain_error);
  CHECK_THROWS_AS(quantile(p, -0.1), std::domain_error);
  CHECK_THROWS_AS(cdf(ModelParams{0.2, 0.0}, 1.0), std::domain_error);
  CHECK_THROWS_AS(cdf(ModelParams{0.2, -1.0}, 1.0), std::domain_error);
  CHECK_THROWS_AS(pdf(ModelParams{NAN, 1.0}, 1.0), std::domain_error);
  CHECK(quantile(p, 0.0) == 0.0);
}

TEST_CASE("quantile inverts cdf") {
  Rng rng(11);
  for (int i = 0; i < 5000; ++i) {
    const ModelParams p{-1.0 + 2.5 * uniform01(rng), 0.5 + 5.0 * uniform01(rng)};
    const double u = uniform01(rng);
    CHECK(std::abs(cdf(p, quantile(p, u)) - u) < 1e-10);
  }
}

TEST_CASE("exponential branch is continuous") {
  for (double y : {0.1, 1.0, 5.0, 20.0}) {
    const double mid = cdf(ModelParams{0.0, 2.0}, y);
    for (double a : {1e-8, -1e-8, 2e-8, -2e-8}) {
      CHECK(cdf(ModelParams{a, 2.0}, y) == doctest::Approx(mid).epsilon(1e-6));
      CHECK(pdf(ModelParams{a, 2.0}, y) ==
            doctest::Approx(pdf(ModelParams{0.0, 2.0}, y)).epsilon(1e-6));
    }
  }
  // far in the tail the two sides of the switch still agree
  for (double y : {50.0, 200.0}) {
    const ModelParams in{0.999e-8, 1.0}, out{1.001e-8, 1.0};
    REQUIRE(in.is_exponential());
    REQUIRE_FALSE(out.is_exponential());
    CHECK(survival(in, y) == doctest::Approx(survival(out, y)).epsilon(1e-8));
    CHECK(log_pdf(in, y) == doctest::Approx(log_pdf(out, y)).epsilon(1e-8));
  }
  CHECK(ModelParams{5e-9, 1.0}.is_exponential());
  CHECK_FALSE(ModelParams{2e-8, 1.0}.is_exponential());
}

TEST_CASE("log likelihood is the sum of log densities") {
  const ModelParams p{0.208, 2.609};
  const std::vector<double> ys{0.3, 1.2, 2.5, 4.0, 8.44};
  double expect = 0.0;
  for (double y : ys) expect += std::log(naive_pdf(p.a, p.sigma, y));
  CHECK(log_likelihood(p, ys) == doctest::Approx(expect).epsilon(1e-12));

  const std::vector<double> beyond{1.0, 13.0};
  CHECK(log_likelihood(p, beyond) == kLogLikOutOfDomain);
  CHECK_THROWS_AS(log_likelihood(ModelParams{0.2, -1.0}, ys), std::domain_error);
  CHECK_THROWS_AS(log_likelihood(p, std::vector<double>{}), std::invalid_argument);
  CHECK(log_likelihood(ModelParams{0.0, 1.0}, std::vector<double>{1.0}) == doctest::Approx(-1.0));
}

TEST_CASE("simulated margins have the model mean") {
  // E[Y] = sigma / (1 + a)
  const ModelParams p{0.208, 2.609};
  Rng rng(2024);
  const auto ys = simulate_margins(p, 200000, rng);
  const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  const double expect = p.sigma / (1.0 + p.a);
  // sd(Y) = sigma / ((1 + a) sqrt(1 + 2a))
  const double se = p.sigma / ((1.0 + p.a) * std::sqrt(1.0 + 2.0 * p.a)) / std::sqrt(200000.0);
  CHECK(std::abs(mean - expect) < 4.0 * se);
  for (double y : ys) REQUIRE(p.domain_ok(y));

  Rng again(2024);
  CHECK(simulate_margins(p, 10, again) ==
        std::vector<double>(ys.begin(), ys.begin() + 10));
}

}  // TEST_SUITE
