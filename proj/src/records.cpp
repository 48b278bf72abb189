#include "record_edge/records.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "record_edge/random.hpp"

namespace record_edge {

namespace {
constexpr std::uint64_t kDirectSumLimit = 1'000'000;
}

RecordCountStats expected_records(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("expected_records: n must be at least 1");
  RecordCountStats s{n, 0.0, 0.0};
  if (n <= kDirectSumLimit) {
    double harmonic = 0.0, squares = 0.0;
    for (std::uint64_t k = 1; k <= n; ++k) {
      const double inv = 1.0 / static_cast<double>(k);
      harmonic += inv;
      squares += inv * inv;
    }
    s.mean = harmonic;
    s.variance = harmonic - squares;
    return s;
  }
  const double x = static_cast<double>(n);
  s.mean = std::log(x) + std::numbers::egamma + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x);
  // sum_{k<=n} 1/k^2 = pi^2/6 - 1/n + 1/(2 n^2) - ...
  const double squares = std::numbers::pi * std::numbers::pi / 6.0 - 1.0 / x + 1.0 / (2.0 * x * x);
  s.variance = s.mean - squares;
  return s;
}

std::optional<double> standardized_record_count(double count, std::uint64_t n) {
  if (n < 2) return std::nullopt;
  const double log_n = std::log(static_cast<double>(n));
  return (count - log_n) / std::sqrt(log_n);
}

double RecordCountDistribution::standard_error() const {
  return replicates > 0 ? std::sqrt(variance / static_cast<double>(replicates)) : 0.0;
}

RecordCountDistribution simulate_record_counts(std::uint64_t n, std::uint64_t replicates,
                                               std::uint64_t seed, RecordSource source) {
  if (n == 0) throw std::invalid_argument("simulate_record_counts: n must be at least 1");
  if (replicates == 0) throw std::invalid_argument("simulate_record_counts: need a replicate");
  RecordCountDistribution out;
  out.n = n;
  out.replicates = replicates;
  out.seed = seed;

  double sum = 0.0, sum2 = 0.0, sum3 = 0.0;
  for (std::uint64_t r = 0; r < replicates; ++r) {
    Rng rng(split_seed(seed, r));
    std::uint64_t count = 0;
    double best = -1.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      double x = uniform01(rng);
      if (source == RecordSource::kExponential) x = -std::log1p(-x);
      if (x > best) {
        best = x;
        ++count;
      }
    }
    ++out.frequency[count];
    const double c = static_cast<double>(count);
    sum += c;
    sum2 += c * c;
    sum3 += c * c * c;
  }
  const double m = static_cast<double>(replicates);
  out.mean = sum / m;
  const double central2 = sum2 / m - out.mean * out.mean;
  out.variance = replicates > 1 ? central2 * m / (m - 1.0) : 0.0;
  if (central2 > 0.0) {
    const double central3 = sum3 / m - 3.0 * out.mean * sum2 / m + 2.0 * out.mean * out.mean * out.mean;
    out.skewness = central3 / std::pow(central2, 1.5);
  }
  return out;
}

}  // namespace record_edge
