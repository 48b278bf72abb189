// Record counts in i.i.d. sequences. A record at trial k has probability 1/k
// independently of the others, so the count after n trials has mean H_n and
// variance sum_k (1/k)(1 - 1/k).

#pragma once

#include <cstdint>
#include <map>
#include <optional>

namespace record_edge {

struct RecordCountStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
};

/// Direct summation up to n = 10^6, asymptotic expansions beyond.
/// Throws std::invalid_argument for n = 0.
RecordCountStats expected_records(std::uint64_t n);

/// (count - log n) / sqrt(log n); empty for n = 1.
std::optional<double> standardized_record_count(double count, std::uint64_t n);

enum class RecordSource { kUniform, kExponential };

struct RecordCountDistribution {
  std::uint64_t n = 0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  std::map<std::uint64_t, std::uint64_t> frequency;  // record count -> replicates
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;

  double standard_error() const;
};

/// Counts strict running maxima (ties are not records) in `replicates`
/// sequences of n draws; replicate r uses the stream split_seed(seed, r).
RecordCountDistribution simulate_record_counts(std::uint64_t n, std::uint64_t replicates,
                                               std::uint64_t seed,
                                               RecordSource source = RecordSource::kUniform);

}  // namespace record_edge
