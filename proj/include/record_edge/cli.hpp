// Command-line front end. `run` is the whole program minus process exit, so
// tests can drive it in-process.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace record_edge::cli {

enum ExitCode : int { kOk = 0, kComputationFailure = 1, kUsageError = 2 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string threshold = "6:10.00";
  double lambda = 25.0;
  std::optional<std::uint64_t> seed;
  std::size_t sim = 25;
  std::string out_dir;
  std::string format = "csv";
  std::string params;  // "a,sigma" pins the model and skips fitting
  bool strict = false;

  // predict / confcurve
  std::vector<std::string> targets;
  double grid_step = 0.01;
  std::string focus = "prob";
  std::vector<double> levels{0.9};
  std::optional<double> grid_min;
  std::optional<double> grid_max;
  std::size_t grid_points = 0;

  // monitor
  double monitor_max = 10.0;
  std::size_t monitor_points = 501;
  bool no_refit = false;

  // records
  std::uint64_t records_n = 10000;
  std::uint64_t replicates = 10000;
};

inline constexpr std::uint64_t kDefaultSeed = 20260124;
inline constexpr const char* kSeedEnvVar = "RECORD_EDGE_SEED";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace record_edge::cli
