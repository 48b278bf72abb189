// Race results: time codecs, CSV and national-records table readers, and the
// conversion to margins below a threshold.

#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace record_edge {

/// Race time held as integer centiseconds.
class RaceTime {
 public:
  constexpr RaceTime() = default;
  constexpr explicit RaceTime(std::int64_t centiseconds) : cs_(centiseconds) {}

  static RaceTime from_seconds(double seconds);

  constexpr std::int64_t centiseconds() const { return cs_; }
  double seconds() const { return static_cast<double>(cs_) / 100.0; }

  friend constexpr auto operator<=>(RaceTime, RaceTime) = default;

 private:
  std::int64_t cs_ = 0;
};

inline constexpr RaceTime kDefaultThreshold{37000};  // 6:10.00

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position, std::size_t line = 0);
  std::size_t position() const { return position_; }
  std::size_t line() const { return line_; }

 private:
  std::size_t position_;
  std::size_t line_;
};

/// "M:SS.ss" or "MM:SS.ss" (fraction of one or two digits, or none).
/// `minute_separator` lets the national-records table use '.'.
RaceTime parse_race_time(std::string_view text, char minute_separator = ':');
double parse_time(std::string_view text);

/// "M:SS.ss", rounding to the nearest centisecond.
std::string format_time(RaceTime time);
std::string format_time(double seconds);

using Date = std::chrono::year_month_day;

/// ISO "YYYY-MM-DD".
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

/// Seasons run July 1 to June 30 and are named by their starting year.
int season_of(const Date& date);

/// Average lap time after the opening segment.
double lap_schedule(double total_s, double opening_s, int laps = 12);

struct RaceResult {
  std::string skater;
  std::string nation;  // three uppercase letters, or empty
  std::string venue;
  Date date{};
  RaceTime time;
  std::optional<int> pair_rank;
};

struct RowIssue {
  std::size_t line = 0;
  std::string message;
};

enum class ParseMode { kStrict, kLenient };

struct ReadReport {
  std::vector<RaceResult> results;
  std::vector<RowIssue> warnings;  // skipped rows in lenient mode
};

/// CSV with header skater,nation,venue,date,time[,pair_rank], columns in any
/// order. Strict mode throws ParseError at the first bad row; lenient mode
/// skips it with a warning. A missing column always throws.
ReadReport read_results_csv(std::istream& in, ParseMode mode = ParseMode::kStrict);
ReadReport read_results_csv_file(const std::string& path, ParseMode mode = ParseMode::kStrict);

void write_results_csv(std::ostream& out, const std::vector<RaceResult>& results);

/// Fixed-width national-records table: time(7) name(24) nation(3) venue(11)
/// yy(2) mmdd(4) pair-rank, single spaces between fields, times as M.SS.ss.
/// Blank lines are ignored, as is common leading indentation.
std::vector<RaceResult> read_national_records(std::istream& in);

struct ExceedanceSample {
  RaceTime threshold = kDefaultThreshold;
  std::vector<double> values;        // margins, seconds
  std::vector<int> seasons;          // season of each margin
  std::vector<std::size_t> source;   // index of the originating result
  std::size_t excluded = 0;          // results at or above the threshold

  bool empty() const { return values.empty(); }
  std::size_t size() const { return values.size(); }
};

ExceedanceSample to_exceedance(const std::vector<RaceResult>& results,
                               RaceTime threshold = kDefaultThreshold);

struct SeasonGroup {
  int season;
  std::vector<double> values;
};

/// Margins grouped by season, ascending.
std::vector<SeasonGroup> group_by_season(const ExceedanceSample& sample);

}  // namespace record_edge
