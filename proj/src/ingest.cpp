#include "record_edge/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace record_edge {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Reads a run of digits of length [min_len, max_len] starting at pos.
int read_digits(std::string_view text, std::size_t& pos, std::size_t min_len, std::size_t max_len,
                const char* field) {
  const std::size_t start = pos;
  while (pos < text.size() && pos - start < max_len && is_digit(text[pos])) ++pos;
  if (pos - start < min_len) {
    throw ParseError(std::string("expected ") + field + " digits in '" + std::string(text) + "'",
                     start);
  }
  int value = 0;
  std::from_chars(text.data() + start, text.data() + pos, value);
  return value;
}

bool valid_nation(std::string_view s) {
  return s.size() == 3 && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.emplace_back(trim(field));
  return fields;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t position, std::size_t line)
    : std::runtime_error(what + (line ? " (line " + std::to_string(line) + ")" : "") +
                         " at position " + std::to_string(position)),
      position_(position),
      line_(line) {}

RaceTime RaceTime::from_seconds(double seconds) {
  if (!std::isfinite(seconds)) throw std::invalid_argument("race time must be finite");
  return RaceTime(std::llround(seconds * 100.0));
}

RaceTime parse_race_time(std::string_view text, char minute_separator) {
  std::size_t pos = 0;
  const int minutes = read_digits(text, pos, 1, 2, "minute");
  if (pos >= text.size() || text[pos] != minute_separator) {
    throw ParseError("expected '" + std::string(1, minute_separator) + "' after minutes in '" +
                         std::string(text) + "'",
                     pos);
  }
  ++pos;
  const std::size_t seconds_pos = pos;
  const int seconds = read_digits(text, pos, 2, 2, "seconds");
  if (seconds >= 60) {
    throw ParseError("seconds field must be below 60 in '" + std::string(text) + "'", seconds_pos);
  }
  int hundredths = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t frac_pos = pos;
    hundredths = read_digits(text, pos, 1, 2, "fraction");
    if (pos - frac_pos == 1) hundredths *= 10;
  }
  if (pos != text.size()) {
    throw ParseError("unexpected trailing characters in '" + std::string(text) + "'", pos);
  }
  const std::int64_t cs = (static_cast<std::int64_t>(minutes) * 60 + seconds) * 100 + hundredths;
  if (cs <= 0) throw ParseError("race time must be positive", 0);
  return RaceTime(cs);
}

double parse_time(std::string_view text) { return parse_race_time(text).seconds(); }

std::string format_time(RaceTime time) {
  const std::int64_t cs = time.centiseconds();
  if (cs < 0) throw std::invalid_argument("cannot format a negative race time");
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%lld:%02lld.%02lld", static_cast<long long>(cs / 6000),
                static_cast<long long>((cs % 6000) / 100), static_cast<long long>(cs % 100));
  return buf.data();
}

std::string format_time(double seconds) { return format_time(RaceTime::from_seconds(seconds)); }

Date parse_date(std::string_view text) {
  std::size_t pos = 0;
  const int y = read_digits(text, pos, 4, 4, "year");
  if (pos >= text.size() || text[pos] != '-') throw ParseError("expected '-' in date", pos);
  ++pos;
  const int m = read_digits(text, pos, 2, 2, "month");
  if (pos >= text.size() || text[pos] != '-') throw ParseError("expected '-' in date", pos);
  ++pos;
  const int d = read_digits(text, pos, 2, 2, "day");
  if (pos != text.size()) throw ParseError("unexpected trailing characters in date", pos);
  const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) throw ParseError("invalid calendar date '" + std::string(text) + "'", 0);
  return date;
}

std::string format_date(const Date& date) {
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf.data();
}

int season_of(const Date& date) {
  const int year = static_cast<int>(date.year());
  return static_cast<unsigned>(date.month()) >= 7 ? year : year - 1;
}

double lap_schedule(double total_s, double opening_s, int laps) {
  if (laps < 1) throw std::invalid_argument("lap_schedule: need at least one lap");
  if (!(opening_s > 0.0) || !(total_s > opening_s)) {
    throw std::invalid_argument("lap_schedule: total must exceed a positive opening");
  }
  return (total_s - opening_s) / laps;
}

ReadReport read_results_csv(std::istream& in, ParseMode mode) {
  ReadReport report;
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> column;

  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto header = split_csv_line(line);
    for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
    for (const char* required : {"skater", "nation", "venue", "date", "time"}) {
      if (!column.contains(required)) {
        throw ParseError(std::string("missing column '") + required + "'", 0, line_no);
      }
    }
    break;
  }
  if (column.empty()) return report;  // nothing at all, not even a header
  const auto rank_col = column.find("pair_rank");

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto fields = split_csv_line(line);
      auto field = [&](const char* name) -> const std::string& {
        const std::size_t i = column.at(name);
        if (i >= fields.size()) throw ParseError(std::string("missing field '") + name + "'", 0);
        return fields[i];
      };
      RaceResult r;
      r.skater = field("skater");
      r.nation = field("nation");
      if (!r.nation.empty() && !valid_nation(r.nation)) {
        throw ParseError("nation must be three uppercase letters, got '" + r.nation + "'", 0);
      }
      r.venue = field("venue");
      r.date = parse_date(field("date"));
      r.time = parse_race_time(field("time"));
      if (rank_col != column.end() && rank_col->second < fields.size() &&
          !fields[rank_col->second].empty()) {
        std::size_t pos = 0;
        r.pair_rank = read_digits(fields[rank_col->second], pos, 1, 3, "pair rank");
        if (pos != fields[rank_col->second].size()) throw ParseError("bad pair rank", pos);
      }
      report.results.push_back(std::move(r));
    } catch (const ParseError& e) {
      if (mode == ParseMode::kStrict) throw ParseError(e.what(), e.position(), line_no);
      report.warnings.push_back({line_no, e.what()});
    }
  }
  return report;
}

ReadReport read_results_csv_file(const std::string& path, ParseMode mode) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  return read_results_csv(in, mode);
}

void write_results_csv(std::ostream& out, const std::vector<RaceResult>& results) {
  out << "skater,nation,venue,date,time,pair_rank\n";
  for (const auto& r : results) {
    out << csv_escape(r.skater) << ',' << r.nation << ',' << csv_escape(r.venue) << ','
        << format_date(r.date) << ',' << format_time(r.time) << ',';
    if (r.pair_rank) out << *r.pair_rank;
    out << '\n';
  }
}

std::vector<RaceResult> read_national_records(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  std::size_t indent = std::string::npos;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      lines.emplace_back();
      continue;
    }
    indent = std::min(indent, line.find_first_not_of(' '));
    lines.push_back(line);
  }

  std::vector<RaceResult> results;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t line_no = i + 1;
    const std::string_view row = std::string_view(lines[i]).substr(indent);
    auto slice = [&](std::size_t begin, std::size_t len) {
      if (row.size() < begin + len) throw ParseError("row too short", row.size(), line_no);
      return row.substr(begin, len);
    };
    for (std::size_t gap : {7u, 32u, 36u, 48u, 51u}) {
      if (slice(gap, 1) != " ") throw ParseError("expected column separator", gap, line_no);
    }
    try {
      RaceResult r;
      r.time = parse_race_time(slice(0, 7), '.');
      r.skater = std::string(trim(slice(8, 24)));
      r.nation = std::string(slice(33, 3));
      if (!valid_nation(r.nation)) throw ParseError("bad nation code", 33);
      r.venue = std::string(trim(slice(37, 11)));
      std::size_t pos = 0;
      const auto yy_field = slice(49, 2);
      const int yy = read_digits(yy_field, pos, 2, 2, "year");
      const auto mmdd = slice(52, 4);
      pos = 0;
      const int mm = read_digits(mmdd.substr(0, 2), pos, 2, 2, "month");
      pos = 0;
      const int dd = read_digits(mmdd.substr(2, 2), pos, 2, 2, "day");
      r.date = Date{std::chrono::year{2000 + yy}, std::chrono::month{static_cast<unsigned>(mm)},
                    std::chrono::day{static_cast<unsigned>(dd)}};
      if (!r.date.ok()) throw ParseError("invalid date", 49);
      const auto rank = trim(row.size() > 56 ? row.substr(56) : std::string_view{});
      if (!rank.empty()) {
        pos = 0;
        r.pair_rank = read_digits(rank, pos, 1, 3, "pair rank");
        if (pos != rank.size()) throw ParseError("bad pair rank", 56);
      }
      results.push_back(std::move(r));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), e.position(), line_no);
    }
  }
  return results;
}

ExceedanceSample to_exceedance(const std::vector<RaceResult>& results, RaceTime threshold) {
  if (threshold.centiseconds() <= 0) throw std::invalid_argument("threshold must be positive");
  ExceedanceSample s;
  s.threshold = threshold;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.time >= threshold) {
      ++s.excluded;
      continue;
    }
    s.values.push_back(static_cast<double>(threshold.centiseconds() - r.time.centiseconds()) / 100.0);
    s.seasons.push_back(season_of(r.date));
    s.source.push_back(i);
  }
  return s;
}

std::vector<SeasonGroup> group_by_season(const ExceedanceSample& sample) {
  std::map<int, std::vector<double>> by_season;
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    by_season[sample.seasons[i]].push_back(sample.values[i]);
  }
  std::vector<SeasonGroup> out;
  for (auto& [season, values] : by_season) out.push_back({season, std::move(values)});
  return out;
}

}  // namespace record_edge
