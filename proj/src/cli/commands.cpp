#include "record_edge/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "record_edge/adequacy.hpp"
#include "record_edge/confidence.hpp"
#include "record_edge/estimation.hpp"
#include "record_edge/evd.hpp"
#include "record_edge/ingest.hpp"
#include "record_edge/prediction.hpp"
#include "record_edge/records.hpp"

namespace record_edge::cli {

namespace {

using json = nlohmann::ordered_json;

// Input and usage problems that should exit with kUsageError.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

double round_to(double v, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(v * scale) / scale;
}

// Shortest round-trip representation; "nan"/"inf" spelled out for CSV.
std::string exact(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json optional_number(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

struct Context {
  RunConfig cfg;
  std::uint64_t seed = kDefaultSeed;
  RaceTime threshold;
  std::ostream& out;
  std::ostream& err;
};

std::uint64_t resolve_seed(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv(kSeedEnvVar); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw UsageError(std::string(kSeedEnvVar) + " is not an unsigned integer");
    return v;
  }
  return kDefaultSeed;
}

json config_json(const Context& ctx) {
  const auto& c = ctx.cfg;
  json j;
  j["command"] = c.command;
  j["input"] = c.input.empty() ? json(nullptr) : json(c.input);
  j["threshold"] = format_time(ctx.threshold);
  j["threshold_s"] = ctx.threshold.seconds();
  j["lambda"] = c.lambda;
  j["seed"] = ctx.seed;
  j["sim"] = c.sim;
  j["format"] = c.format;
  j["params"] = c.params.empty() ? json(nullptr) : json(c.params);
  j["strict"] = c.strict;
  if (c.command == "predict" || c.command == "confcurve") {
    j["targets"] = c.targets;
    j["grid_step"] = c.grid_step;
  }
  if (c.command == "confcurve") {
    j["focus"] = c.focus;
    j["levels"] = c.levels;
    j["grid_min"] = optional_number(c.grid_min);
    j["grid_max"] = optional_number(c.grid_max);
    j["grid_points"] = c.grid_points;
  }
  if (c.command == "monitor") {
    j["grid_max"] = c.monitor_max;
    j["grid_points"] = c.monitor_points;
    j["refit"] = !c.no_refit;
  }
  if (c.command == "records") {
    j["n"] = c.records_n;
    j["replicates"] = c.replicates;
  }
  return j;
}

std::filesystem::path out_path(const Context& ctx, const std::string& name) {
  const std::filesystem::path dir(ctx.cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_text(const Context& ctx, const std::string& name, const std::string& text) {
  const auto path = out_path(ctx, name);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path.string() + "'");
  f << text;
}

void write_json(const Context& ctx, const std::string& name, const json& j) {
  write_text(ctx, name, j.dump(2) + "\n");
}

ExceedanceSample load_sample(const Context& ctx) {
  if (ctx.cfg.input.empty()) throw UsageError("--input is required for '" + ctx.cfg.command + "'");
  ReadReport report;
  try {
    report = read_results_csv_file(ctx.cfg.input,
                                   ctx.cfg.strict ? ParseMode::kStrict : ParseMode::kLenient);
  } catch (const std::ios_base::failure&) {
    throw UsageError("cannot read input file '" + ctx.cfg.input + "'");
  } catch (const ParseError& e) {
    throw UsageError(ctx.cfg.input + ": " + e.what());
  }
  for (const auto& w : report.warnings) {
    ctx.err << "warning: " << ctx.cfg.input << ":" << w.line << ": skipped row: " << w.message << "\n";
  }
  auto sample = to_exceedance(report.results, ctx.threshold);
  if (sample.empty()) {
    throw UsageError("no races below the threshold " + format_time(ctx.threshold) + " in '" +
                     ctx.cfg.input + "'");
  }
  return sample;
}

ModelParams parse_params(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--params expects 'a,sigma'");
  try {
    std::size_t used_a = 0, used_s = 0;
    const std::string a_text = text.substr(0, comma), s_text = text.substr(comma + 1);
    ModelParams p{std::stod(a_text, &used_a), std::stod(s_text, &used_s)};
    if (used_a != a_text.size() || used_s != s_text.size()) throw std::invalid_argument("");
    p.validate();
    return p;
  } catch (const std::exception&) {
    throw UsageError("--params expects 'a,sigma' with sigma > 0, got '" + text + "'");
  }
}

FitResult fit_or_fail(const Context& ctx, const ExceedanceSample& sample) {
  FitResult fit;
  try {
    fit = fit_mle(sample.values);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("cannot fit: ") + e.what());
  }
  if (!fit.converged) {
    const std::string msg = std::string("maximum-likelihood search did not converge") +
                            (fit.at_boundary ? " (estimate on the support boundary)" : "");
    if (ctx.cfg.strict) throw ComputationError(msg);
    ctx.err << "warning: " << msg << "\n";
  }
  return fit;
}

json fit_json(const FitResult& fit, const Context& ctx) {
  json j;
  j["a"] = fit.params.a;
  j["sigma"] = fit.params.sigma;
  j["se_a"] = fit.se ? json(fit.se->se_a) : json(nullptr);
  j["se_sigma"] = fit.se ? json(fit.se->se_sigma) : json(nullptr);
  j["loglik"] = fit.loglik;
  j["n"] = fit.n;
  j["converged"] = fit.converged;
  j["at_boundary"] = fit.at_boundary;
  j["iterations"] = fit.iterations;
  const auto gamma = endpoint(fit.params);
  j["endpoint_s"] = optional_number(gamma);
  if (gamma) {
    const double r0 = ctx.threshold.seconds() - *gamma;
    j["r0_s"] = r0;
    j["r0"] = r0 > 0.0 ? json(format_time(r0)) : json(nullptr);
  } else {
    j["r0_s"] = nullptr;
    j["r0"] = nullptr;
  }
  return j;
}

// ---- fit -------------------------------------------------------------------

int cmd_fit(Context& ctx) {
  const auto sample = load_sample(ctx);
  const auto fit = fit_or_fail(ctx, sample);

  auto& o = ctx.out;
  o << "races below " << format_time(ctx.threshold) << ": n = " << sample.size()
    << " (excluded " << sample.excluded << ")\n";
  o << "a     = " << fixed(fit.params.a, 4);
  if (fit.se) o << "  (se " << fixed(fit.se->se_a, 4) << ")";
  o << "\nsigma = " << fixed(fit.params.sigma, 4);
  if (fit.se) o << "  (se " << fixed(fit.se->se_sigma, 4) << ")";
  o << "\nloglik = " << fixed(fit.loglik, 4) << "\nconverged: " << (fit.converged ? "yes" : "no")
    << "\n";
  if (const auto gamma = endpoint(fit.params)) {
    o << "endpoint sigma/a = " << fixed(*gamma, 2) << " s, ultimate time r0 = "
      << format_time(ctx.threshold.seconds() - *gamma) << "\n";
  } else {
    o << "endpoint: none (a <= 0, unbounded support)\n";
  }

  json j;
  j["command"] = "fit";
  j["config"] = config_json(ctx);
  j["excluded"] = sample.excluded;
  j["fit"] = fit_json(fit, ctx);
  if (!ctx.cfg.out_dir.empty()) write_json(ctx, "fit.json", j);
  else if (ctx.cfg.format == "json") o << j.dump(2) << "\n";
  return kOk;
}

// ---- predict ---------------------------------------------------------------

struct ModelSource {
  ModelParams params;
  std::optional<FitResult> fit;
  std::optional<ExceedanceSample> sample;
};

ModelSource model_from(Context& ctx) {
  ModelSource m;
  if (!ctx.cfg.params.empty()) {
    m.params = parse_params(ctx.cfg.params);
    return m;
  }
  if (ctx.cfg.input.empty()) throw UsageError("either --params or --input is required");
  m.sample = load_sample(ctx);
  m.fit = fit_or_fail(ctx, *m.sample);
  m.params = m.fit->params;
  return m;
}

int cmd_predict(Context& ctx) {
  const auto model = model_from(ctx);
  const auto volume = VolumeModel::poisson(ctx.cfg.lambda);
  const double threshold = ctx.threshold.seconds();
  auto& o = ctx.out;

  o << "model a = " << fixed(model.params.a, 4) << ", sigma = " << fixed(model.params.sigma, 4)
    << (model.fit ? " (fitted)" : " (pinned)") << ", lambda = " << ctx.cfg.lambda << "\n";

  json targets = json::array();
  bool target_error = false;
  for (const auto& t : ctx.cfg.targets) {
    json row;
    row["target"] = t;
    try {
      const RaceTime target = parse_race_time(t);
      if (target >= ctx.threshold) {
        throw UsageError("target " + t + " does not beat the threshold " + format_time(ctx.threshold));
      }
      const double p = prob_break(model.params, volume, target.seconds(), threshold);
      row["target_s"] = target.seconds();
      row["margin_s"] = static_cast<double>(ctx.threshold.centiseconds() - target.centiseconds()) / 100.0;
      row["p_break"] = round_to(p, 4);
      o << "P(race below " << format_time(target) << ") = " << fixed(p, 4) << "\n";
    } catch (const std::exception& e) {
      target_error = true;
      row["error"] = e.what();
      ctx.err << "error: " << e.what() << "\n";
    }
    targets.push_back(row);
  }

  const auto grid = default_time_grid(model.params, threshold, ctx.cfg.grid_step);
  json j;
  j["command"] = "predict";
  j["config"] = config_json(ctx);
  j["params"] = {{"a", model.params.a}, {"sigma", model.params.sigma}, {"fitted", model.fit.has_value()}};
  j["targets"] = targets;
  if (!grid.empty()) {
    const auto curve = prediction_curve(model.params, volume, threshold, grid);
    j["curve_points"] = curve.points.size();
    if (!ctx.cfg.out_dir.empty()) {
      if (ctx.cfg.format == "json") {
        json rows = json::array();
        for (const auto& p : curve.points) {
          rows.push_back({{"race_time_s", p.race_time_s}, {"race_time", format_time(p.race_time_s)},
                          {"p_break", round_to(p.p_break, 4)}});
        }
        write_json(ctx, "prediction_curve.json", rows);
      } else {
        std::ostringstream csv;
        csv << "race_time_s,race_time,p_break\n";
        for (const auto& p : curve.points) {
          csv << fixed(p.race_time_s, 2) << ',' << format_time(p.race_time_s) << ','
              << fixed(p.p_break, 4) << '\n';
        }
        write_text(ctx, "prediction_curve.csv", csv.str());
      }
    }
  } else {
    j["curve_points"] = 0;
  }
  if (!ctx.cfg.out_dir.empty()) write_json(ctx, "predict.json", j);
  else if (ctx.cfg.format == "json") o << j.dump(2) << "\n";
  return target_error ? kUsageError : kOk;
}

// ---- confcurve -------------------------------------------------------------

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw UsageError("grid needs --grid-min < --grid-max and 2+ points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return g;
}

json interval_json(const ConfidenceInterval& ci, double level) {
  return {{"level", level},          {"lo", ci.lo},
          {"hi", ci.hi},             {"lo_open", ci.lo_open},
          {"hi_open", ci.hi_open},   {"lo_at_boundary", ci.lo_at_boundary},
          {"hi_at_boundary", ci.hi_at_boundary}};
}

int cmd_confcurve(Context& ctx) {
  const auto& c = ctx.cfg;
  if (c.focus != "prob" && c.focus != "endpoint") throw UsageError("--focus must be prob or endpoint");
  for (double level : c.levels) {
    if (!(level > 0.0 && level < 1.0)) throw UsageError("--level must lie in (0, 1)");
  }
  const auto sample = load_sample(ctx);
  const auto fit = fit_or_fail(ctx, sample);
  const double threshold = ctx.threshold.seconds();
  auto& o = ctx.out;

  ConfidenceCurve curve;
  json j;
  j["command"] = "confcurve";
  j["config"] = config_json(ctx);
  j["fit"] = fit_json(fit, ctx);

  if (c.focus == "prob") {
    if (c.targets.size() != 1) throw UsageError("--focus prob needs exactly one --target");
    const RaceTime target = parse_race_time(c.targets.front());
    if (target >= ctx.threshold) throw UsageError("target must beat the threshold");
    const double y0 = static_cast<double>(ctx.threshold.centiseconds() - target.centiseconds()) / 100.0;
    const ProbabilityProfile profile(sample.values, y0, VolumeModel::poisson(c.lambda), fit);
    std::vector<double> grid = default_probability_grid();
    if (c.grid_min || c.grid_max || c.grid_points) {
      grid = linear_grid(c.grid_min.value_or(1e-4), c.grid_max.value_or(0.9999),
                         c.grid_points ? c.grid_points : 400);
      for (double p : grid) {
        if (!(p > 0.0 && p < 1.0)) throw UsageError("probability grid must lie inside (0, 1)");
      }
    }
    curve = profile.curve(grid);
    for (double level : c.levels) refine_curve(curve, profile.function(), level, 1e-6);
    j["target"] = format_time(target);
    j["y0"] = y0;
    j["mle_focus"] = profile.mle_probability();
    o << "P(race below " << format_time(target) << ") estimate " << fixed(profile.mle_probability(), 4)
      << "\n";
  } else {
    const EndpointProfile profile(sample.values, fit);
    std::vector<double> grid = default_gamma_grid(sample.values);
    if (c.grid_min || c.grid_max || c.grid_points) {
      grid = linear_grid(c.grid_min.value_or(grid.front()), c.grid_max.value_or(grid.back()),
                         c.grid_points ? c.grid_points : 201);
    }
    curve = profile.curve(grid);
    for (double level : c.levels) refine_curve(curve, profile.function(), level, 1e-4);
    const auto gamma = profile.gamma_hat();
    j["mle_focus"] = optional_number(gamma);
    if (gamma) {
      j["r0_s"] = threshold - *gamma;
      j["r0"] = format_time(threshold - *gamma);
      o << "endpoint gamma = " << fixed(*gamma, 2) << " s, r0 = " << format_time(threshold - *gamma)
        << "\n";
    } else {
      j["r0_s"] = nullptr;
      j["r0"] = nullptr;
      o << "endpoint: no finite endpoint at the MLE\n";
    }
  }

  json intervals = json::array();
  for (double level : c.levels) {
    const auto ci = interval_from_curve(curve, level);
    intervals.push_back(interval_json(ci, level));
    o << fixed(100.0 * level, 0) << "% interval: [" << fixed(ci.lo, 4) << (ci.lo_open ? " (open)" : "")
      << ", " << fixed(ci.hi, 4) << (ci.hi_open ? " (open)" : "") << "]";
    if (c.focus == "endpoint") {
      o << "  r0 in [" << (ci.hi_open ? std::string("-") : format_time(threshold - ci.hi)) << ", "
        << format_time(threshold - ci.lo) << "]";
    }
    o << "\n";
  }
  std::size_t infeasible = 0;
  for (const auto& p : curve.points) infeasible += p.feasible ? 0 : 1;
  j["intervals"] = intervals;
  j["points"] = curve.points.size();
  j["infeasible_points"] = infeasible;
  j["non_monotone_points"] = curve.non_monotone.size();
  if (infeasible) o << infeasible << " grid point(s) infeasible\n";

  if (!c.out_dir.empty()) {
    const std::string stem = "confcurve_" + c.focus;
    if (c.format == "json") {
      json rows = json::array();
      for (const auto& p : curve.points) {
        json row{{"focus", p.focus}, {"feasible", p.feasible}};
        row["deviance"] = p.feasible ? json(p.deviance) : json(nullptr);
        row["confidence"] = p.feasible ? json(p.confidence) : json(nullptr);
        if (c.focus == "endpoint") row["r0_s"] = threshold - p.focus;
        rows.push_back(row);
      }
      write_json(ctx, stem + ".json", rows);
    } else {
      std::ostringstream csv;
      csv << "focus,deviance,confidence,feasible" << (c.focus == "endpoint" ? ",r0_s" : "") << "\n";
      for (const auto& p : curve.points) {
        csv << exact(p.focus) << ',' << (p.feasible ? exact(p.deviance) : "") << ','
            << (p.feasible ? exact(p.confidence) : "") << ',' << (p.feasible ? 1 : 0);
        if (c.focus == "endpoint") csv << ',' << exact(threshold - p.focus);
        csv << '\n';
      }
      write_text(ctx, stem + ".csv", csv.str());
    }
    write_json(ctx, stem + "_summary.json", j);
  } else if (c.format == "json") {
    o << j.dump(2) << "\n";
  }
  return kOk;
}

// ---- monitor ---------------------------------------------------------------

int cmd_monitor(Context& ctx) {
  const auto& c = ctx.cfg;
  if (c.sim < 1) throw UsageError("--sim must be at least 1");
  const auto sample = load_sample(ctx);
  ModelParams params;
  if (!c.params.empty()) {
    params = parse_params(c.params);
  } else {
    params = fit_or_fail(ctx, sample).params;
  }
  MonitorOptions options;
  options.grid = monitor_grid(c.monitor_max, c.monitor_points);
  options.refit = !c.no_refit;
  const auto result = monitor_envelope(sample.values, params, c.sim, ctx.seed, options);

  auto& o = ctx.out;
  o << "monitoring process over [0, " << c.monitor_max << "], n = " << sample.size() << ", sim = " << c.sim
    << " (dropped " << result.dropped << "), seed = " << ctx.seed << "\n";
  o << "sup |Z_n| = " << fixed(result.observed_sup, 4) << ", outside the simulated band at "
    << fixed(100.0 * result.exceed_fraction, 1) << "% of grid points\n";

  json j;
  j["command"] = "monitor";
  j["config"] = config_json(ctx);
  j["params"] = {{"a", params.a}, {"sigma", params.sigma}};
  j["n"] = sample.size();
  j["sim"] = result.sim;
  j["kept"] = result.envelope.size();
  j["dropped"] = result.dropped;
  j["exceed_fraction"] = result.exceed_fraction;
  j["observed_sup"] = result.observed_sup;
  j["seed"] = ctx.seed;

  if (!c.out_dir.empty()) {
    if (c.format == "json") {
      json curves;
      curves["grid"] = result.grid;
      curves["observed"] = result.observed;
      curves["band_lo"] = result.band_lo;
      curves["band_hi"] = result.band_hi;
      curves["replicates"] = result.envelope;
      write_json(ctx, "monitor_curves.json", curves);
    } else {
      std::ostringstream csv;
      csv << "y,observed,band_lo,band_hi";
      for (std::size_t r = 0; r < result.envelope.size(); ++r) csv << ",rep_" << (r + 1);
      csv << "\n";
      for (std::size_t k = 0; k < result.grid.size(); ++k) {
        csv << exact(result.grid[k]) << ',' << exact(result.observed[k]) << ','
            << exact(result.band_lo[k]) << ',' << exact(result.band_hi[k]);
        for (const auto& curve : result.envelope) csv << ',' << exact(curve[k]);
        csv << '\n';
      }
      write_text(ctx, "monitor.csv", csv.str());
    }
    write_json(ctx, "monitor.json", j);
  } else if (c.format == "json") {
    o << j.dump(2) << "\n";
  }
  return kOk;
}

// ---- trend -----------------------------------------------------------------

int cmd_trend(Context& ctx) {
  const auto sample = load_sample(ctx);
  const auto groups = group_by_season(sample);
  if (groups.size() < 2) {
    throw UsageError("trend needs races from at least two seasons; found " +
                     std::to_string(groups.size()));
  }
  const auto trend = fit_trend(groups);
  if (!trend.converged) {
    if (ctx.cfg.strict) throw ComputationError("trend fit did not converge");
    ctx.err << "warning: trend fit did not converge\n";
  }
  auto& o = ctx.out;
  o << "seasons: " << groups.size() << ", races: " << sample.size() << "\n";
  for (std::size_t j = 0; j < groups.size(); ++j) {
    o << "  " << trend.seasons[j] << "-" << (trend.seasons[j] + 1) << ": " << trend.counts[j] << "\n";
  }
  o << "a = " << fixed(trend.a, 4) << ", sigma0 = " << fixed(trend.sigma0, 4)
    << ", trend = " << fixed(trend.trend_gamma, 5) << " per year";
  if (trend.se_trend) o << " (se " << fixed(*trend.se_trend, 5) << ", z = " << fixed(*trend.wald_z, 2) << ")";
  o << "\n";

  json j;
  j["command"] = "trend";
  j["config"] = config_json(ctx);
  json seasons = json::array();
  for (std::size_t k = 0; k < groups.size(); ++k) {
    seasons.push_back({{"season", trend.seasons[k]}, {"count", trend.counts[k]}, {"x", trend.x_values[k]}});
  }
  j["seasons"] = seasons;
  j["a"] = trend.a;
  j["sigma0"] = trend.sigma0;
  j["trend_gamma"] = trend.trend_gamma;
  j["se_trend"] = optional_number(trend.se_trend);
  j["wald_z"] = optional_number(trend.wald_z);
  j["loglik"] = trend.loglik;
  j["converged"] = trend.converged;
  if (!ctx.cfg.out_dir.empty()) write_json(ctx, "trend.json", j);
  else if (ctx.cfg.format == "json") o << j.dump(2) << "\n";
  return kOk;
}

// ---- records ---------------------------------------------------------------

int cmd_records(Context& ctx) {
  const auto& c = ctx.cfg;
  if (c.records_n == 0) throw UsageError("--n must be at least 1");
  const auto stats = expected_records(c.records_n);
  auto& o = ctx.out;
  o << "n = " << c.records_n << ": expected records H_n = " << fixed(stats.mean, 6)
    << ", variance = " << fixed(stats.variance, 6) << "\n";

  json j;
  j["command"] = "records";
  j["config"] = config_json(ctx);
  j["n"] = c.records_n;
  j["mean"] = stats.mean;
  j["variance"] = stats.variance;
  if (c.replicates > 0) {
    const auto sim = simulate_record_counts(c.records_n, c.replicates, ctx.seed);
    const double se = sim.standard_error();
    o << "simulated over " << c.replicates << " sequences: mean " << fixed(sim.mean, 4) << " (se "
      << fixed(se, 4) << "), variance " << fixed(sim.variance, 4) << "\n";
    json freq = json::object();
    for (const auto& [count, times] : sim.frequency) freq[std::to_string(count)] = times;
    j["simulation"] = {{"replicates", sim.replicates},
                       {"seed", ctx.seed},
                       {"mean", sim.mean},
                       {"variance", sim.variance},
                       {"standard_error", se},
                       {"skewness", sim.skewness},
                       {"z_mean", se > 0.0 ? json((sim.mean - stats.mean) / se) : json(nullptr)},
                       {"frequency", freq}};
  } else {
    j["simulation"] = nullptr;
  }
  if (!c.out_dir.empty()) write_json(ctx, "records.json", j);
  else if (c.format == "json") o << j.dump(2) << "\n";
  return kOk;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--input", cfg.input, "CSV of race results (skater,nation,venue,date,time)");
  sub->add_option("--threshold", cfg.threshold, "Threshold race time, M:SS.ss")->capture_default_str();
  sub->add_option("--lambda", cfg.lambda, "Expected number of sub-threshold races in the horizon")
      ->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Random seed (falls back to $RECORD_EDGE_SEED)");
  sub->add_option("--sim", cfg.sim, "Simulated replicates")->capture_default_str();
  sub->add_option("--out-dir", cfg.out_dir, "Directory for output files");
  sub->add_option("--format", cfg.format, "Curve file format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--params", cfg.params, "Pinned model 'a,sigma' instead of fitting");
  sub->add_flag("--strict", cfg.strict, "Abort on bad rows and on non-convergence");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Record-breaking probabilities from sub-threshold race results", "record-edge"};
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "Fit the model by maximum likelihood");
  auto* predict = app.add_subcommand("predict", "Probabilities of beating target times");
  auto* conf = app.add_subcommand("confcurve", "Profile-likelihood confidence curves");
  auto* monitor = app.add_subcommand("monitor", "Monitoring process with a simulated envelope");
  auto* trend = app.add_subcommand("trend", "Log-linear trend in scale across seasons");
  auto* records = app.add_subcommand("records", "Record counts in i.i.d. sequences");
  for (auto* sub : {fit, predict, conf, monitor, trend, records}) add_common(sub, cfg);

  predict->add_option("--target", cfg.targets, "Target race time(s), M:SS.ss");
  predict->add_option("--grid-step", cfg.grid_step, "Curve grid step in seconds")->capture_default_str();

  conf->add_option("--focus", cfg.focus, "prob or endpoint")
      ->check(CLI::IsMember({"prob", "endpoint"}))
      ->capture_default_str();
  conf->add_option("--target", cfg.targets, "Target race time for --focus prob");
  conf->add_option("--level", cfg.levels, "Confidence level(s)")->capture_default_str();
  conf->add_option("--grid-min", cfg.grid_min, "Smallest focus value on the grid");
  conf->add_option("--grid-max", cfg.grid_max, "Largest focus value on the grid");
  conf->add_option("--grid-points", cfg.grid_points, "Number of grid points");

  monitor->add_option("--grid-max", cfg.monitor_max, "Largest margin on the grid")->capture_default_str();
  monitor->add_option("--grid-points", cfg.monitor_points, "Grid points")->capture_default_str();
  monitor->add_flag("--no-refit", cfg.no_refit, "Use the observed fit for every simulated curve");

  records->add_option("--n", cfg.records_n, "Trials per sequence")->capture_default_str();
  records->add_option("--replicates", cfg.replicates, "Simulated sequences (0 skips)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    Context ctx{cfg, kDefaultSeed, kDefaultThreshold, out, err};
    ctx.seed = resolve_seed(cfg);
    try {
      ctx.threshold = parse_race_time(cfg.threshold);
    } catch (const ParseError& e) {
      throw UsageError(std::string("--threshold: ") + e.what());
    }
    if (!(cfg.lambda > 0.0)) throw UsageError("--lambda must be positive");

    if (cfg.command == "fit") return cmd_fit(ctx);
    if (cfg.command == "predict") return cmd_predict(ctx);
    if (cfg.command == "confcurve") return cmd_confcurve(ctx);
    if (cfg.command == "monitor") return cmd_monitor(ctx);
    if (cfg.command == "trend") return cmd_trend(ctx);
    return cmd_records(ctx);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << "\n";
    return kComputationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kComputationFailure;
  }
}

}  // namespace record_edge::cli
