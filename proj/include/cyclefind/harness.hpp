#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "search.hpp"
#include "time_series.hpp"
#include "version.hpp"

namespace cyclefind {

/// Tolerance rule for counting an estimate as accurate. The derivation
/// fields, when present, tie the tolerance to the maximum phase offset
/// accumulated over the observation span: tolerance = offset * p0^2 / span.
struct AccuracySpec {
  double true_period = 1.0;
  double tolerance = 0.01;
  std::optional<double> duration;          // observation span
  std::optional<double> max_phase_offset;  // allowed drift, cycles
};

inline AccuracySpec accuracy_from_phase_offset(double true_period,
                                               double duration,
                                               double max_phase_offset) {
  if (!(true_period > 0.0))
    throw invalid_argument("accuracy: true period must be positive");
  if (!(duration > 0.0))
    throw invalid_argument("accuracy: duration must be positive");
  if (!(max_phase_offset > 0.0))
    throw invalid_argument("accuracy: max phase offset must be positive");
  AccuracySpec spec;
  spec.true_period = true_period;
  spec.tolerance = max_phase_offset * true_period * true_period / duration;
  spec.duration = duration;
  spec.max_phase_offset = max_phase_offset;
  return spec;
}

/// Monte-Carlo comparison protocol: either subsampling proportions (missing
/// -data study) or added-noise sd multiples of baseline_sd (noise study).
struct StudyConfig {
  std::vector<double> proportions;
  std::vector<double> noise_multiples;
  int replicates = 100;
  std::vector<method_id> methods;
  PeriodGrid grid = PeriodGrid(0.5, 2.0, 0.005);
  MethodConfig method_cfg{};
  std::uint64_t master_seed = 0;
  double baseline_sd = 0.0;
  double subsample_proportion = 0.6;  // noise study's fixed sampling rate
  AccuracySpec accuracy{};
};

/// One (method, condition) cell backed by exactly R replicate estimates.
struct BenchCell {
  std::string method;
  std::string condition;
  double condition_value = 0.0;           // proportion or sd multiple
  double total_variance_multiple = 1.0;   // 1 + m^2 in the noise study
  double mse = 0.0;
  double accuracy_rate = 0.0;
  std::vector<double> estimates;
};

struct BenchReport {
  int schema_version = report_schema_version;
  std::string software_version = version;
  std::string study;  // "missing-data" | "noise"
  std::vector<std::string> methods;
  int replicates = 0;
  std::uint64_t master_seed = 0;
  double grid_min = 0.0, grid_max = 0.0, grid_step = 0.0;
  double baseline_sd = 0.0;
  double subsample_proportion = 0.0;
  double true_period = 0.0;
  double tolerance = 0.0;
  std::vector<BenchCell> cells;
};

/// Mean squared error of the estimates against the true period.
inline double mse(const std::vector<double>& estimates, double true_period) {
  if (estimates.empty()) throw invalid_argument("mse: empty estimate list");
  double s = 0.0;
  for (double e : estimates) {
    const double d = e - true_period;
    s += d * d;
  }
  return s / static_cast<double>(estimates.size());
}

/// Fraction of estimates within the tolerance; the boundary counts.
inline double accuracy_rate(const std::vector<double>& estimates,
                            const AccuracySpec& spec) {
  if (estimates.empty())
    throw invalid_argument("accuracy rate: empty estimate list");
  std::size_t hits = 0;
  // The bound is inclusive; the slack absorbs grid-arithmetic round-off so
  // an estimate sitting exactly on the boundary cannot miss by one ulp.
  for (double e : estimates)
    if (std::abs(e - spec.true_period) <= spec.tolerance + 1e-12) ++hits;
  return static_cast<double>(hits) / static_cast<double>(estimates.size());
}

/// Monthly-sampled sinusoid standing in for a strong annual cycle when no
/// real fixture is on disk: N points at t = n/12, amplitude * sin(2 pi t),
/// true period 1. noise_sd 0 gives the clean base series.
inline TimeSeries synthetic_annual_series(std::size_t n, double amplitude,
                                          double noise_sd, std::uint64_t seed) {
  if (n < 2) throw invalid_argument("synthetic series: need n >= 2");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) / 12.0;
  SyntheticModel model;
  model.signal = [amplitude](double x) {
    return amplitude * std::sin(two_pi * x);
  };
  model.true_period = 1.0;
  model.noise_sd = noise_sd;
  return generate(model, t, seed);
}

namespace detail {

inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline void validate_common(const TimeSeries& base, const StudyConfig& cfg) {
  if (cfg.replicates < 1)
    throw invalid_argument("study: need at least 1 replicate");
  if (cfg.methods.empty())
    throw invalid_argument("study: no methods configured");
  if (!(cfg.accuracy.true_period > 0.0) || !(cfg.accuracy.tolerance > 0.0))
    throw invalid_argument("study: invalid accuracy spec");
  for (method_id m : cfg.methods)
    detail::validate_method_config(m, cfg.method_cfg, base.size());
}

/// Shared driver: per work unit (condition x replicate) builds the
/// replicate series with seeds derived from (stream, condition, replicate)
/// and runs every configured method on it. Worker count cannot change any
/// estimate because seeds derive from indices alone.
template <class MakeReplicate>
BenchReport run_study(const StudyConfig& cfg,
                      const std::vector<double>& conditions,
                      const char* study_name, MakeReplicate&& make_replicate,
                      int workers) {
  const std::size_t n_cond = conditions.size();
  const auto reps = static_cast<std::size_t>(cfg.replicates);
  const std::size_t n_methods = cfg.methods.size();

  std::vector<double> results(n_cond * reps * n_methods);
  parallel_for(n_cond * reps, workers, [&](std::size_t unit) {
    const std::size_t ci = unit / reps;
    const std::size_t r = unit % reps;
    const TimeSeries replicate = make_replicate(ci, r);
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      const ObjectiveCurve curve =
          scan(replicate, cfg.grid, cfg.methods[mi], cfg.method_cfg, 1);
      results[(ci * reps + r) * n_methods + mi] =
          select_estimate(curve).period;
    }
  });

  BenchReport report;
  report.study = study_name;
  for (method_id m : cfg.methods) report.methods.emplace_back(method_name(m));
  report.replicates = cfg.replicates;
  report.master_seed = cfg.master_seed;
  report.grid_min = cfg.grid.p_min();
  report.grid_max = cfg.grid.p_max();
  report.grid_step = cfg.grid.step();
  report.baseline_sd = cfg.baseline_sd;
  report.subsample_proportion = cfg.subsample_proportion;
  report.true_period = cfg.accuracy.true_period;
  report.tolerance = cfg.accuracy.tolerance;

  const bool noise_study = std::string(study_name) == "noise";
  for (std::size_t ci = 0; ci < n_cond; ++ci) {
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      BenchCell cell;
      cell.method = method_name(cfg.methods[mi]);
      cell.condition_value = conditions[ci];
      if (noise_study) {
        const double m = conditions[ci];
        cell.total_variance_multiple = 1.0 + m * m;
        cell.condition = "added " + format_value(m) + " sigma (total " +
                         format_value(cell.total_variance_multiple) +
                         " sigma^2)";
      } else {
        cell.total_variance_multiple = 1.0;
        cell.condition = "proportion " + format_value(conditions[ci]);
      }
      cell.estimates.resize(reps);
      for (std::size_t r = 0; r < reps; ++r)
        cell.estimates[r] = results[(ci * reps + r) * n_methods + mi];
      cell.mse = mse(cell.estimates, cfg.accuracy.true_period);
      cell.accuracy_rate = accuracy_rate(cell.estimates, cfg.accuracy);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace detail

/// For each proportion and replicate: subsample the base series with a
/// derived seed and estimate with every configured method.
inline BenchReport run_missing_data_study(const TimeSeries& base,
                                          const StudyConfig& cfg,
                                          int workers = 1) {
  detail::validate_common(base, cfg);
  if (cfg.proportions.empty())
    throw invalid_argument("missing-data study: no proportions configured");
  for (double p : cfg.proportions)
    if (!(p > 0.0) || p > 1.0)
      throw invalid_argument("missing-data study: proportions must be in (0,1]");
  return detail::run_study(
      cfg, cfg.proportions, "missing-data",
      [&](std::size_t ci, std::size_t r) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, {1, ci, r});
        return subsample(base, SamplingSpec{cfg.proportions[ci], seed});
      },
      workers);
}

/// For each sd multiple m and replicate: subsample at the fixed rate, add
/// Gaussian noise with sd = m * baseline_sd, estimate with every method.
/// Report rows carry both the sd multiple and the total-variance multiple
/// 1 + m^2 (the published tables are labeled by the latter).
inline BenchReport run_noise_study(const TimeSeries& base,
                                   const StudyConfig& cfg, int workers = 1) {
  detail::validate_common(base, cfg);
  if (cfg.noise_multiples.empty())
    throw invalid_argument("noise study: no noise multiples configured");
  for (double m : cfg.noise_multiples)
    if (!(m >= 0.0))
      throw invalid_argument("noise study: multiples must be >= 0");
  if (!(cfg.baseline_sd >= 0.0))
    throw invalid_argument("noise study: baseline sd must be >= 0");
  if (!(cfg.subsample_proportion > 0.0) || cfg.subsample_proportion > 1.0)
    throw invalid_argument("noise study: subsample proportion must be in (0,1]");
  return detail::run_study(
      cfg, cfg.noise_multiples, "noise",
      [&](std::size_t ci, std::size_t r) {
        const std::uint64_t sub_seed =
            derive_seed(cfg.master_seed, {2, ci, r, 0});
        const std::uint64_t noise_seed =
            derive_seed(cfg.master_seed, {2, ci, r, 1});
        const TimeSeries sub =
            subsample(base, SamplingSpec{cfg.subsample_proportion, sub_seed});
        return add_noise(sub, cfg.noise_multiples[ci] * cfg.baseline_sd,
                         noise_seed);
      },
      workers);
}

}  // namespace cyclefind
