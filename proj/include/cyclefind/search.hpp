#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dispersion.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "smoothing.hpp"
#include "spectral.hpp"
#include "time_series.hpp"

namespace cyclefind {

enum class method_id {
  classical,
  lomb_scargle,
  sl,
  lk,
  ren,
  pdm,
  spline_sse,
  local_sse,
  supersmoother_sar,
};

inline constexpr std::array<method_id, 9> all_methods = {
    method_id::classical,  method_id::lomb_scargle,
    method_id::sl,         method_id::lk,
    method_id::ren,        method_id::pdm,
    method_id::spline_sse, method_id::local_sse,
    method_id::supersmoother_sar,
};

inline const char* method_name(method_id m) {
  switch (m) {
    case method_id::classical: return "classical";
    case method_id::lomb_scargle: return "lomb-scargle";
    case method_id::sl: return "sl";
    case method_id::lk: return "lk";
    case method_id::ren: return "ren";
    case method_id::pdm: return "pdm";
    case method_id::spline_sse: return "spline-sse";
    case method_id::local_sse: return "local-sse";
    case method_id::supersmoother_sar: return "supersmoother-sar";
  }
  return "?";
}

inline method_id method_from_name(const std::string& name) {
  for (method_id m : all_methods)
    if (name == method_name(m)) return m;
  throw invalid_argument("unknown method: " + name);
}

enum class opt_sense { minimize, maximize };

/// Periodogram peaks mark the period; every other statistic is a misfit.
inline opt_sense sense_of(method_id m) {
  return (m == method_id::classical || m == method_id::lomb_scargle)
             ? opt_sense::maximize
             : opt_sense::minimize;
}

/// Per-method knobs bundled so a scan carries one configuration object.
struct MethodConfig {
  bool center_lomb_scargle = true;
  wrap_mode wrap = wrap_mode::periodic;
  RensonConfig ren{};
  PdmConfig pdm{};
  SplineConfig spline{};
  LocalLinearConfig local{};
  std::array<double, 3> supersmoother_spans{0.05, 0.2, 0.5};
  // > 0 pins the residual scale; 0 derives it once per series so every
  // trial period is weighed on the same scale.
  double supersmoother_noise_scale = 0.0;
};

/// Inclusive arithmetic grid of trial periods.
class PeriodGrid {
 public:
  PeriodGrid(double p_min, double p_max, double step)
      : p_min_(p_min), p_max_(p_max), step_(step) {
    if (!(p_min > 0.0) || !std::isfinite(p_min))
      throw invalid_argument("period grid: p_min must be positive");
    if (!(p_max >= p_min) || !std::isfinite(p_max))
      throw invalid_argument("period grid: need p_min <= p_max");
    if (!(step > 0.0) || !std::isfinite(step))
      throw invalid_argument("period grid: step must be positive");
    const auto count = static_cast<std::size_t>(
        std::floor((p_max - p_min) / step + 1e-9)) + 1;
    periods_.resize(count);
    for (std::size_t i = 0; i < count; ++i)
      periods_[i] = p_min + static_cast<double>(i) * step;
  }

  double p_min() const noexcept { return p_min_; }
  double p_max() const noexcept { return p_max_; }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return periods_.size(); }
  const std::vector<double>& periods() const noexcept { return periods_; }

 private:
  double p_min_, p_max_, step_;
  std::vector<double> periods_;
};

inline PeriodGrid make_period_grid(double p_min, double p_max, double step) {
  return PeriodGrid(p_min, p_max, step);
}

/// One method's statistic over the trial periods. NaN entries mark trial
/// periods whose evaluation was undefined (degenerate fit or vanishing
/// denominator); they stay in the curve but are skipped by selection.
struct ObjectiveCurve {
  method_id method = method_id::lomb_scargle;
  std::vector<double> periods;
  std::vector<double> statistic;
  opt_sense sense = opt_sense::maximize;

  bool is_defined(std::size_t i) const { return !std::isnan(statistic[i]); }
};

struct PeriodEstimate {
  double period = 0.0;
  double statistic = 0.0;
  method_id method = method_id::lomb_scargle;
  std::optional<bool> significant;               // Lomb-Scargle only
  std::optional<std::pair<double, double>> ci;   // low <= period <= high
};

enum class bootstrap_mode { case_resampling };

struct BootstrapConfig {
  int replicates = 200;
  double alpha = 0.05;
  bootstrap_mode mode = bootstrap_mode::case_resampling;
  std::uint64_t seed = 0;
};

namespace detail {

/// Config errors must surface before any evaluation starts.
inline void validate_method_config(method_id m, const MethodConfig& cfg,
                                   std::size_t n) {
  switch (m) {
    case method_id::lomb_scargle:
      if (n < 3)
        throw insufficient_data("lomb-scargle: need at least 3 observations");
      break;
    case method_id::ren:
      if (cfg.ren.b < 0.0)
        throw invalid_argument("renson: b must be positive (or 0 for 1/N)");
      break;
    case method_id::pdm:
      if (cfg.pdm.num_bins < 2)
        throw invalid_argument("pdm: need at least 2 bins");
      if (cfg.pdm.min_bin_count < 2)
        throw invalid_argument("pdm: min bin count must be >= 2");
      break;
    case method_id::spline_sse:
      if (cfg.spline.num_knots < 4)
        throw invalid_argument("spline: need at least 4 knots");
      if (n < static_cast<std::size_t>(cfg.spline.num_knots) + 1)
        throw insufficient_data("spline: need at least K + 1 observations");
      break;
    case method_id::local_sse:
      if (!(cfg.local.span > 0.0) || cfg.local.span > 1.0)
        throw invalid_argument("local linear: span must be in (0,1]");
      if (std::floor(cfg.local.span * static_cast<double>(n) + 0.5) < 3.0)
        throw invalid_argument("local linear: span covers fewer than 3 points");
      break;
    case method_id::supersmoother_sar:
      if (n < 10)
        throw insufficient_data("supersmoother: need at least 10 observations");
      for (int k = 0; k < 3; ++k) {
        if (!(cfg.supersmoother_spans[k] > 0.0) || cfg.supersmoother_spans[k] > 1.0)
          throw invalid_argument("supersmoother: spans must be in (0,1]");
        if (k > 0 && !(cfg.supersmoother_spans[k] > cfg.supersmoother_spans[k - 1]))
          throw invalid_argument("supersmoother: spans must be strictly increasing");
      }
      if (cfg.supersmoother_noise_scale < 0.0)
        throw invalid_argument("supersmoother: noise scale must be >= 0");
      break;
    default:
      break;
  }
}

/// Period-independent inputs a scan prepares once and reuses at every
/// trial period.
struct ScanContext {
  std::vector<double> spectral_values;  // classical / lomb-scargle only
  double fixed_noise_scale = 0.0;       // supersmoother only
};

inline ScanContext make_scan_context(const TimeSeries& s, method_id method,
                                     const MethodConfig& cfg) {
  ScanContext ctx;
  if (method == method_id::classical)
    ctx.spectral_values = s.values();
  else if (method == method_id::lomb_scargle)
    ctx.spectral_values = centered_values(s, cfg.center_lomb_scargle);
  if (method == method_id::supersmoother_sar)
    ctx.fixed_noise_scale = cfg.supersmoother_noise_scale > 0.0
                                ? cfg.supersmoother_noise_scale
                                : diff_noise_scale(s);
  return ctx;
}

}  // namespace detail

/// One method evaluated at one trial period (periodograms at f = 1/p).
/// Degenerate or insufficient configurations throw; scan turns those into
/// NaN flags, the CLI turns them into exit codes.
inline double evaluate_statistic(const TimeSeries& s, double p,
                                 method_id method, const MethodConfig& cfg,
                                 const detail::ScanContext& ctx) {
  switch (method) {
    case method_id::classical:
      return classical_power_at(s.times(), ctx.spectral_values, 1.0 / p);
    case method_id::lomb_scargle: {
      const auto power = ls_power_at(s.times(), ctx.spectral_values, 1.0 / p);
      if (!power)
        throw degenerate_input("lomb-scargle: undefined at this frequency");
      return *power < 0.0 ? 0.0 : *power;
    }
    case method_id::sl:
      return string_length_sl(fold_series(s, p), cfg.wrap);
    case method_id::lk:
      return string_length_lk(fold_series(s, p));
    case method_id::ren:
      return string_length_ren(fold_series(s, p), cfg.ren, cfg.wrap);
    case method_id::pdm:
      return pdm(fold_series(s, p), cfg.pdm);
    case method_id::spline_sse:
      return sse_objective(s, p, fitter_kind::spline, cfg.spline);
    case method_id::local_sse:
      return sse_objective(s, p, fitter_kind::local_linear, cfg.spline,
                           cfg.local);
    case method_id::supersmoother_sar:
      return supersmoother_sar(fold_series(s, p), cfg.supersmoother_spans,
                               ctx.fixed_noise_scale)
          .sar;
  }
  throw invalid_argument("unknown method");
}

inline double evaluate_statistic(const TimeSeries& s, double p,
                                 method_id method,
                                 const MethodConfig& cfg = {}) {
  detail::validate_method_config(method, cfg, s.size());
  return evaluate_statistic(s, p, method, cfg,
                            detail::make_scan_context(s, method, cfg));
}

/// Evaluates one method's statistic at every trial period (periodograms at
/// f = 1/p). Curve length always equals grid length; undefined evaluations
/// are NaN-flagged, never dropped. Results are identical for any worker
/// count: each slot is computed independently and assembled in grid order.
inline ObjectiveCurve scan(const TimeSeries& s, const PeriodGrid& grid,
                           method_id method, const MethodConfig& cfg = {},
                           int workers = 1) {
  detail::validate_method_config(method, cfg, s.size());

  ObjectiveCurve curve;
  curve.method = method;
  curve.sense = sense_of(method);
  curve.periods = grid.periods();
  curve.statistic.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());

  const detail::ScanContext ctx = detail::make_scan_context(s, method, cfg);
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    try {
      curve.statistic[i] =
          evaluate_statistic(s, grid.periods()[i], method, cfg, ctx);
    } catch (const degenerate_input&) {
    } catch (const degenerate_fit&) {
    } catch (const insufficient_data&) {
      // Trial period stays NaN-flagged; config errors were caught up front
      // and anything else propagates.
    }
  });
  return curve;
}

/// Global optimum among defined entries; exact ties go to the smallest
/// period so the fundamental wins over its multiples.
inline PeriodEstimate select_estimate(const ObjectiveCurve& curve) {
  if (curve.periods.size() != curve.statistic.size())
    throw invalid_argument("select: malformed curve");
  std::size_t best = curve.periods.size();
  for (std::size_t i = 0; i < curve.periods.size(); ++i) {
    if (!curve.is_defined(i)) continue;
    if (best == curve.periods.size()) {
      best = i;
      continue;
    }
    const double a = curve.statistic[i], b = curve.statistic[best];
    const bool better = curve.sense == opt_sense::minimize ? a < b : a > b;
    if (better || (a == b && curve.periods[i] < curve.periods[best])) best = i;
  }
  if (best == curve.periods.size())
    throw insufficient_data("select: no defined statistic values");
  PeriodEstimate est;
  est.period = curve.periods[best];
  est.statistic = curve.statistic[best];
  est.method = curve.method;
  return est;
}

/// Marks a Lomb-Scargle estimate significant when its peak power exceeds
/// the white-noise threshold at the given level.
inline PeriodEstimate annotate_significance(const PeriodEstimate& est,
                                            const ObjectiveCurve& curve,
                                            double alpha,
                                            double noise_variance) {
  if (curve.method != method_id::lomb_scargle)
    throw invalid_argument("significance: only defined for lomb-scargle");
  PeriodEstimate out = est;
  out.significant =
      est.statistic > ls_significance_threshold(alpha, noise_variance);
  return out;
}

/// Case-resampling bootstrap: N observation pairs drawn with replacement,
/// re-sorted by time, re-estimated B times; the interval is the empirical
/// (alpha/2, 1-alpha/2) percentile range, widened if needed to contain the
/// point estimate. Deterministic given the seed for any worker count.
inline PeriodEstimate bootstrap_ci(const TimeSeries& s, const PeriodGrid& grid,
                                   method_id method, const MethodConfig& mcfg,
                                   const BootstrapConfig& bcfg,
                                   int workers = 1) {
  if (bcfg.replicates < 1)
    throw invalid_argument("bootstrap: need at least 1 replicate");
  if (!(bcfg.alpha > 0.0) || !(bcfg.alpha < 1.0))
    throw invalid_argument("bootstrap: alpha must be in (0,1)");
  if (s.size() < 10)
    throw invalid_argument("bootstrap: need at least 10 observations");

  PeriodEstimate point = select_estimate(scan(s, grid, method, mcfg, workers));

  const std::size_t n = s.size();
  const auto b_count = static_cast<std::size_t>(bcfg.replicates);
  std::vector<double> estimates(b_count);
  parallel_for(b_count, workers, [&](std::size_t r) {
    rng g(derive_seed(bcfg.seed, {r}));
    std::vector<double> t, v;
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 10)
        throw insufficient_data(
            "bootstrap: resample kept fewer than 3 distinct times");
      std::vector<std::size_t> pick(n);
      for (std::size_t i = 0; i < n; ++i)
        pick[i] = static_cast<std::size_t>(g.below(n));
      std::stable_sort(pick.begin(), pick.end(),
                       [&s](std::size_t a, std::size_t b) {
                         return s.times()[a] < s.times()[b];
                       });
      t.resize(n);
      v.resize(n);
      std::size_t distinct = 1;
      for (std::size_t i = 0; i < n; ++i) {
        t[i] = s.times()[pick[i]];
        v[i] = s.values()[pick[i]];
        if (i > 0 && t[i] != t[i - 1]) ++distinct;
      }
      if (distinct >= 3) break;
    }
    const TimeSeries resampled(std::move(t), std::move(v), s.label());
    estimates[r] = select_estimate(scan(resampled, grid, method, mcfg, 1)).period;
  });

  std::sort(estimates.begin(), estimates.end());
  const auto percentile = [&estimates](double q) {
    const double h = q * static_cast<double>(estimates.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, estimates.size() - 1);
    const double frac = h - std::floor(h);
    return estimates[lo] + frac * (estimates[hi] - estimates[lo]);
  };
  double lo = percentile(bcfg.alpha / 2.0);
  double hi = percentile(1.0 - bcfg.alpha / 2.0);
  lo = std::min(lo, point.period);
  hi = std::max(hi, point.period);
  point.ci = std::make_pair(lo, hi);
  return point;
}

}  // namespace cyclefind
