#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace cyclefind {

/// Ordered, possibly unevenly spaced observations (t_n, Y_n).
/// Invariants: times and values have equal length N >= 2, times are
/// non-decreasing, every entry is finite. Immutable after construction.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> times, std::vector<double> values,
             std::string label = "")
      : times_(std::move(times)),
        values_(std::move(values)),
        label_(std::move(label)) {
    if (times_.size() != values_.size())
      throw invalid_argument("time series: times/values length mismatch");
    if (times_.size() < 2)
      throw invalid_argument("time series: need at least 2 observations");
    for (std::size_t i = 0; i < times_.size(); ++i) {
      if (!std::isfinite(times_[i]) || !std::isfinite(values_[i]))
        throw invalid_argument("time series: non-finite entry at index " +
                               std::to_string(i));
      if (i > 0 && times_[i] < times_[i - 1])
        throw invalid_argument("time series: times must be non-decreasing");
    }
  }

  std::size_t size() const noexcept { return times_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::string& label() const noexcept { return label_; }
  double duration() const noexcept { return times_.back() - times_.front(); }

 private:
  std::vector<double> times_, values_;
  std::string label_;
};

/// Observations mapped to phase space [0,1) for one trial period.
/// When sorted, phases are non-decreasing with ties left in original time
/// order (stable sort).
class PhasedSeries {
 public:
  PhasedSeries(std::vector<double> phases, std::vector<double> values,
               bool sorted, double source_period)
      : phases_(std::move(phases)),
        values_(std::move(values)),
        sorted_(sorted),
        source_period_(source_period) {
    if (phases_.size() != values_.size())
      throw invalid_argument("phased series: phases/values length mismatch");
    if (!(source_period_ > 0.0))
      throw invalid_argument("phased series: source period must be positive");
    for (std::size_t i = 0; i < phases_.size(); ++i) {
      if (!(phases_[i] >= 0.0 && phases_[i] < 1.0))
        throw invalid_argument("phased series: phase outside [0,1) at index " +
                               std::to_string(i));
      if (sorted_ && i > 0 && phases_[i] < phases_[i - 1])
        throw invalid_argument("phased series: marked sorted but is not");
    }
  }

  std::size_t size() const noexcept { return phases_.size(); }
  const std::vector<double>& phases() const noexcept { return phases_; }
  const std::vector<double>& values() const noexcept { return values_; }
  bool sorted() const noexcept { return sorted_; }
  double source_period() const noexcept { return source_period_; }

 private:
  std::vector<double> phases_, values_;
  bool sorted_;
  double source_period_;
};

/// Periodic signal plus Gaussian noise level; realizes a synthetic series.
struct SyntheticModel {
  std::function<double(double)> signal;
  double true_period = 1.0;
  double noise_sd = 0.0;
};

/// Random subsample request: keep round(N * proportion) points.
struct SamplingSpec {
  double proportion = 1.0;
  std::uint64_t seed = 0;
};

/// Maps time t to phase (t/p) mod 1 in [0,1); exact 1.0 wraps to 0.0 so
/// downstream bin assignment stays unambiguous.
inline double fold_phase(double t, double p) {
  if (!(p > 0.0)) throw invalid_argument("fold: period must be positive");
  if (!std::isfinite(t)) throw invalid_argument("fold: time must be finite");
  double r = std::fmod(t / p, 1.0);
  if (r < 0.0) r += 1.0;
  if (r >= 1.0) r = 0.0;
  return r;
}

/// Folds a series at period p and sorts by phase (stable on ties).
inline PhasedSeries fold_series(const TimeSeries& s, double p) {
  const std::size_t n = s.size();
  std::vector<double> ph(n);
  for (std::size_t i = 0; i < n; ++i) ph[i] = fold_phase(s.times()[i], p);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&ph](std::size_t a, std::size_t b) { return ph[a] < ph[b]; });
  std::vector<double> sp(n), sv(n);
  for (std::size_t i = 0; i < n; ++i) {
    sp[i] = ph[order[i]];
    sv[i] = s.values()[order[i]];
  }
  return PhasedSeries(std::move(sp), std::move(sv), true, p);
}

/// Keeps floor(N * proportion + 0.5) observations chosen uniformly without
/// replacement; output preserves time order. Deterministic given the seed.
inline TimeSeries subsample(const TimeSeries& s, const SamplingSpec& spec) {
  if (!(spec.proportion > 0.0) || spec.proportion > 1.0)
    throw invalid_argument("subsample: proportion must be in (0,1]");
  const std::size_t n = s.size();
  const auto k = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * spec.proportion + 0.5));
  if (k < 2) throw invalid_argument("subsample: fewer than 2 points selected");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng g(spec.seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(g.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<double> t(k), v(k);
  for (std::size_t i = 0; i < k; ++i) {
    t[i] = s.times()[idx[i]];
    v[i] = s.values()[idx[i]];
  }
  return TimeSeries(std::move(t), std::move(v), s.label());
}

/// Adds i.i.d. zero-mean Gaussian perturbations with standard deviation sd
/// to the values; times unchanged. Deterministic given the seed.
inline TimeSeries add_noise(const TimeSeries& s, double sd, std::uint64_t seed) {
  if (!(sd >= 0.0)) throw invalid_argument("add_noise: sd must be >= 0");
  std::vector<double> v = s.values();
  if (sd > 0.0) {
    rng g(seed);
    for (double& y : v) y += g.normal(0.0, sd);
  }
  return TimeSeries(s.times(), std::move(v), s.label());
}

/// Evaluates signal(t) + Gaussian(0, noise_sd) on the given sorted times.
inline TimeSeries generate(const SyntheticModel& model,
                           const std::vector<double>& times,
                           std::uint64_t seed) {
  if (!model.signal) throw invalid_argument("generate: missing signal");
  if (!(model.true_period > 0.0))
    throw invalid_argument("generate: true period must be positive");
  if (!(model.noise_sd >= 0.0))
    throw invalid_argument("generate: noise sd must be >= 0");
  if (times.empty()) throw invalid_argument("generate: empty time grid");
  if (!std::is_sorted(times.begin(), times.end()))
    throw invalid_argument("generate: times must be sorted");
  std::vector<double> v(times.size());
  rng g(seed);
  for (std::size_t i = 0; i < times.size(); ++i) {
    v[i] = model.signal(times[i]);
    if (model.noise_sd > 0.0) v[i] += g.normal(0.0, model.noise_sd);
  }
  return TimeSeries(times, std::move(v));
}

}  // namespace cyclefind
