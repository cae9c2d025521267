#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "time_series.hpp"

namespace cyclefind {

/// Closing the phase-sorted loop: periodic continuation measures the last
/// gap as (rho_1 + 1 - rho_N), the true arc on the circle; literal keeps
/// the raw difference (rho_1 - rho_N) as some texts write it.
enum class wrap_mode { periodic, literal };

struct RensonConfig {
  double b = 0.0;  // <= 0 requests the default 1/N
};

struct PdmConfig {
  int num_bins = 10;
  int min_bin_count = 2;
};

/// Per-bin occupancy and spread for one folding, plus the pooled and
/// overall variances the PDM ratio is built from. Bins with fewer than
/// min_bin_count points contribute neither numerator nor denominator.
struct PdmBins {
  std::vector<std::size_t> bin_counts;
  std::vector<double> bin_variances;  // sample variance, 0 when count < 2
  double pooled = 0.0;
  double total_variance = 0.0;
};

namespace detail {

inline void require_sorted(const PhasedSeries& ps, const char* op) {
  if (!ps.sorted())
    throw invalid_argument(std::string(op) + ": phased data must be sorted");
  if (ps.size() < 2)
    throw invalid_argument(std::string(op) + ": need at least 2 observations");
}

inline double closing_phase_gap(const PhasedSeries& ps, wrap_mode wrap) {
  const double first = ps.phases().front(), last = ps.phases().back();
  return wrap == wrap_mode::periodic ? first + 1.0 - last : first - last;
}

}  // namespace detail

/// Total squared segment length joining phase-sorted points, value and
/// phase differences both counted; the loop closes through the wrap gap.
inline double string_length_sl(const PhasedSeries& ps,
                               wrap_mode wrap = wrap_mode::periodic) {
  detail::require_sorted(ps, "string length");
  const auto& r = ps.phases();
  const auto& y = ps.values();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
    const double dy = y[i + 1] - y[i], dr = r[i + 1] - r[i];
    total += dy * dy + dr * dr;
  }
  const double dy = y.front() - y.back();
  const double dr = detail::closing_phase_gap(ps, wrap);
  return total + dy * dy + dr * dr;
}

/// Sum of squared successive value differences around the phase loop.
inline double string_length_lk(const PhasedSeries& ps) {
  detail::require_sorted(ps, "string length");
  const auto& y = ps.values();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
    const double dy = y[i + 1] - y[i];
    total += dy * dy;
  }
  const double dy = y.front() - y.back();
  return total + dy * dy;
}

/// Squared value differences damped by squared phase gaps plus b^2; the
/// constant keeps near-coincident phases from dominating.
inline double string_length_ren(const PhasedSeries& ps, const RensonConfig& cfg,
                                wrap_mode wrap = wrap_mode::periodic) {
  detail::require_sorted(ps, "string length");
  const double b = cfg.b > 0.0 ? cfg.b : 1.0 / static_cast<double>(ps.size());
  const auto& r = ps.phases();
  const auto& y = ps.values();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
    const double dy = y[i + 1] - y[i], dr = r[i + 1] - r[i];
    total += dy * dy / (dr * dr + b * b);
  }
  const double dy = y.front() - y.back();
  const double dr = detail::closing_phase_gap(ps, wrap);
  return total + dy * dy / (dr * dr + b * b);
}

/// s^2 = sum (n_m - 1) s_m^2 / (sum n_m - M_eff) over bins meeting the
/// occupancy floor; M_eff counts contributing bins only.
inline double pooled_variance(const std::vector<std::size_t>& counts,
                              const std::vector<double>& variances,
                              std::size_t min_bin_count = 2) {
  if (counts.size() != variances.size())
    throw invalid_argument("pooled variance: counts/variances mismatch");
  double num = 0.0;
  std::size_t total = 0, contributing = 0;
  for (std::size_t m = 0; m < counts.size(); ++m) {
    if (counts[m] < min_bin_count || counts[m] < 2) continue;
    num += static_cast<double>(counts[m] - 1) * variances[m];
    total += counts[m];
    ++contributing;
  }
  if (contributing == 0)
    throw insufficient_data("pooled variance: no bin meets the occupancy floor");
  return num / static_cast<double>(total - contributing);
}

/// Bins phases into floor(rho * M) equal-width bins and computes the pooled
/// within-bin variance against the overall variance (both N-1 based).
inline PdmBins make_pdm_bins(const PhasedSeries& ps, const PdmConfig& cfg) {
  if (cfg.num_bins < 2)
    throw invalid_argument("pdm: need at least 2 bins");
  if (cfg.min_bin_count < 2)
    throw invalid_argument("pdm: min bin count must be >= 2");
  const std::size_t n = ps.size();
  if (n < 2) throw invalid_argument("pdm: need at least 2 observations");
  const auto m_bins = static_cast<std::size_t>(cfg.num_bins);

  double mean = 0.0;
  for (double y : ps.values()) mean += y;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double y : ps.values()) ss += (y - mean) * (y - mean);
  const double total_variance = ss / static_cast<double>(n - 1);

  std::vector<std::size_t> counts(m_bins, 0);
  std::vector<double> sums(m_bins, 0.0), sqsums(m_bins, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto bin = static_cast<std::size_t>(ps.phases()[i] * static_cast<double>(m_bins));
    if (bin >= m_bins) bin = 0;  // phase 1.0 wraps; phases are in [0,1)
    counts[bin] += 1;
    sums[bin] += ps.values()[i];
    sqsums[bin] += ps.values()[i] * ps.values()[i];
  }
  std::vector<double> variances(m_bins, 0.0);
  for (std::size_t m = 0; m < m_bins; ++m) {
    if (counts[m] < 2) continue;
    const double c = static_cast<double>(counts[m]);
    const double v = (sqsums[m] - sums[m] * sums[m] / c) / (c - 1.0);
    variances[m] = v < 0.0 ? 0.0 : v;
  }
  PdmBins bins{std::move(counts), std::move(variances), 0.0, total_variance};
  bins.pooled = pooled_variance(bins.bin_counts, bins.bin_variances,
                                static_cast<std::size_t>(cfg.min_bin_count));
  return bins;
}

/// Pooled-to-overall variance ratio: near 1 for a wrong period, small at
/// the true one. Constant series have no defined ratio.
inline double pdm(const PhasedSeries& ps, const PdmConfig& cfg = {}) {
  if (ps.size() < 2) throw invalid_argument("pdm: need at least 2 observations");
  double mean = 0.0, scale = 0.0;
  for (double y : ps.values()) {
    mean += y;
    scale = std::max(scale, std::abs(y));
  }
  mean /= static_cast<double>(ps.size());
  double ss = 0.0;
  for (double y : ps.values()) ss += (y - mean) * (y - mean);
  // Relative gate: a constant series can show ss of order N * (eps*y)^2
  // from the mean round-off alone; that is degeneracy, not variance.
  const double eps = std::numeric_limits<double>::epsilon();
  if (!(ss > 64.0 * static_cast<double>(ps.size()) * eps * eps * scale * scale))
    throw degenerate_input("pdm: overall variance is zero");
  const PdmBins bins = make_pdm_bins(ps, cfg);
  return bins.pooled / bins.total_variance;
}

}  // namespace cyclefind
