#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "time_series.hpp"

namespace cyclefind {

enum class knot_placement { equally_spaced };

struct SplineConfig {
  int num_knots = 4;  // >= 4; periodic cubic basis needs that many functions
  knot_placement placement = knot_placement::equally_spaced;
};

/// Least-squares fit in the periodic cubic B-spline basis.
struct PeriodicSplineFit {
  std::vector<double> coefficients;  // one per basis function
  std::vector<double> fitted;
  double sse = 0.0;
  int num_knots = 0;
};

enum class kernel { uniform, tricube };

struct LocalLinearConfig {
  double span = 0.3;  // fraction of points per band, in (0,1]
  kernel weight = kernel::uniform;
};

/// Per-point fitted lines: fitted[i] = intercept[i] + slope[i] * phases[i].
struct LocalLinearFit {
  std::vector<double> intercept;
  std::vector<double> slope;
  std::vector<double> fitted;
  double sse = 0.0;
};

struct SupersmootherFit {
  std::array<double, 3> spans{};      // strictly increasing
  std::vector<double> fitted;
  std::vector<double> sigma_hat;      // per-point residual scale, > 0
  double sar = 0.0;
};

enum class fitter_kind { spline, local_linear };

namespace detail {

/// Cardinal cubic B-spline on knots -2..2 and its first two derivatives.
inline double bspline3(double x, int deriv = 0) {
  const double a = std::abs(x);
  const double sign = x < 0.0 ? -1.0 : 1.0;
  if (a >= 2.0) return 0.0;
  switch (deriv) {
    case 0:
      if (a < 1.0) return 2.0 / 3.0 - a * a + a * a * a / 2.0;
      return (2.0 - a) * (2.0 - a) * (2.0 - a) / 6.0;
    case 1:
      if (a < 1.0) return sign * (-2.0 * a + 1.5 * a * a);
      return sign * (-(2.0 - a) * (2.0 - a) / 2.0);
    case 2:
      if (a < 1.0) return -2.0 + 3.0 * a;
      return 2.0 - a;
    default:
      throw invalid_argument("bspline: derivative order must be 0..2");
  }
}

/// Basis function j of the K-knot periodic basis at phase rho in [0,1];
/// wrapped images at rho +/- 1 make every function 1-periodic.
inline double periodic_bspline(int num_knots, int j, double rho, int deriv = 0) {
  const double k = static_cast<double>(num_knots);
  double v = 0.0;
  for (int m = -1; m <= 1; ++m)
    v += bspline3(k * (rho + m) - j, deriv);
  for (int d = 0; d < deriv; ++d) v *= k;
  return v;
}

/// In-place Cholesky solve of the symmetric system m x = b (row-major k*k).
/// Returns false when a pivot falls below tol (rank deficiency).
inline bool cholesky_solve(std::vector<double> m, std::vector<double>& b, int k,
                           double tol) {
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      double s = m[static_cast<std::size_t>(i) * k + j];
      for (int l = 0; l < i; ++l)
        s -= m[static_cast<std::size_t>(i) * k + l] *
             m[static_cast<std::size_t>(j) * k + l];
      if (i == j) {
        if (!(s > tol)) return false;
        m[static_cast<std::size_t>(i) * k + i] = std::sqrt(s);
      } else {
        m[static_cast<std::size_t>(j) * k + i] =
            s / m[static_cast<std::size_t>(i) * k + i];
      }
    }
  }
  for (int i = 0; i < k; ++i) {
    double s = b[i];
    for (int l = 0; l < i; ++l)
      s -= m[static_cast<std::size_t>(i) * k + l] * b[l];
    b[i] = s / m[static_cast<std::size_t>(i) * k + i];
  }
  for (int i = k - 1; i >= 0; --i) {
    double s = b[i];
    for (int l = i + 1; l < k; ++l)
      s -= m[static_cast<std::size_t>(l) * k + i] * b[l];
    b[i] = s / m[static_cast<std::size_t>(i) * k + i];
  }
  return true;
}

/// One local-linear smooth over sorted phases with circular wrap (data
/// replicated at phase +/- 1). Band per point: the span*N nearest phase
/// neighbors as a contiguous window. Writes fitted values and, when
/// leverage is non-null, the center point's hat-matrix diagonal.
/// fitted may alias y: the input is copied into the replicas up front.
inline void local_linear_smooth(const std::vector<double>& rho,
                                const std::vector<double>& y, double span,
                                kernel weight, std::size_t min_neighbors,
                                std::vector<double>& fitted,
                                std::vector<double>* leverage,
                                std::vector<double>* intercept = nullptr,
                                std::vector<double>* slope = nullptr) {
  const std::size_t n = rho.size();
  std::size_t band = static_cast<std::size_t>(
      std::floor(span * static_cast<double>(n) + 0.5));
  if (band < min_neighbors) band = min_neighbors;
  if (band < 3) throw degenerate_fit("local linear: fewer than 3 usable neighbors");
  if (band > n) band = n;

  // A full-circle band is the whole dataset; replication would re-base some
  // observations by +/- 1 for no gain, so the window stays unreplicated.
  const bool replicate = band < n;
  const std::size_t copies = replicate ? 3 : 1;
  const std::size_t offset = replicate ? n : 0;
  std::vector<double> xr(copies * n), yr(copies * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (replicate) {
      xr[i] = rho[i] - 1.0;
      xr[2 * n + i] = rho[i] + 1.0;
      yr[i] = yr[2 * n + i] = y[i];
    }
    xr[offset + i] = rho[i];
    yr[offset + i] = y[i];
  }

  fitted.resize(n);
  if (leverage) leverage->resize(n);
  if (intercept) intercept->resize(n);
  if (slope) slope->resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = offset + i;
    const double x0 = xr[c];
    std::size_t lo = c, hi = c;
    while (hi - lo + 1 < band) {
      const double dl = lo > 0 ? x0 - xr[lo - 1] : 1e300;
      const double dr = hi + 1 < copies * n ? xr[hi + 1] - x0 : 1e300;
      if (dl <= dr) --lo; else ++hi;
    }

    double wmax_d = 0.0;
    for (std::size_t j = lo; j <= hi; ++j)
      wmax_d = std::max(wmax_d, std::abs(xr[j] - x0));
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, wc = 1.0;
    for (std::size_t j = lo; j <= hi; ++j) {
      const double x = xr[j] - x0;
      double w = 1.0;
      if (weight == kernel::tricube && wmax_d > 0.0) {
        const double u = std::abs(x) / wmax_d;
        const double t = 1.0 - u * u * u;
        w = t * t * t;
        if (j == c) wc = w;
      }
      sw += w;
      sx += w * x;
      sy += w * yr[j];
      sxx += w * x * x;
      sxy += w * x * yr[j];
    }
    const double sxy_c = sxy - sx * sy / sw;
    const double sxx_c = sxx - sx * sx / sw;
    double a, b;  // line in centered coordinates: yhat = a + b (x - x0)
    double h;
    if (sxx_c <= 1e-12) {
      b = 0.0;
      a = sy / sw;
      h = wc / sw;
    } else {
      b = sxy_c / sxx_c;
      a = (sy - b * sx) / sw;
      const double xbar = sx / sw;
      h = wc * (1.0 / sw + xbar * xbar / sxx_c);
    }
    fitted[i] = a;
    if (leverage) (*leverage)[i] = h;
    if (intercept) (*intercept)[i] = a - b * x0;
    if (slope) (*slope)[i] = b;
  }
}

inline double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (n % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

}  // namespace detail

/// Least-squares periodic cubic spline on K equally spaced knots over [0,1).
/// Normal equations solved by Cholesky; on rank deficiency a tiny ridge
/// (1e-10 times the trace) is added before giving up.
inline PeriodicSplineFit fit_periodic_spline(const PhasedSeries& ps,
                                             const SplineConfig& cfg = {}) {
  if (cfg.num_knots < 4)
    throw invalid_argument("spline: need at least 4 knots");
  const int k = cfg.num_knots;
  const std::size_t n = ps.size();
  if (n < static_cast<std::size_t>(k) + 1)
    throw insufficient_data("spline: need at least K + 1 observations");

  std::vector<double> design(n * static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j)
      design[i * k + j] = detail::periodic_bspline(k, j, ps.phases()[i]);

  std::vector<double> normal(static_cast<std::size_t>(k) * k, 0.0);
  std::vector<double> rhs(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < k; ++a) {
      const double da = design[i * k + a];
      if (da == 0.0) continue;
      rhs[a] += da * ps.values()[i];
      for (int b = a; b < k; ++b)
        normal[static_cast<std::size_t>(a) * k + b] += da * design[i * k + b];
    }
  }
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < a; ++b)
      normal[static_cast<std::size_t>(a) * k + b] =
          normal[static_cast<std::size_t>(b) * k + a];

  double trace = 0.0;
  for (int a = 0; a < k; ++a) trace += normal[static_cast<std::size_t>(a) * k + a];
  const double tol = 1e-13 * std::max(trace, 1e-30);

  std::vector<double> coef = rhs;
  if (!detail::cholesky_solve(normal, coef, k, tol)) {
    const double ridge = 1e-10 * trace;
    for (int a = 0; a < k; ++a) normal[static_cast<std::size_t>(a) * k + a] += ridge;
    coef = rhs;
    if (!detail::cholesky_solve(normal, coef, k, tol))
      throw degenerate_fit("spline: normal equations rank-deficient");
  }

  PeriodicSplineFit fit;
  fit.coefficients = std::move(coef);
  fit.num_knots = k;
  fit.fitted.resize(n);
  fit.sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (int j = 0; j < k; ++j) v += fit.coefficients[j] * design[i * k + j];
    fit.fitted[i] = v;
    const double r = ps.values()[i] - v;
    fit.sse += r * r;
  }
  return fit;
}

/// Evaluates the fitted spline (or its 1st/2nd derivative) at phase rho
/// in [0,1]; endpoints agree by construction of the periodic basis.
inline double spline_eval(const PeriodicSplineFit& fit, double rho,
                          int deriv = 0) {
  double v = 0.0;
  for (int j = 0; j < fit.num_knots; ++j)
    v += fit.coefficients[j] * detail::periodic_bspline(fit.num_knots, j, rho, deriv);
  return v;
}

/// Weighted least-squares line per point over its nearest phase neighbors,
/// with circular wrap. Requires sorted phased data.
inline LocalLinearFit fit_local_linear(const PhasedSeries& ps,
                                       const LocalLinearConfig& cfg = {}) {
  if (!ps.sorted())
    throw invalid_argument("local linear: phased data must be sorted");
  if (!(cfg.span > 0.0) || cfg.span > 1.0)
    throw invalid_argument("local linear: span must be in (0,1]");
  LocalLinearFit fit;
  detail::local_linear_smooth(ps.phases(), ps.values(), cfg.span, cfg.weight,
                              0, fit.fitted, nullptr, &fit.intercept,
                              &fit.slope);
  fit.sse = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double r = ps.values()[i] - fit.fitted[i];
    fit.sse += r * r;
  }
  return fit;
}

/// Robust scale of the series noise from successive time-sorted value
/// differences (MAD * 1.4826 / sqrt(2)); independent of any trial period.
/// Falls back to 1 when the scale degenerates (noise-free data).
inline double diff_noise_scale(const TimeSeries& s) {
  std::vector<double> d(s.size() - 1);
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    d[i] = s.values()[i + 1] - s.values()[i];
  const double med = detail::median_of(d);
  for (double& x : d) x = std::abs(x - med);
  const double scale = detail::median_of(d) * 1.4826 / std::sqrt(2.0);
  return scale >= 1e-12 ? scale : 1.0;
}

/// Three local-linear smooths (short/mid/long span); per point the span
/// with the smallest mid-span-smoothed leave-one-out absolute residual wins
/// (ties to the longest span). SAR = sum |Y - Yhat| / sigma_hat.
/// sigma_hat: fixed_noise_scale when given (a scan holds one scale fixed
/// across trial periods); otherwise the global MAD rule on the residuals,
/// degenerating to unit weights below 1e-12. Bands are floored at 3
/// neighbors so small datasets stay fittable.
inline SupersmootherFit supersmoother_sar(
    const PhasedSeries& ps, const std::array<double, 3>& spans = {0.05, 0.2, 0.5},
    double fixed_noise_scale = 0.0) {
  if (!ps.sorted())
    throw invalid_argument("supersmoother: phased data must be sorted");
  if (ps.size() < 10)
    throw insufficient_data("supersmoother: need at least 10 observations");
  for (int k = 0; k < 3; ++k) {
    if (!(spans[k] > 0.0) || spans[k] > 1.0)
      throw invalid_argument("supersmoother: spans must be in (0,1]");
    if (k > 0 && !(spans[k] > spans[k - 1]))
      throw invalid_argument("supersmoother: spans must be strictly increasing");
  }
  const std::size_t n = ps.size();
  const auto& rho = ps.phases();
  const auto& y = ps.values();

  std::array<std::vector<double>, 3> fit_k, loo_k;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> lev;
    detail::local_linear_smooth(rho, y, spans[k], kernel::uniform, 3,
                                fit_k[k], &lev);
    loo_k[k].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double denom = std::max(1.0 - lev[i], 1e-8);
      loo_k[k][i] = std::abs(y[i] - fit_k[k][i]) / denom;
    }
    detail::local_linear_smooth(rho, loo_k[k], spans[1], kernel::uniform, 3,
                                loo_k[k], nullptr);
  }

  SupersmootherFit out;
  out.spans = spans;
  out.fitted.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
      if (loo_k[k][i] <= loo_k[best][i]) best = k;
    out.fitted[i] = fit_k[best][i];
  }

  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - out.fitted[i];
  double scale;
  if (fixed_noise_scale > 0.0) {
    scale = fixed_noise_scale;
  } else {
    std::vector<double> a(resid);
    const double med = detail::median_of(a);
    for (double& x : a) x = std::abs(x - med);
    scale = detail::median_of(a) * 1.4826;
    if (scale < 1e-12) scale = 1.0;
  }
  out.sigma_hat.assign(n, scale);
  out.sar = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.sar += std::abs(resid[i]) / scale;
  return out;
}

/// SSE(p): fold at the trial period, fit the chosen smoother, return its
/// sum of squared residuals.
inline double sse_objective(const TimeSeries& s, double p, fitter_kind fitter,
                            const SplineConfig& spline_cfg = {},
                            const LocalLinearConfig& local_cfg = {}) {
  const PhasedSeries ps = fold_series(s, p);
  if (fitter == fitter_kind::spline)
    return fit_periodic_spline(ps, spline_cfg).sse;
  return fit_local_linear(ps, local_cfg).sse;
}

}  // namespace cyclefind
