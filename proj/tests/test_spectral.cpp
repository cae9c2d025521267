#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cyclefind/cyclefind.hpp"

using namespace cyclefind;

namespace {

TimeSeries sine_series(std::size_t n, double f0, double noise_sd,
                       std::uint64_t seed, double t_max, double phase = 0.0) {
  rng g(seed);
  std::vector<double> t(n), y(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = g.uniform01() * t_max;
  std::sort(t.begin(), t.end());
  for (std::size_t i = 0; i < n; ++i)
    y[i] = std::sin(two_pi * f0 * t[i] + phase) + g.normal(0.0, noise_sd);
  return TimeSeries(t, y);
}

// Empirical KS distance between sampled 2*P/sigma^2 values and the
// exponential(mean 2) law, i.e. a chi-square with two degrees of freedom.
double ks_chi22(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 1.0 - std::exp(-samples[i] / 2.0);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / n));
  }
  return d;
}

}  // namespace

TEST_CASE("classical periodogram concentrates power at the true frequency",
          "[spectral]") {
  // Even sampling, exact cosine: power at f0 is N/4, far bins are tiny.
  const std::size_t n = 100;
  const double f0 = 0.1;
  std::vector<double> t(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i);
    y[i] = std::cos(two_pi * f0 * t[i]);
  }
  const double peak = classical_power_at(t, y, f0);
  CHECK(peak == Catch::Approx(static_cast<double>(n) / 4.0).epsilon(0.05));

  // An off-grid Fourier frequency of a constant series sums a full set of
  // unit roots, so both quadratures vanish.
  std::vector<double> ones(n, 1.0);
  CHECK(classical_power_at(t, ones, 3.0 / static_cast<double>(n)) ==
        Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("classical periodogram hand value at two points", "[spectral]") {
  // t = {0, 0.25}, y = {1, 2}, f = 1: sums are C = 1, S = 2, power 2.5.
  const std::vector<double> t{0.0, 0.25};
  const std::vector<double> y{1.0, 2.0};
  CHECK(classical_power_at(t, y, 1.0) == Catch::Approx(2.5).margin(1e-12));
}

TEST_CASE("periodogram curves are non-negative and grid-shaped", "[spectral]") {
  const auto s = sine_series(80, 0.7, 1.0, 11, 20.0);
  const FrequencyGrid grid = make_frequency_grid(0.05, 2.0, 0.01);
  const auto cls = classical_periodogram(s, grid);
  const auto ls = lomb_scargle(s, grid);
  REQUIRE(cls.power.size() == grid.size());
  REQUIRE(ls.power.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(cls.power[i] >= 0.0);
    if (ls.is_defined(i)) CHECK(ls.power[i] >= 0.0);
  }
}

TEST_CASE("value shift leaves centered power unchanged", "[spectral]") {
  const auto s = sine_series(60, 0.43, 0.5, 7, 15.0);
  std::vector<double> shifted = s.values();
  for (double& v : shifted) v += 123.456;
  const TimeSeries s2(s.times(), shifted);
  const FrequencyGrid grid = make_frequency_grid(0.1, 1.0, 0.02);
  const auto a = lomb_scargle(s, grid);
  const auto b = lomb_scargle(s2, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    REQUIRE(a.is_defined(i) == b.is_defined(i));
    if (a.is_defined(i))
      CHECK(b.power[i] == Catch::Approx(a.power[i]).epsilon(1e-8));
  }
}

TEST_CASE("time translation leaves power unchanged", "[spectral]") {
  // The phase origin tracks the data, so shifting every timestamp by any
  // offset must not move the spectrum.
  const auto s = sine_series(80, 0.31, 0.4, 3, 24.0);
  const FrequencyGrid grid = make_frequency_grid(0.1, 0.9, 0.05);
  const auto base = lomb_scargle(s, grid);
  rng g(99);
  for (int rep = 0; rep < 100; ++rep) {
    const double delta = (g.uniform01() - 0.5) * 200.0;
    std::vector<double> t = s.times();
    for (double& v : t) v += delta;
    const auto moved = lomb_scargle(TimeSeries(t, s.values()), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      REQUIRE(moved.is_defined(i) == base.is_defined(i));
      if (base.is_defined(i))
        CHECK(moved.power[i] == Catch::Approx(base.power[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("quadrature amplitude and offset recover a pure tone", "[spectral]") {
  const double f0 = 0.27, amp = 3.4, phase = 1.1;
  rng g(17);
  std::vector<double> t(200), y(200);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = g.uniform01() * 40.0;
  std::sort(t.begin(), t.end());
  for (std::size_t i = 0; i < t.size(); ++i)
    y[i] = amp * std::sin(two_pi * f0 * t[i] + phase);
  const TimeSeries s(t, y);
  const auto aux = ls_aux_at(s.times(), centered_values(s, true), f0);
  CHECK(aux.amplitude == Catch::Approx(amp).epsilon(0.02));
  CHECK(std::isfinite(aux.tau));
}

TEST_CASE("coincident timestamps yield an undefined spectrum", "[spectral]") {
  // All observations at one instant: the sine quadrature denominator is
  // zero at every frequency, so every bin is flagged, never NaN-crashed.
  const TimeSeries s({5.0, 5.0, 5.0}, {1.0, 2.0, 3.0});
  const FrequencyGrid grid = make_frequency_grid(0.1, 1.0, 0.1);
  const auto ls = lomb_scargle(s, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK_FALSE(ls.is_defined(i));
  CHECK_FALSE(ls_power_at(s.times(), centered_values(s, true), 0.5).has_value());
}

TEST_CASE("printed and squared estimator forms differ on generic data",
          "[spectral]") {
  const auto s = sine_series(50, 0.4, 1.0, 23, 12.0);
  const auto centered = centered_values(s, true);
  const auto squared = ls_power_at<ls_form::squared>(s.times(), centered, 0.33);
  const auto printed =
      ls_power_at<ls_form::as_printed>(s.times(), centered, 0.33);
  REQUIRE(squared.has_value());
  REQUIRE(printed.has_value());
  CHECK(*squared != *printed);
}

TEST_CASE("lomb-scargle needs three observations", "[spectral]") {
  const TimeSeries s({0.0, 1.0}, {1.0, 2.0});
  CHECK_THROWS_AS(lomb_scargle(s, make_frequency_grid(0.1, 1.0, 0.1)),
                  insufficient_data);
}

TEST_CASE("white-noise null level follows the two-degree chi-square law",
          "[spectral]") {
  // 2 P(f) / sigma^2 for Gaussian noise is chi-square with 2 degrees of
  // freedom; 2000 replicates must pass a KS test at the 1 percent level.
  const std::size_t n = 150;
  const double sigma = 1.3, f = 0.83;
  rng tg(4242);
  std::vector<double> t(n);
  for (double& v : t) v = tg.uniform01() * 30.0;
  std::sort(t.begin(), t.end());

  std::vector<double> samples;
  samples.reserve(2000);
  for (int rep = 0; rep < 2000; ++rep) {
    rng g(derive_seed(20260822, {static_cast<std::uint64_t>(rep)}));
    std::vector<double> y(n);
    for (double& v : y) v = g.normal(0.0, sigma);
    const auto p = ls_power_at(t, centered_values(TimeSeries(t, y), true), f);
    REQUIRE(p.has_value());
    samples.push_back(2.0 * *p / (sigma * sigma));
  }
  // 1 percent KS critical value for 2000 draws: 1.62762 / sqrt(2000).
  CHECK(ks_chi22(samples) < 0.0364);
}

TEST_CASE("significance threshold tracks level and noise variance",
          "[spectral]") {
  CHECK(ls_significance_threshold(0.01, 1.0) ==
        Catch::Approx(-std::log(0.01)).margin(1e-12));
  CHECK(ls_significance_threshold(0.05, 2.0) ==
        Catch::Approx(-2.0 * std::log(0.05)).margin(1e-12));
  // Stricter levels and larger noise both raise the bar.
  CHECK(ls_significance_threshold(0.001, 1.0) >
        ls_significance_threshold(0.01, 1.0));
  CHECK(ls_significance_threshold(0.01, 3.0) >
        ls_significance_threshold(0.01, 1.0));
  CHECK_THROWS_AS(ls_significance_threshold(0.0, 1.0), invalid_argument);
  CHECK_THROWS_AS(ls_significance_threshold(1.0, 1.0), invalid_argument);
  CHECK_THROWS_AS(ls_significance_threshold(0.01, -1.0), invalid_argument);
}

TEST_CASE("even sampling makes both periodograms agree on the peak",
          "[spectral]") {
  // Mean-centered, evenly sampled data: the phase origin correction
  // rotates but does not reweight, so the argmax frequency matches.
  const FrequencyGrid grid = make_frequency_grid(0.02, 0.48, 0.002);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    rng g(seed);
    const double f0 = 0.05 + 0.4 * g.uniform01();
    std::vector<double> t(100), y(100);
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = static_cast<double>(i);
      y[i] = std::sin(two_pi * f0 * t[i]) + g.normal(0.0, 1.0);
    }
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    for (double& v : y) v -= mean;
    const TimeSeries s(t, y);

    const auto cls = classical_periodogram(s, grid);
    const auto ls = lomb_scargle(s, grid);
    std::size_t best_c = 0, best_l = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (cls.power[i] > cls.power[best_c]) best_c = i;
      if (ls.is_defined(i) && ls.power[i] > ls.power[best_l]) best_l = i;
    }
    CHECK(best_c == best_l);
  }
}
