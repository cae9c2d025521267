// Acceptance gate: eight release criteria, one verdict line each.
// Numeric targets and tolerances are pinned here on purpose; fixture-backed
// checks report SKIP when the data files are absent.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cyclefind/cyclefind.hpp"

namespace fs = std::filesystem;
using namespace cyclefind;

namespace {

struct check_failure {
  std::string detail;
};

void require(bool ok, const std::string& detail) {
  if (!ok) throw check_failure{detail};
}

struct skip_check {
  std::string reason;
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

/// Fixture lookup: $CYCLEFIND_DATA_DIR first, then <repo>/data.
std::optional<std::string> find_fixture(const std::string& name) {
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("CYCLEFIND_DATA_DIR")) dirs.push_back(env);
  dirs.push_back(fs::path(CYCLEFIND_REPO_ROOT) / "data");
  for (const auto& dir : dirs)
    if (fs::exists(dir / name)) return (dir / name).string();
  return std::nullopt;
}

const BenchCell& cell_at(const BenchReport& report, const std::string& method,
                         double condition_value) {
  for (const auto& c : report.cells)
    if (c.method == method &&
        std::abs(c.condition_value - condition_value) < 1e-12)
      return c;
  throw check_failure{"report lacks cell " + method + " @ " +
                      fmt(condition_value)};
}

// 1: noise-free recovery. Every statistic must pick the true period off the
// grid exactly, in under ten seconds on one worker.
std::string criterion_1() {
  const TimeSeries base = synthetic_annual_series(300, 150.0, 0.0, 1);
  const PeriodGrid grid = make_period_grid(0.5, 2.0, 0.005);
  const method_id ms[] = {method_id::lomb_scargle, method_id::classical,
                          method_id::sl,           method_id::lk,
                          method_id::ren,          method_id::pdm,
                          method_id::spline_sse,   method_id::local_sse};
  const auto t0 = std::chrono::steady_clock::now();
  for (method_id m : ms) {
    const PeriodEstimate est = select_estimate(scan(base, grid, m, {}, 1));
    require(std::abs(est.period - 1.0) <= 1e-9,
            std::string(method_name(m)) + " picked " + fmt(est.period));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  require(secs < 10.0, "took " + fmt(secs) + " s");
  return "8 methods exact in " + fmt(secs) + " s";
}

// 2: noisy recovery at the calibrated signal-to-noise point, 60 percent
// sampling, 100 replicates; the three regression-style methods must stay
// at or above 0.9 accuracy.
std::string criterion_2() {
  const TimeSeries base = synthetic_annual_series(300, 150.0, 0.0, 1);
  StudyConfig cfg;
  cfg.noise_multiples = {1.0};
  cfg.replicates = 100;
  cfg.methods = {method_id::lomb_scargle, method_id::spline_sse,
                 method_id::local_sse};
  cfg.grid = make_period_grid(0.5, 2.0, 0.005);
  cfg.master_seed = 20260822;
  cfg.baseline_sd = 90.53;
  cfg.subsample_proportion = 0.6;
  cfg.accuracy.true_period = 1.0;
  cfg.accuracy.tolerance = 0.01;
  const BenchReport report = run_noise_study(base, cfg, 4);
  std::string detail;
  for (method_id m : cfg.methods) {
    const BenchCell& c = cell_at(report, method_name(m), 1.0);
    require(c.accuracy_rate >= 0.9, std::string(method_name(m)) +
                                        " accuracy " + fmt(c.accuracy_rate));
    detail += std::string(detail.empty() ? "" : ", ") + method_name(m) + " " +
              fmt(c.accuracy_rate);
  }
  return "accuracy " + detail;
}

// 3: missing-data degradation on the recorded sea-level series.
std::string criterion_3() {
  const auto path = find_fixture("sealevel.csv");
  if (!path) throw skip_check{"no sea-level fixture"};
  const TimeSeries base = ingest_csv_file(*path);
  StudyConfig cfg;
  cfg.proportions = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  cfg.replicates = 100;
  cfg.methods = {method_id::lomb_scargle, method_id::spline_sse,
                 method_id::pdm};
  cfg.grid = make_period_grid(0.5, 2.0, 0.005);
  cfg.master_seed = 20260822;
  cfg.accuracy.true_period = 1.0;
  cfg.accuracy.tolerance = 0.01;
  const BenchReport report = run_missing_data_study(base, cfg, 4);
  for (double p : cfg.proportions) {
    const double ls = cell_at(report, "lomb-scargle", p).mse;
    const double sp = cell_at(report, "spline-sse", p).mse;
    require(ls <= 1e-4, "ls mse " + fmt(ls) + " @ " + fmt(p));
    require(sp <= 1e-4, "spline mse " + fmt(sp) + " @ " + fmt(p));
  }
  const double ls06 = cell_at(report, "lomb-scargle", 0.6).mse;
  require(ls06 >= 3.73e-7 && ls06 <= 3.73e-5,
          "ls mse @ 0.6 = " + fmt(ls06) + " not near 3.73e-6");
  const double pdm02 = cell_at(report, "pdm", 0.2).mse;
  require(pdm02 >= 0.1, "pdm mse @ 0.2 = " + fmt(pdm02));
  return "ls mse @ 0.6 = " + fmt(ls06) + ", pdm mse @ 0.2 = " + fmt(pdm02);
}

// 4: added-noise degradation on the same fixture. The scan reaches decade
// periods: squared error on a 0.5-2.0 grid caps at 1, so the recorded
// failure magnitude (mean squared error above 1) needs room to wander.
std::string criterion_4() {
  const auto path = find_fixture("sealevel.csv");
  if (!path) throw skip_check{"no sea-level fixture"};
  const TimeSeries base = ingest_csv_file(*path);
  StudyConfig cfg;
  cfg.noise_multiples = {0.0, 2.0};
  cfg.replicates = 100;
  cfg.methods = {method_id::lomb_scargle, method_id::spline_sse};
  cfg.grid = make_period_grid(0.5, 10.0, 0.005);
  cfg.master_seed = 20260822;
  cfg.baseline_sd = 90.53;
  cfg.subsample_proportion = 0.6;
  cfg.accuracy.true_period = 1.0;
  cfg.accuracy.tolerance = 0.01;
  const BenchReport report = run_noise_study(base, cfg, 4);
  const double ls0 = cell_at(report, "lomb-scargle", 0.0).mse;
  const double sp0 = cell_at(report, "spline-sse", 0.0).mse;
  const double ls2 = cell_at(report, "lomb-scargle", 2.0).mse;
  require(ls0 <= 1e-4, "ls mse @ 0 sigma = " + fmt(ls0));
  require(sp0 <= 1e-4, "spline mse @ 0 sigma = " + fmt(sp0));
  require(ls2 > 1.0, "ls mse @ 2 sigma = " + fmt(ls2));
  return "ls mse " + fmt(ls0) + " -> " + fmt(ls2) + " across 0 -> 2 sigma";
}

// 5: the variable-star series; six methods, published answers, 0.02 days.
std::string criterion_5() {
  const auto path = find_fixture("lcb1.csv");
  if (!path) throw skip_check{"no variable-star fixture"};
  const TimeSeries s = ingest_csv_file(*path);
  const PeriodGrid grid = make_period_grid(1.0, 40.0, 0.01);
  const std::pair<method_id, double> expected[] = {
      {method_id::lomb_scargle, 13.14}, {method_id::lk, 13.12},
      {method_id::ren, 13.12},          {method_id::spline_sse, 13.16},
      {method_id::local_sse, 13.12},    {method_id::pdm, 13.13},
  };
  std::string detail;
  for (const auto& [m, want] : expected) {
    const PeriodEstimate est = select_estimate(scan(s, grid, m, {}, 4));
    // the 1e-9 absorbs grid-point round-off at the tolerance boundary
    require(std::abs(est.period - want) <= 0.02 + 1e-9,
            std::string(method_name(m)) + " picked " + fmt(est.period) +
                ", want " + fmt(want));
    detail += std::string(detail.empty() ? "" : ", ") + method_name(m) + " " +
              fmt(est.period);
  }
  return detail;
}

// 6: the white-noise null of the spectral statistic follows the
// two-degree chi-square law (KS at the 1 percent level, 2000 replicates).
std::string criterion_6() {
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
    require(p.has_value(), "power undefined at the probe frequency");
    samples.push_back(2.0 * *p / (sigma * sigma));
  }
  std::sort(samples.begin(), samples.end());
  const double n_d = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 1.0 - std::exp(-samples[i] / 2.0);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n_d));
    d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / n_d));
  }
  // 1 percent KS critical value for 2000 draws: 1.62762 / sqrt(2000).
  require(d < 0.0364, "KS distance " + fmt(d));
  return "KS distance " + fmt(d) + " < 0.0364";
}

// 7: on evenly spaced, mean-centered data the spectral statistic and the
// classical periodogram pick the same grid frequency, 20 seeds.
std::string criterion_7() {
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

    const SpectralPower cls = classical_periodogram(s, grid);
    const SpectralPower ls = lomb_scargle(s, grid);
    std::size_t best_c = 0, best_l = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (cls.power[i] > cls.power[best_c]) best_c = i;
      if (ls.is_defined(i) && ls.power[i] > ls.power[best_l]) best_l = i;
    }
    require(best_c == best_l, "seed " + std::to_string(seed) + " disagrees");
  }
  return "20 seeds agree on the peak";
}

// 8: the full property suite passes, in under five minutes.
std::string criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string cmd =
      std::string("\"") + CYCLEFIND_UNIT_TESTS_PATH + "\" > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  require(WIFEXITED(status) && WEXITSTATUS(status) == 0,
          "unit suite exited " +
              std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
  require(secs < 300.0, "suite took " + fmt(secs) + " s");
  return "suite green in " + fmt(secs) + " s";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* desc;
    std::function<std::string()> run;
  };
  const std::vector<Criterion> gates = {
      {1, "noise-free recovery is exact for every method", criterion_1},
      {2, "noisy recovery holds 0.9 accuracy for the regression methods",
       criterion_2},
      {3, "missing-data study matches the recorded degradation profile",
       criterion_3},
      {4, "added-noise study matches the recorded degradation profile",
       criterion_4},
      {5, "variable-star periods match the published table", criterion_5},
      {6, "white-noise null follows the two-degree chi-square law",
       criterion_6},
      {7, "even sampling aligns the spectral and classical peaks",
       criterion_7},
      {8, "property suite green under five minutes", criterion_8},
  };

  bool any_failed = false;
  for (const auto& gate : gates) {
    std::string verdict, note;
    try {
      note = gate.run();
      verdict = "PASS";
    } catch (const skip_check& s) {
      verdict = "SKIP";
      note = s.reason;
    } catch (const check_failure& f) {
      verdict = "FAIL";
      note = f.detail;
      any_failed = true;
    } catch (const std::exception& e) {
      verdict = "FAIL";
      note = e.what();
      any_failed = true;
    }
    std::printf("ACCEPTANCE %d %s - %s (%s)\n", gate.id, verdict.c_str(),
                gate.desc, note.c_str());
    std::fflush(stdout);
  }
  return any_failed ? 1 : 0;
}
