#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "cyclefind/cyclefind.hpp"

using namespace cyclefind;

TEST_CASE("mean squared error hand values", "[harness]") {
  CHECK(mse({1.0, 1.0, 1.0}, 1.0) == 0.0);
  CHECK(mse({1.1, 0.9}, 1.0) == Catch::Approx(0.01).margin(1e-15));
  CHECK(mse({2.0}, 1.0) == Catch::Approx(1.0).margin(1e-15));
  CHECK_THROWS_AS(mse({}, 1.0), invalid_argument);
}

TEST_CASE("accuracy rate counts the boundary as a hit", "[harness]") {
  AccuracySpec spec;
  spec.true_period = 1.0;
  spec.tolerance = 0.01;
  CHECK(accuracy_rate({1.0, 1.005, 0.995}, spec) == 1.0);
  // The boundary counts: estimates exactly one tolerance away are hits
  // (representable values so the comparison is exact).
  AccuracySpec wide;
  wide.true_period = 1.0;
  wide.tolerance = 0.25;
  CHECK(accuracy_rate({1.25, 0.75}, wide) == 1.0);
  CHECK(accuracy_rate({1.02, 1.0, 0.5, 1.002}, spec) == 0.5);
  CHECK(accuracy_rate({2.0}, spec) == 0.0);
  CHECK_THROWS_AS(accuracy_rate({}, spec), invalid_argument);
}

TEST_CASE("tolerance derives from an allowed phase drift", "[harness]") {
  // A quarter-cycle drift over a 25-unit record of a period-1 cycle
  // allows |error| <= 0.25 * 1 / 25 = 0.01.
  const AccuracySpec spec = accuracy_from_phase_offset(1.0, 25.0, 0.25);
  CHECK(spec.tolerance == Catch::Approx(0.01).margin(1e-15));
  REQUIRE(spec.duration.has_value());
  CHECK(*spec.duration == 25.0);
  // Longer records demand tighter estimates.
  CHECK(accuracy_from_phase_offset(1.0, 50.0, 0.25).tolerance <
        spec.tolerance);
  CHECK_THROWS_AS(accuracy_from_phase_offset(-1.0, 25.0, 0.25),
                  invalid_argument);
  CHECK_THROWS_AS(accuracy_from_phase_offset(1.0, 0.0, 0.25),
                  invalid_argument);
}

TEST_CASE("synthetic base series shape", "[harness]") {
  const TimeSeries s = synthetic_annual_series(300, 150.0, 0.0, 1);
  REQUIRE(s.size() == 300);
  CHECK(s.times()[12] == Catch::Approx(1.0).margin(1e-15));
  CHECK(s.values()[3] == Catch::Approx(150.0 * std::sin(two_pi * 0.25))
                             .margin(1e-9));
  // Same seed, same series; noise draws are reproducible too.
  const TimeSeries a = synthetic_annual_series(50, 150.0, 20.0, 7);
  const TimeSeries b = synthetic_annual_series(50, 150.0, 20.0, 7);
  CHECK(a.values() == b.values());
}

namespace {

StudyConfig small_config() {
  StudyConfig cfg;
  cfg.replicates = 3;
  cfg.methods = {method_id::lomb_scargle, method_id::lk, method_id::pdm};
  cfg.grid = make_period_grid(0.8, 1.3, 0.01);
  cfg.master_seed = 20260822;
  cfg.accuracy.true_period = 1.0;
  cfg.accuracy.tolerance = 0.01;
  return cfg;
}

}  // namespace

TEST_CASE("noise-free full-sampling study is exact for every method",
          "[harness]") {
  // The adaptive-span smoother is excluded: a noise-free evenly sampled
  // fold is fit exactly at the true period and at its double (both folds
  // collapse to a few duplicated phases), so its argmin there is round-off
  // lottery. Its exactness on uneven sampling is covered elsewhere.
  const TimeSeries base = synthetic_annual_series(240, 150.0, 0.0, 0);
  StudyConfig cfg;
  cfg.replicates = 1;
  for (method_id m : all_methods)
    if (m != method_id::supersmoother_sar) cfg.methods.push_back(m);
  cfg.grid = make_period_grid(0.5, 2.0, 0.005);
  cfg.proportions = {1.0};
  cfg.accuracy.true_period = 1.0;
  cfg.accuracy.tolerance = 0.01;
  const BenchReport report = run_missing_data_study(base, cfg);
  REQUIRE(report.cells.size() == cfg.methods.size());
  for (const auto& cell : report.cells) {
    INFO(cell.method);
    REQUIRE(cell.estimates.size() == 1);
    CHECK(cell.estimates[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(cell.mse == Catch::Approx(0.0).margin(1e-20));
    CHECK(cell.accuracy_rate == 1.0);
  }
}

TEST_CASE("study reports have one cell per condition and method",
          "[harness]") {
  const TimeSeries base = synthetic_annual_series(120, 150.0, 0.0, 0);
  StudyConfig cfg = small_config();
  cfg.proportions = {0.5, 0.8};
  const BenchReport report = run_missing_data_study(base, cfg);

  CHECK(report.study == "missing-data");
  CHECK(report.replicates == 3);
  REQUIRE(report.cells.size() == 2 * 3);
  for (const auto& cell : report.cells) {
    REQUIRE(cell.estimates.size() == 3);
    // Stored summaries match their own replicate lists.
    CHECK(cell.mse ==
          Catch::Approx(mse(cell.estimates, 1.0)).margin(1e-18));
    CHECK(cell.accuracy_rate ==
          Catch::Approx(accuracy_rate(cell.estimates, cfg.accuracy))
              .margin(1e-18));
    CHECK(cell.total_variance_multiple == 1.0);
    CHECK(cell.condition.rfind("proportion ", 0) == 0);
  }
  // Cells are condition-major in configured order.
  CHECK(report.cells[0].condition_value == 0.5);
  CHECK(report.cells[0].method == "lomb-scargle");
  CHECK(report.cells[3].condition_value == 0.8);
}

TEST_CASE("study reports are deterministic and worker-independent",
          "[harness]") {
  const TimeSeries base = synthetic_annual_series(120, 150.0, 0.0, 0);
  StudyConfig cfg = small_config();
  cfg.proportions = {0.6};
  const std::string a =
      emit_report(run_missing_data_study(base, cfg, 1), report_format::json);
  const std::string b =
      emit_report(run_missing_data_study(base, cfg, 4), report_format::json);
  CHECK(a == b);

  StudyConfig ncfg = small_config();
  ncfg.noise_multiples = {0.5};
  ncfg.baseline_sd = 90.53;
  const std::string c =
      emit_report(run_noise_study(base, ncfg, 1), report_format::json);
  const std::string d =
      emit_report(run_noise_study(base, ncfg, 3), report_format::json);
  CHECK(c == d);
}

TEST_CASE("noise study labels carry sd and total-variance multiples",
          "[harness]") {
  const TimeSeries base = synthetic_annual_series(120, 150.0, 0.0, 0);
  StudyConfig cfg = small_config();
  cfg.methods = {method_id::lomb_scargle};
  cfg.noise_multiples = {0.0, 2.0};
  cfg.baseline_sd = 90.53;
  const BenchReport report = run_noise_study(base, cfg);
  REQUIRE(report.cells.size() == 2);
  CHECK(report.cells[0].condition == "added 0 sigma (total 1 sigma^2)");
  CHECK(report.cells[0].total_variance_multiple == 1.0);
  CHECK(report.cells[1].condition == "added 2 sigma (total 5 sigma^2)");
  CHECK(report.cells[1].total_variance_multiple == 5.0);
}

TEST_CASE("zero noise multiple reduces to plain subsampling", "[harness]") {
  // With sd = 0 the noise draw is an identity, so a clean strong base
  // recovers the true period exactly, as the missing-data study does.
  const TimeSeries base = synthetic_annual_series(240, 150.0, 0.0, 0);
  StudyConfig cfg = small_config();
  cfg.methods = {method_id::lomb_scargle, method_id::spline_sse};
  cfg.noise_multiples = {0.0};
  cfg.baseline_sd = 90.53;
  cfg.subsample_proportion = 0.6;
  const BenchReport noise = run_noise_study(base, cfg);
  for (const auto& cell : noise.cells) {
    CHECK(cell.mse == Catch::Approx(0.0).margin(1e-20));
    CHECK(cell.accuracy_rate == 1.0);
  }
}

TEST_CASE("studies validate their configuration", "[harness]") {
  const TimeSeries base = synthetic_annual_series(60, 150.0, 0.0, 0);
  StudyConfig cfg = small_config();
  CHECK_THROWS_AS(run_missing_data_study(base, cfg), invalid_argument);
  cfg.proportions = {1.5};
  CHECK_THROWS_AS(run_missing_data_study(base, cfg), invalid_argument);
  cfg.proportions = {0.5};
  cfg.replicates = 0;
  CHECK_THROWS_AS(run_missing_data_study(base, cfg), invalid_argument);
  cfg.replicates = 2;
  cfg.methods.clear();
  CHECK_THROWS_AS(run_missing_data_study(base, cfg), invalid_argument);

  StudyConfig ncfg = small_config();
  CHECK_THROWS_AS(run_noise_study(base, ncfg), invalid_argument);
  ncfg.noise_multiples = {-1.0};
  CHECK_THROWS_AS(run_noise_study(base, ncfg), invalid_argument);
  ncfg.noise_multiples = {1.0};
  ncfg.subsample_proportion = 0.0;
  CHECK_THROWS_AS(run_noise_study(base, ncfg), invalid_argument);
}
