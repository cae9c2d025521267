// Command-line front end: estimate / scan / bootstrap on one series, plus
// the two Monte-Carlo benchmark studies. Exit codes: 0 success, 1 usage,
// 2 data (parse / insufficient / fetch), 3 numerical degeneracy.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cyclefind/cyclefind.hpp"

namespace {

using namespace cyclefind;

struct GridSpec {
  double p_min = 0.5, p_max = 2.0, step = 0.005;
};

GridSpec parse_grid_spec(const std::string& text) {
  GridSpec g;
  const std::size_t a = text.find(':');
  const std::size_t b = text.rfind(':');
  if (a == std::string::npos || b == a)
    throw invalid_argument("--grid expects min:max:step, got " + text);
  try {
    g.p_min = std::stod(text.substr(0, a));
    g.p_max = std::stod(text.substr(a + 1, b - a - 1));
    g.step = std::stod(text.substr(b + 1));
  } catch (const std::exception&) {
    throw invalid_argument("--grid expects min:max:step, got " + text);
  }
  return g;
}

/// Input options shared by the single-series subcommands.
struct InputOptions {
  std::string input;         // path, or "-" for stdin
  std::string fetch_id;
  std::string url_template;
  std::string cache_dir;
  bool detrend = false;
};

TimeSeries load_series(const InputOptions& in) {
  std::string path = in.input;
  if (!in.fetch_id.empty()) {
    const std::string dir =
        in.cache_dir.empty() ? default_cache_dir() : in.cache_dir;
    path = fetch_remote(in.url_template, in.fetch_id, dir);
  }
  if (path.empty())
    throw invalid_argument("no input: pass --input FILE or --fetch-id ID");
  TimeSeries s = path == "-" ? ingest_csv(std::cin, "stdin")
                             : ingest_csv_file(path);
  if (!in.detrend) return s;

  // Remove the least-squares line through (t, y); a drifting baseline
  // otherwise smears every fold.
  const std::size_t n = s.size();
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    st += s.times()[i];
    sy += s.values()[i];
  }
  const double tbar = st / static_cast<double>(n);
  const double ybar = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = s.times()[i] - tbar;
    sxx += dt * dt;
    sxy += dt * (s.values()[i] - ybar);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = s.values()[i] - ybar - slope * (s.times()[i] - tbar);
  return TimeSeries(s.times(), std::move(y), s.label());
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw invalid_argument("cannot write output file " + out_path);
  out << text;
}

double sample_variance(const TimeSeries& s) {
  double mean = 0.0;
  for (double v : s.values()) mean += v;
  mean /= static_cast<double>(s.size());
  double ss = 0.0;
  for (double v : s.values()) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(s.size() - 1);
}

/// All tunables reachable from flags or the config file.
struct Options {
  InputOptions in;
  std::string method = "lomb-scargle";
  std::string grid_text = "0.5:2.0:0.005";
  std::string format;  // per-subcommand default when empty
  std::string output;
  int workers = 1;
  // method knobs
  int knots = 4;
  double span = 0.3;
  std::string kernel_name = "uniform";
  int bins = 10;
  int min_bin_count = 2;
  double ren_b = 0.0;
  std::string wrap_name = "periodic";
  bool no_center = false;
  std::vector<double> spans{0.05, 0.2, 0.5};
  double noise_scale = 0.0;
  // significance
  std::optional<double> alpha;
  std::optional<double> noise_variance;
  // bootstrap
  int replicates = 200;
  double ci_alpha = 0.05;
  std::uint64_t seed = 0;
  // bench
  std::vector<double> proportions{0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  std::vector<double> multiples{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
  int bench_replicates = 100;
  std::vector<std::string> method_names;
  std::uint64_t master_seed = 0;
  double amplitude = 150.0;
  int points = 300;
  double base_noise_sd = 0.0;
  std::optional<double> baseline_sd;
  double subsample_proportion = 0.6;
  double true_period = 1.0;
  double tolerance = 0.01;
};

MethodConfig make_method_config(const Options& o) {
  MethodConfig cfg;
  cfg.center_lomb_scargle = !o.no_center;
  cfg.wrap = o.wrap_name == "literal" ? wrap_mode::literal : wrap_mode::periodic;
  cfg.ren.b = o.ren_b;
  cfg.pdm.num_bins = o.bins;
  cfg.pdm.min_bin_count = o.min_bin_count;
  cfg.spline.num_knots = o.knots;
  cfg.local.span = o.span;
  cfg.local.weight =
      o.kernel_name == "tricube" ? kernel::tricube : kernel::uniform;
  if (o.spans.size() != 3)
    throw invalid_argument("--spans needs exactly 3 increasing values");
  cfg.supersmoother_spans = {o.spans[0], o.spans[1], o.spans[2]};
  cfg.supersmoother_noise_scale = o.noise_scale;
  return cfg;
}

report_format pick_format(const Options& o, report_format fallback) {
  if (o.format.empty()) return fallback;
  return format_from_name(o.format);
}

/// An all-undefined curve hides why every evaluation failed; re-running
/// one evaluation raw recovers the degenerate error for the exit code.
PeriodEstimate select_or_explain(const TimeSeries& s, const PeriodGrid& grid,
                                 method_id m, const MethodConfig& cfg,
                                 const ObjectiveCurve& curve) {
  try {
    return select_estimate(curve);
  } catch (const insufficient_data&) {
    evaluate_statistic(s, grid.periods().front(), m, cfg);
    throw;
  }
}

int run_estimate(const Options& o) {
  const TimeSeries s = load_series(o.in);
  const GridSpec g = parse_grid_spec(o.grid_text);
  const PeriodGrid grid = make_period_grid(g.p_min, g.p_max, g.step);
  const method_id m = method_from_name(o.method);
  const MethodConfig cfg = make_method_config(o);
  const ObjectiveCurve curve = scan(s, grid, m, cfg, o.workers);
  PeriodEstimate est = select_or_explain(s, grid, m, cfg, curve);
  if (o.alpha && m == method_id::lomb_scargle) {
    const double nv = o.noise_variance ? *o.noise_variance : sample_variance(s);
    est = annotate_significance(est, curve, *o.alpha, nv);
  }
  write_output(emit_report(est, pick_format(o, report_format::json)), o.output);
  return 0;
}

int run_scan(const Options& o) {
  const TimeSeries s = load_series(o.in);
  const GridSpec g = parse_grid_spec(o.grid_text);
  const PeriodGrid grid = make_period_grid(g.p_min, g.p_max, g.step);
  const method_id m = method_from_name(o.method);
  const ObjectiveCurve curve =
      scan(s, grid, m, make_method_config(o), o.workers);
  write_output(emit_report(curve, pick_format(o, report_format::csv)),
               o.output);
  return 0;
}

int run_bootstrap(const Options& o) {
  const TimeSeries s = load_series(o.in);
  const GridSpec g = parse_grid_spec(o.grid_text);
  const PeriodGrid grid = make_period_grid(g.p_min, g.p_max, g.step);
  const method_id m = method_from_name(o.method);
  BootstrapConfig bcfg;
  bcfg.replicates = o.replicates;
  bcfg.alpha = o.ci_alpha;
  bcfg.seed = o.seed;
  const PeriodEstimate est =
      bootstrap_ci(s, grid, m, make_method_config(o), bcfg, o.workers);
  write_output(emit_report(est, pick_format(o, report_format::json)),
               o.output);
  return 0;
}

StudyConfig make_study_config(const Options& o, const TimeSeries& base) {
  StudyConfig cfg;
  cfg.replicates = o.bench_replicates;
  if (o.method_names.empty()) {
    cfg.methods.assign(all_methods.begin(), all_methods.end());
  } else {
    for (const auto& name : o.method_names)
      cfg.methods.push_back(method_from_name(name));
  }
  const GridSpec g = parse_grid_spec(o.grid_text);
  cfg.grid = make_period_grid(g.p_min, g.p_max, g.step);
  cfg.method_cfg = make_method_config(o);
  cfg.master_seed = o.master_seed;
  cfg.baseline_sd =
      o.baseline_sd ? *o.baseline_sd : std::sqrt(sample_variance(base));
  cfg.subsample_proportion = o.subsample_proportion;
  cfg.accuracy.true_period = o.true_period;
  cfg.accuracy.tolerance = o.tolerance;
  return cfg;
}

TimeSeries bench_base(const Options& o) {
  if (!o.in.input.empty() || !o.in.fetch_id.empty()) return load_series(o.in);
  return synthetic_annual_series(static_cast<std::size_t>(o.points),
                                 o.amplitude, o.base_noise_sd, o.master_seed);
}

int run_bench_missing(const Options& o, int workers) {
  const TimeSeries base = bench_base(o);
  StudyConfig cfg = make_study_config(o, base);
  cfg.proportions = o.proportions;
  const BenchReport report = run_missing_data_study(base, cfg, workers);
  write_output(emit_report(report, pick_format(o, report_format::json)),
               o.output);
  return 0;
}

int run_bench_noise(const Options& o, int workers) {
  const TimeSeries base = bench_base(o);
  StudyConfig cfg = make_study_config(o, base);
  cfg.noise_multiples = o.multiples;
  const BenchReport report = run_noise_study(base, cfg, workers);
  write_output(emit_report(report, pick_format(o, report_format::json)),
               o.output);
  return 0;
}

/// --config FILE is honored before CLI11 parsing so flags can override
/// file values; unknown keys are rejected to catch typos early.
std::map<std::string, std::string> preload_config(int argc, char** argv,
                                                  const std::vector<std::string>& known) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
  }
  if (path.empty()) return {};
  auto kv = parse_config_file(path);
  for (const auto& [key, value] : kv) {
    (void)value;
    bool ok = false;
    for (const auto& k : known)
      if (k == key) ok = true;
    if (!ok) throw invalid_argument("config: unknown key '" + key + "'");
  }
  return kv;
}

template <class T>
void seed_default(const std::map<std::string, std::string>& kv,
                  const std::string& key, T& slot) {
  const auto it = kv.find(key);
  if (it == kv.end()) return;
  std::istringstream in(it->second);
  T parsed{};
  in >> parsed;
  if (in.fail())
    throw invalid_argument("config: cannot parse value for '" + key + "'");
  slot = parsed;
}

void seed_default(const std::map<std::string, std::string>& kv,
                  const std::string& key, std::string& slot) {
  const auto it = kv.find(key);
  if (it != kv.end()) slot = it->second;
}

void seed_default(const std::map<std::string, std::string>& kv,
                  const std::string& key, bool& slot) {
  const auto it = kv.find(key);
  if (it == kv.end()) return;
  slot = it->second == "true" || it->second == "1" || it->second == "yes";
}

void seed_default(const std::map<std::string, std::string>& kv,
                  const std::string& key, std::vector<double>& slot) {
  const auto it = kv.find(key);
  if (it == kv.end()) return;
  std::vector<double> parsed;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      parsed.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw invalid_argument("config: cannot parse value for '" + key + "'");
    }
  }
  if (!parsed.empty()) slot = parsed;
}

void seed_optional(const std::map<std::string, std::string>& kv,
                   const std::string& key, std::optional<double>& slot) {
  const auto it = kv.find(key);
  if (it == kv.end()) return;
  try {
    slot = std::stod(it->second);
  } catch (const std::exception&) {
    throw invalid_argument("config: cannot parse value for '" + key + "'");
  }
}

const std::vector<std::string> config_keys = {
    "input", "url-template", "cache-dir", "detrend", "method", "grid",
    "format", "output", "workers", "knots", "span", "kernel", "bins",
    "min-bin-count", "ren-b", "wrap", "no-center", "spans", "noise-scale",
    "alpha", "noise-variance", "replicates", "ci-alpha", "seed",
    "proportions", "multiples", "bench-replicates", "methods",
    "master-seed", "amplitude", "points", "base-noise-sd", "baseline-sd",
    "subsample-proportion", "true-period", "tolerance"};

int dispatch(int argc, char** argv) {
  Options o;
  const auto kv = preload_config(argc, argv, config_keys);
  seed_default(kv, "input", o.in.input);
  seed_default(kv, "url-template", o.in.url_template);
  seed_default(kv, "cache-dir", o.in.cache_dir);
  seed_default(kv, "detrend", o.in.detrend);
  seed_default(kv, "method", o.method);
  seed_default(kv, "grid", o.grid_text);
  seed_default(kv, "format", o.format);
  seed_default(kv, "output", o.output);
  seed_default(kv, "workers", o.workers);
  seed_default(kv, "knots", o.knots);
  seed_default(kv, "span", o.span);
  seed_default(kv, "kernel", o.kernel_name);
  seed_default(kv, "bins", o.bins);
  seed_default(kv, "min-bin-count", o.min_bin_count);
  seed_default(kv, "ren-b", o.ren_b);
  seed_default(kv, "wrap", o.wrap_name);
  seed_default(kv, "no-center", o.no_center);
  seed_default(kv, "spans", o.spans);
  seed_default(kv, "noise-scale", o.noise_scale);
  seed_optional(kv, "alpha", o.alpha);
  seed_optional(kv, "noise-variance", o.noise_variance);
  seed_default(kv, "replicates", o.replicates);
  seed_default(kv, "ci-alpha", o.ci_alpha);
  seed_default(kv, "seed", o.seed);
  seed_default(kv, "proportions", o.proportions);
  seed_default(kv, "multiples", o.multiples);
  seed_default(kv, "bench-replicates", o.bench_replicates);
  {
    const auto it = kv.find("methods");
    if (it != kv.end()) {
      o.method_names.clear();
      std::istringstream in(it->second);
      std::string item;
      while (std::getline(in, item, ','))
        if (!item.empty()) o.method_names.push_back(item);
    }
  }
  seed_default(kv, "master-seed", o.master_seed);
  seed_default(kv, "amplitude", o.amplitude);
  seed_default(kv, "points", o.points);
  seed_default(kv, "base-noise-sd", o.base_noise_sd);
  seed_optional(kv, "baseline-sd", o.baseline_sd);
  seed_default(kv, "subsample-proportion", o.subsample_proportion);
  seed_default(kv, "true-period", o.true_period);
  seed_default(kv, "tolerance", o.tolerance);

  CLI::App app{"Period estimation for unevenly sampled time series"};
  app.set_version_flag("--version", std::string("cyclefind ") + version);
  app.require_subcommand(1);
  std::string config_path;  // consumed in preload, declared for help/validation
  app.add_option("--config", config_path, "key = value defaults file");

  double alpha_in = -1.0, noise_var_in = -1.0, baseline_in = -1.0;

  const auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input,-i", o.in.input,
                    "time,value CSV path ('-' reads stdin)");
    cmd->add_option("--fetch-id", o.in.fetch_id,
                    "resource id substituted into --url-template");
    cmd->add_option("--url-template", o.in.url_template,
                    "http URL with {id} placeholder");
    cmd->add_option("--cache-dir", o.in.cache_dir,
                    "download cache (default $CYCLEFIND_CACHE_DIR)");
    cmd->add_flag("--detrend", o.in.detrend,
                  "subtract the least-squares line before analysis");
  };
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value defaults file");
    cmd->add_option("--grid", o.grid_text, "trial periods min:max:step");
    cmd->add_option("--format", o.format, "csv or json");
    cmd->add_option("--output,-o", o.output, "output path (default stdout)");
    cmd->add_option("--workers", o.workers, "worker threads")
        ->check(CLI::PositiveNumber);
  };
  const auto add_method = [&](CLI::App* cmd) {
    cmd->add_option("--method,-m", o.method,
                    "classical | lomb-scargle | sl | lk | ren | pdm | "
                    "spline-sse | local-sse | supersmoother-sar");
    cmd->add_option("--knots", o.knots, "spline knot count (>= 4)");
    cmd->add_option("--span", o.span, "local-linear span in (0,1]");
    cmd->add_option("--kernel", o.kernel_name, "uniform or tricube")
        ->check(CLI::IsMember({"uniform", "tricube"}));
    cmd->add_option("--bins", o.bins, "phase bins for the variance ratio");
    cmd->add_option("--min-bin-count", o.min_bin_count,
                    "occupancy floor per contributing bin");
    cmd->add_option("--ren-b", o.ren_b,
                    "phase-gap damping constant (0 uses 1/N)");
    cmd->add_option("--wrap", o.wrap_name, "periodic or literal closing gap")
        ->check(CLI::IsMember({"periodic", "literal"}));
    cmd->add_flag("--no-center", o.no_center,
                  "skip mean-centering for lomb-scargle");
    cmd->add_option("--spans", o.spans,
                    "three increasing supersmoother spans")
        ->delimiter(',')
        ->expected(3);
    cmd->add_option("--noise-scale", o.noise_scale,
                    "fixed supersmoother residual scale (0 derives one)");
  };

  CLI::App* est = app.add_subcommand("estimate", "select the best period");
  add_input(est);
  add_common(est);
  add_method(est);
  est->add_option("--alpha", alpha_in,
                  "significance level for the lomb-scargle peak");
  est->add_option("--noise-variance", noise_var_in,
                  "noise variance for the significance threshold "
                  "(default: sample variance)");

  CLI::App* scn = app.add_subcommand("scan", "emit the full objective curve");
  add_input(scn);
  add_common(scn);
  add_method(scn);

  CLI::App* boot = app.add_subcommand(
      "bootstrap", "percentile confidence interval by case resampling");
  add_input(boot);
  add_common(boot);
  add_method(boot);
  boot->add_option("--replicates,-B", o.replicates, "bootstrap resamples");
  boot->add_option("--ci-alpha", o.ci_alpha, "interval level (default 0.05)");
  boot->add_option("--seed", o.seed, "resampling seed");

  const auto add_bench = [&](CLI::App* cmd) {
    add_input(cmd);
    add_common(cmd);
    add_method(cmd);
    cmd->add_option("--bench-replicates,-R", o.bench_replicates,
                    "Monte-Carlo replicates per condition");
    cmd->add_option("--methods", o.method_names,
                    "methods to compare (default: all)")
        ->delimiter(',');
    cmd->add_option("--master-seed", o.master_seed, "study master seed");
    cmd->add_option("--amplitude", o.amplitude,
                    "synthetic base amplitude (no --input)");
    cmd->add_option("--points", o.points,
                    "synthetic base length (no --input)");
    cmd->add_option("--base-noise-sd", o.base_noise_sd,
                    "noise baked into the synthetic base");
    cmd->add_option("--true-period", o.true_period, "accuracy target");
    cmd->add_option("--tolerance", o.tolerance, "accuracy tolerance");
  };

  CLI::App* bm = app.add_subcommand(
      "bench-missing", "accuracy and MSE versus subsampling proportion");
  add_bench(bm);
  bm->add_option("--proportions", o.proportions,
                 "subsampling proportions in (0,1]")
      ->delimiter(',');

  CLI::App* bn = app.add_subcommand(
      "bench-noise", "accuracy and MSE versus added-noise sd multiple");
  add_bench(bn);
  bn->add_option("--multiples", o.multiples, "added-noise sd multiples")
      ->delimiter(',');
  bn->add_option("--baseline-sd", baseline_in,
                 "sd the multiples scale (default: base series sd)");
  bn->add_option("--subsample-proportion", o.subsample_proportion,
                 "fixed sampling rate for the noise study");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (alpha_in >= 0.0) o.alpha = alpha_in;
  if (noise_var_in >= 0.0) o.noise_variance = noise_var_in;
  if (baseline_in >= 0.0) o.baseline_sd = baseline_in;

  if (est->parsed()) return run_estimate(o);
  if (scn->parsed()) return run_scan(o);
  if (boot->parsed()) return run_bootstrap(o);
  if (bm->parsed()) return run_bench_missing(o, o.workers);
  if (bn->parsed()) return run_bench_noise(o, o.workers);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const cyclefind::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const cyclefind::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cyclefind::insufficient_data& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cyclefind::fetch_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cyclefind::degenerate_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const cyclefind::degenerate_fit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
