#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curepl/bandwidth.hpp"
#include "curepl/errors.hpp"
#include "curepl/estimators.hpp"
#include "curepl/io.hpp"
#include "curepl/kernel.hpp"
#include "curepl/quadrature.hpp"
#include "curepl/simulation.hpp"

// Command-line front end: estimate, bandwidth, simulate, reduce-check.
// Every parameter is a flag; `--config FILE` supplies defaults as flat
// key=value lines whose keys are flag names without the leading dashes.
// Flags given on the command line win over the file.

namespace curepl::cli {

struct EstimateArgs {
  std::string data;
  std::optional<double> x;
  std::optional<double> h;
  bool auto_bandwidth = false;
  std::string kernel = "epanechnikov";
  std::string resample = "target";
  std::string method = "proposed";
  std::vector<double> times;
  std::optional<double> t_max;
  std::size_t t_points = 101;
  double h_min = 0.0;
  double h_max = 0.0;
  std::size_t grid_size = 100;
  std::size_t boot = 200;
  std::uint64_t seed = 1;
  std::string out;
};

struct BandwidthArgs {
  std::string data;
  double x = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
  std::size_t grid_size = 100;
  std::size_t boot = 200;
  std::uint64_t seed = 1;
  std::string kernel = "epanechnikov";
  std::string resample = "target";
  std::optional<double> pilot;
  std::optional<std::size_t> pilot_k;
  std::optional<double> a;
  std::optional<double> b;
  std::size_t time_points = 100;
  std::string out;
};

struct SimulateArgs {
  int scenario = 1;
  std::size_t n = 100;
  double pi = 0.8;
  std::vector<double> xs;
  std::optional<double> h;
  bool scan = false;
  std::optional<double> h_min;
  std::optional<double> h_max;
  std::size_t grid_size = 100;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  std::string method = "proposed";
  std::string kernel = "epanechnikov";
  std::string resample = "target";
  double censoring_mean = 10.0 / 3.0;
  std::size_t selector_reps = 0;
  std::size_t boot = 200;
  std::string selector_out;
  std::string out;
};

struct ReduceArgs {
  std::string data;
  std::optional<double> x;
  std::optional<double> h;
  std::string kernel = "epanechnikov";
  double tolerance = 1e-12;
  std::string out;
};

namespace detail {

inline std::string join(const std::vector<std::string>& args) {
  std::string s;
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? " " : "") + args[i];
  return s;
}

inline std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

inline bool mentions_flag(const std::vector<std::string>& args, const std::string& name) {
  const std::string flag = "--" + name;
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.starts_with(flag + "=");
  });
}

// Expands `--config FILE` into explicit flags for keys the command line does
// not already set.
inline std::vector<std::string> apply_config(std::vector<std::string> args, CLI::App& app) {
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].starts_with("--config=")) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!config) return args;
  if (args.empty()) throw CLI::CallForHelp();
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args.front());
  } catch (const CLI::OptionNotFound&) {
    throw CLI::ValidationError("--config", "a subcommand must precede the config file");
  }
  for (const auto& [key, value] : parse_config(*config)) {
    if (mentions_flag(args, key)) continue;
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw CLI::ValidationError("--config", "unknown key '" + key + "'");
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value.empty()) args.push_back("--" + key);
    } else {
      args.push_back("--" + key + "=" + value);
    }
  }
  return args;
}

inline void emit_rows(const std::string& path, std::ostream& out, const Metadata& meta,
                      std::string_view header, const std::vector<std::vector<std::string>>& rows) {
  if (path.empty()) {
    write_table(out, meta, header, rows);
  } else {
    emit_table(path, meta, header, rows);
  }
}

inline std::vector<double> time_grid_for(const EstimateArgs& a, const OrderedSample& sample) {
  if (!a.times.empty()) {
    for (double t : a.times) {
      if (!(t >= 0.0)) throw InvalidRange("evaluation times must be >= 0");
    }
    return a.times;
  }
  double t_max = a.t_max.value_or(0.0);
  if (!a.t_max) {
    for (const auto& r : sample) t_max = std::max(t_max, r.t);
  }
  if (!(t_max > 0.0)) throw InvalidRange("time grid upper bound must be positive");
  if (a.t_points < 2) throw InvalidRange("--t-points must be at least 2");
  return uniform_grid(0.0, t_max, a.t_points);
}

inline std::pair<double, double> default_grid_bounds(std::span<const double> xs, double h_min,
                                                     double h_max) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  const double range = *hi - *lo;
  if (!(h_max > 0.0)) h_max = range > 0.0 ? range : 1.0;
  if (!(h_min > 0.0)) h_min = h_max / 20.0;
  return {h_min, h_max};
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double max_abs_diff(const StepCurve& a, const StepCurve& b, std::span<const double> ts) {
  double d = std::abs(a.initial_value - b.initial_value);
  for (double t : ts) d = std::max(d, std::abs(a(t) - b(t)));
  return d;
}

// Every jump time of either curve plus zero: the step functions can only
// differ at these points.
inline std::vector<double> check_points(const OrderedSample& sample) {
  std::vector<double> ts{0.0};
  for (const auto& r : sample) ts.push_back(r.t);
  return ts;
}

}  // namespace detail

inline int run_estimate(const EstimateArgs& a, const std::string& command, std::ostream& out) {
  const auto file = parse_dataset(a.data);
  const OrderedSample sample(file.records);
  const Method method = parse_method(a.method);
  const KernelFamily family = parse_kernel_family(a.kernel);
  Metadata meta{{"command", command}, {"method", std::string(to_string(method))},
                {"seed", std::to_string(a.seed)}};

  StepCurve curve;
  if (method == Method::kKaplanMeier) {
    curve = survival_kaplan_meier(file.records);
  } else if (method == Method::kUnconditional) {
    curve = survival_unconditional_c(file.records);
  } else {
    if (!a.x) throw CLI::RequiredError("--x");
    const auto xs = sample.covariates();
    double h = 0.0;
    if (a.auto_bandwidth) {
      const auto [lo, hi] = detail::default_grid_bounds(xs, a.h_min, a.h_max);
      BandwidthSearch search;
      search.grid = default_grid(lo, hi, a.grid_size);
      search.replicates = a.boot;
      search.scheme = parse_resample_scheme(a.resample);
      h = select_bandwidth(sample, *a.x, search, family, a.seed).h_star;
    } else {
      if (!a.h) throw CLI::RequiredError("--h or --auto-bandwidth");
      h = *a.h;
    }
    curve = estimate_at(sample, KernelSpec(family, h), *a.x, method);
    meta.emplace_back("x", format_number(*a.x));
    meta.emplace_back("bandwidth", format_number(h));
    meta.emplace_back("kernel", std::string(to_string(family)));
    if (a.auto_bandwidth) meta.emplace_back("resample", a.resample);
  }
  const auto grid = detail::time_grid_for(a, sample);
  if (a.out.empty()) {
    write_curve(out, curve, grid);
  } else {
    emit_curve(curve, grid, a.out, meta);
  }
  return 0;
}

inline int run_bandwidth(const BandwidthArgs& a, const std::string& command, std::ostream& out) {
  const auto file = parse_dataset(a.data);
  const OrderedSample sample(file.records);
  const KernelFamily family = parse_kernel_family(a.kernel);
  const auto xs = sample.covariates();
  const auto [lo, hi] = detail::default_grid_bounds(xs, a.h_min, a.h_max);
  BandwidthSearch search;
  search.grid = default_grid(lo, hi, a.grid_size);
  search.replicates = a.boot;
  search.pilot = a.pilot;
  search.pilot_k = a.pilot_k;
  search.time_grid_size = a.time_points;
  search.scheme = parse_resample_scheme(a.resample);
  if (a.a || a.b) {
    if (!a.b) throw CLI::RequiredError("--b (with --a)");
    search.weight_bounds = std::pair{a.a.value_or(0.0), *a.b};
  }
  const auto choice = select_bandwidth(sample, a.x, search, family, a.seed);
  const auto& p = choice.profile;

  Metadata meta{{"command", command},
                {"seed", std::to_string(a.seed)},
                {"x", format_number(a.x)},
                {"kernel", std::string(to_string(family))},
                {"pilot", format_number(p.pilot)},
                {"a", format_number(p.a)},
                {"b", format_number(p.b)},
                {"replicates", std::to_string(search.replicates)},
                {"resample", to_string(search.scheme)},
                {"h_star", format_number(choice.h_star)}};
  std::vector<std::vector<std::string>> rows;
  for (std::size_t l = 0; l < p.bandwidths.size(); ++l) {
    rows.push_back({format_number(p.bandwidths[l]),
                    std::isfinite(p.mise_star[l]) ? format_number(p.mise_star[l]) : "inf"});
  }
  if (a.out.empty()) {
    detail::emit_rows("", out, meta, "h,mise_star", rows);
  } else {
    detail::emit_rows(a.out, out, meta, "h,mise_star", rows);
    out << "h_star=" << format_number(choice.h_star) << '\n';
  }
  return 0;
}

inline int run_simulate(const SimulateArgs& a, const std::string& command, std::ostream& out) {
  ScenarioSpec spec;
  spec.scenario_id = a.scenario;
  spec.n = a.n;
  spec.pi = a.pi;
  spec.censoring_mean = a.censoring_mean;
  spec.validate();
  if (a.xs.empty()) throw CLI::RequiredError("--x");
  CurveSource source = CurveSource::kProposed;
  if (a.method == "beran") {
    source = CurveSource::kBeran;
  } else if (a.method == "truth") {
    source = CurveSource::kTruth;
  } else if (a.method != "proposed") {
    throw CLI::ValidationError("--method", "expected proposed, beran or truth");
  }
  MonteCarloSettings mc;
  mc.kernel = parse_kernel_family(a.kernel);

  const double h_min = a.h_min.value_or(a.scenario == 1 ? 3.0 : 4.0);
  const double h_max = a.h_max.value_or(a.scenario == 1 ? 20.0 : 100.0);
  Metadata meta{{"command", command},
                {"seed", std::to_string(a.seed)},
                {"scenario", std::to_string(a.scenario)},
                {"n", std::to_string(a.n)},
                {"pi", format_number(a.pi)},
                {"method", a.method},
                {"kernel", std::string(to_string(mc.kernel))}};

  std::vector<std::vector<std::string>> rows;
  auto add = [&rows](const MiseReport& r) {
    rows.push_back({format_number(r.x), format_number(r.h), format_number(r.ibias2),
                    format_number(r.ivar), format_number(r.mise), std::to_string(r.replicates)});
  };
  if (a.scan) {
    const auto grid = default_grid(h_min, h_max, a.grid_size);
    for (double x : a.xs) {
      const auto scan = optimal_bandwidth_scan(spec, x, grid, a.replicates, source, a.seed, mc);
      for (const auto& r : scan.curve) add(r);
      meta.emplace_back("h_opt@" + format_number(x), format_number(scan.h_opt));
    }
  } else {
    if (!a.h) throw CLI::RequiredError("--h or --scan");
    for (double x : a.xs) add(mise_decompose(spec, x, *a.h, a.replicates, source, a.seed, mc));
  }
  detail::emit_rows(a.out, out, meta, "x,h,ibias2,ivar,mise,replicates", rows);

  if (a.selector_reps > 0) {
    BandwidthSearch search;
    search.grid = default_grid(h_min, h_max, a.grid_size);
    search.replicates = a.boot;
    search.scheme = parse_resample_scheme(a.resample);
    std::vector<std::vector<std::string>> picks;
    for (double x : a.xs) {
      const auto hs = bootstrap_bandwidth_study(spec, x, search, a.selector_reps, a.seed,
                                                mc.kernel);
      for (std::size_t r = 0; r < hs.size(); ++r) {
        picks.push_back({format_number(x), std::to_string(r), format_number(hs[r])});
      }
    }
    Metadata sel = meta;
    sel.emplace_back("bootstrap_replicates", std::to_string(a.boot));
    sel.emplace_back("resample", to_string(search.scheme));
    detail::emit_rows(a.selector_out, out, sel, "x,rep,h_star", picks);
  }
  return 0;
}

/// Checks every reduction of the proposed estimator that applies to the
/// dataset. Returns kCheckFailed when an applicable one does not hold.
inline int run_reduce_check(const ReduceArgs& a, const std::string& command, std::ostream& out) {
  const auto file = parse_dataset(a.data);
  const OrderedSample sample(file.records);
  const KernelFamily family = parse_kernel_family(a.kernel);
  const auto xs = sample.covariates();
  const double x = a.x.value_or(detail::median(xs));
  const double h = a.h ? *a.h : pilot_bandwidth(xs, x, default_pilot_k(xs.size()));
  const WeightVector w = nw_weights(KernelSpec(family, h), xs, x);
  const auto ts = detail::check_points(sample);

  const std::size_t cured = sample.count(Outcome::kCensoredCured);
  const std::size_t events = sample.count(Outcome::kEvent);
  bool threshold = cured > 0;
  if (threshold) {
    double max_other = -std::numeric_limits<double>::infinity();
    double min_cured = std::numeric_limits<double>::infinity();
    for (const auto& r : sample) {
      if (r.is_cured()) {
        min_cured = std::min(min_cured, r.t);
      } else {
        max_other = std::max(max_other, r.t);
      }
    }
    threshold = max_other < min_cured;
  }

  const StepCurve proposed = survival_c(sample, w);
  std::vector<std::vector<std::string>> rows;
  bool failed = false;
  auto check = [&](const std::string& name, bool applicable, auto&& diff) {
    if (!applicable) {
      rows.push_back({name, "no", "", "skipped"});
      return;
    }
    const double d = diff();
    const bool ok = d <= a.tolerance;
    failed = failed || !ok;
    rows.push_back({name, "yes", format_number(d), ok ? "pass" : "fail"});
  };
  check("no_cured_equals_beran", cured == 0,
        [&] { return detail::max_abs_diff(proposed, survival_beran(sample, w), ts); });
  check("cure_threshold_equals_beran", threshold,
        [&] { return detail::max_abs_diff(proposed, survival_beran(sample, w), ts); });
  check("uncensored_equals_kernel", events == sample.size(), [&] {
    return detail::max_abs_diff(proposed, survival_kernel_nocensor(sample, w), ts);
  });
  check("uniform_weights_equal_unconditional", true, [&] {
    WeightVector u;
    u.x = x;
    u.values.assign(sample.size(), 1.0 / static_cast<double>(sample.size()));
    return detail::max_abs_diff(survival_c(sample, u), survival_unconditional_c(file.records),
                                ts);
  });
  check("unconditional_equals_kaplan_meier", cured == 0, [&] {
    return detail::max_abs_diff(survival_unconditional_c(file.records),
                                survival_kaplan_meier(file.records), ts);
  });

  Metadata meta{{"command", command},
                {"seed", "0"},
                {"x", format_number(x)},
                {"bandwidth", format_number(h)},
                {"kernel", std::string(to_string(family))},
                {"tolerance", format_number(a.tolerance)}};
  detail::emit_rows(a.out, out, meta, "reduction,applicable,max_abs_diff,status", rows);
  return failed ? static_cast<int>(ErrorCode::kCheckFailed) : 0;
}

/// Parses argv and runs one subcommand. Returns the process exit status;
/// diagnostics go to `err`.
inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  CLI::App app{"Conditional survival estimation with partially known cure status", "curepl"};
  // Only the long help flag: "-h" would collide with the --h bandwidth option.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate a conditional survival curve");
  estimate->add_option("--data", est.data, "Input CSV (x,time,status)")->required();
  estimate->add_option("--x", est.x, "Covariate value");
  estimate->add_option("--h", est.h, "Bandwidth");
  estimate->add_flag("--auto-bandwidth", est.auto_bandwidth, "Select h by bootstrap");
  estimate->add_option("--kernel", est.kernel, "epanechnikov | uniform");
  estimate->add_option("--resample", est.resample, "Bootstrap resampling: target | local");
  estimate->add_option("--method", est.method, "proposed | beran | km | unconditional");
  estimate->add_option("--times", est.times, "Evaluation times")->delimiter(',');
  estimate->add_option("--t-max", est.t_max, "Grid upper bound (default: max time)");
  estimate->add_option("--t-points", est.t_points, "Grid size");
  estimate->add_option("--h-min", est.h_min, "Bootstrap grid lower bound");
  estimate->add_option("--h-max", est.h_max, "Bootstrap grid upper bound");
  estimate->add_option("--L", est.grid_size, "Bootstrap grid size");
  estimate->add_option("--B", est.boot, "Bootstrap resamples");
  estimate->add_option("--seed", est.seed, "Random seed");
  estimate->add_option("--out", est.out, "Output CSV (metadata in OUT.meta)");

  BandwidthArgs bw;
  auto* bandwidth = app.add_subcommand("bandwidth", "Bootstrap bandwidth selection");
  bandwidth->add_option("--data", bw.data, "Input CSV")->required();
  bandwidth->add_option("--x", bw.x, "Covariate value")->required();
  bandwidth->add_option("--h-min", bw.h_min, "Smallest grid bandwidth");
  bandwidth->add_option("--h-max", bw.h_max, "Largest grid bandwidth");
  bandwidth->add_option("--L", bw.grid_size, "Grid size");
  bandwidth->add_option("--B", bw.boot, "Bootstrap resamples");
  bandwidth->add_option("--seed", bw.seed, "Random seed");
  bandwidth->add_option("--kernel", bw.kernel, "epanechnikov | uniform");
  bandwidth->add_option("--resample", bw.resample, "Bootstrap resampling: target | local");
  bandwidth->add_option("--pilot", bw.pilot, "Pilot bandwidth (default: nearest-neighbour rule)");
  bandwidth->add_option("--pilot-k", bw.pilot_k, "Neighbour rank for the pilot (default n/4)");
  bandwidth->add_option("--a", bw.a, "Integration window start");
  bandwidth->add_option("--b", bw.b, "Integration window end");
  bandwidth->add_option("--time-points", bw.time_points, "Quadrature nodes");
  bandwidth->add_option("--out", bw.out, "Output CSV");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo MISE study");
  simulate->add_option("--scenario", sim.scenario, "1 or 2")->required();
  simulate->add_option("--n", sim.n, "Sample size");
  simulate->add_option("--pi", sim.pi, "Probability a cured subject is identified");
  simulate->add_option("--x", sim.xs, "Covariate values")->delimiter(',')->required();
  simulate->add_option("--h", sim.h, "Bandwidth");
  simulate->add_flag("--scan", sim.scan, "Scan a log-spaced bandwidth grid");
  simulate->add_option("--h-min", sim.h_min, "Grid lower bound");
  simulate->add_option("--h-max", sim.h_max, "Grid upper bound");
  simulate->add_option("--L", sim.grid_size, "Grid size");
  simulate->add_option("--replicates", sim.replicates, "Monte Carlo datasets");
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--method", sim.method, "proposed | beran | truth");
  simulate->add_option("--kernel", sim.kernel, "epanechnikov | uniform");
  simulate->add_option("--resample", sim.resample, "Bootstrap resampling: target | local");
  simulate->add_option("--censoring-mean", sim.censoring_mean, "Mean censoring time");
  simulate->add_option("--selector-reps", sim.selector_reps,
                       "Datasets on which to run the bootstrap selector");
  simulate->add_option("--B", sim.boot, "Bootstrap resamples for the selector");
  simulate->add_option("--selector-out", sim.selector_out, "Output CSV for selected bandwidths");
  simulate->add_option("--out", sim.out, "Output CSV");

  ReduceArgs red;
  auto* reduce = app.add_subcommand("reduce-check", "Verify estimator reductions on a dataset");
  reduce->add_option("--data", red.data, "Input CSV")->required();
  reduce->add_option("--x", red.x, "Covariate value (default: median)");
  reduce->add_option("--h", red.h, "Bandwidth (default: pilot rule)");
  reduce->add_option("--kernel", red.kernel, "epanechnikov | uniform");
  reduce->add_option("--tolerance", red.tolerance, "Maximum allowed difference");
  reduce->add_option("--out", red.out, "Output CSV");

  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  std::string command;
  try {
    args = detail::apply_config(std::move(args), app);
    command = "curepl " + detail::join(args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorCode::kUsage);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  }

  try {
    if (estimate->parsed()) return run_estimate(est, command, out);
    if (bandwidth->parsed()) return run_bandwidth(bw, command, out);
    if (simulate->parsed()) return run_simulate(sim, command, out);
    if (reduce->parsed()) {
      const int rc = run_reduce_check(red, command, out);
      if (rc != 0) err << "error: a reduction check failed\n";
      return rc;
    }
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorCode::kUsage);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorCode::kUsage);
  }
  return static_cast<int>(ErrorCode::kUsage);
}

}  // namespace curepl::cli
