#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "curepl/bandwidth.hpp"
#include "curepl/errors.hpp"
#include "curepl/estimators.hpp"
#include "curepl/kernel.hpp"
#include "curepl/parallel.hpp"
#include "curepl/quadrature.hpp"
#include "curepl/random.hpp"
#include "curepl/sample.hpp"

// Monte Carlo design with a truncated-exponential latency, a covariate
// dependent cure rate (logistic in scenario 1, cubic in scenario 2),
// exponential censoring and a uniform covariate.

namespace curepl {

/// Latency support ends here: S0(t | x) = 0 for t >= kLatencyEnd.
inline constexpr double kLatencyEnd = 4.605;

inline double latency_rate(double x) { return std::exp((x + 20.0) / 40.0); }

/// Survival of the uncured subpopulation.
inline double latency_s0(double t, double x) {
  if (t <= 0.0) return 1.0;
  if (t >= kLatencyEnd) return 0.0;
  const double a = latency_rate(x);
  const double tail = std::exp(-a * kLatencyEnd);
  return (std::exp(-a * t) - tail) / (1.0 - tail);
}

/// Inverse of latency_s0 on (0, 1]: the t with S0(t | x) = s.
inline double latency_quantile(double s, double x) {
  const double a = latency_rate(x);
  const double tail = std::exp(-a * kLatencyEnd);
  return -std::log(s * (1.0 - tail) + tail) / a;
}

/// 90th percentile of the latency distribution, S0(tau | x) = 0.1.
inline double tau_x(double x) { return latency_quantile(0.1, x); }

/// Probability of being cured, 1 - p(x).
inline double cure_rate(int scenario_id, double x) {
  double value = 0.0;
  switch (scenario_id) {
    case 1: {
      const double eta = 0.476 + 0.358 * x;
      value = 1.0 - std::exp(eta) / (1.0 + std::exp(eta));
      break;
    }
    case 2:
      value = 0.5 - x * x * x / 16000.0;
      break;
    default:
      throw std::invalid_argument("scenario must be 1 or 2");
  }
  if (!(value >= 0.0 && value <= 1.0)) {
    throw OutOfRange("cure rate " + std::to_string(value) + " outside [0, 1] at x = " +
                     std::to_string(x));
  }
  return value;
}

/// True conditional survival S(t | x) = 1 - p(x) + p(x) S0(t | x).
struct TruthOracle {
  int scenario_id = 1;

  double s0(double t, double x) const { return latency_s0(t, x); }
  double uncure(double x) const { return 1.0 - cure_rate(scenario_id, x); }
  double survival(double t, double x) const {
    const double p = uncure(x);
    return 1.0 - p + p * latency_s0(t, x);
  }
  double tau(double x) const { return tau_x(x); }
};

struct ScenarioSpec {
  int scenario_id = 1;
  double pi = 0.8;  // probability that a cured, censored subject is labelled cured
  std::size_t n = 100;
  double censoring_mean = 10.0 / 3.0;
  double x_lo = -20.0;
  double x_hi = 20.0;

  void validate() const {
    if (scenario_id != 1 && scenario_id != 2) throw InvalidRange("scenario must be 1 or 2");
    if (!(pi >= 0.0 && pi <= 1.0)) throw InvalidRange("pi must lie in [0, 1]");
    if (n == 0) throw InvalidRange("sample size must be positive");
    if (!(censoring_mean > 0.0)) throw InvalidRange("censoring mean must be positive");
    if (!(x_hi > x_lo)) throw InvalidRange("covariate range is empty");
  }
};

/// One simulated dataset. Per record the draws are, in order: covariate,
/// cure indicator, latency (uncured only), censoring time, and the cure
/// label (cured only).
inline std::vector<SurvivalRecord> draw_dataset(const ScenarioSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<SurvivalRecord> out;
  out.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    SurvivalRecord r;
    r.x = rng.uniform(spec.x_lo, spec.x_hi);
    const bool cured = rng.bernoulli(cure_rate(spec.scenario_id, r.x));
    double y = 0.0;
    if (!cured) y = latency_quantile(rng.uniform_open0(), r.x);
    const double c = rng.exponential(spec.censoring_mean);
    if (!cured && y <= c) {
      r.t = y;
      r.outcome = Outcome::kEvent;
    } else {
      r.t = c;
      r.outcome = cured && rng.bernoulli(spec.pi) ? Outcome::kCensoredCured
                                                  : Outcome::kCensoredUnknown;
    }
    out.push_back(r);
  }
  return out;
}

enum class CurveSource { kProposed, kBeran, kTruth };

inline std::string_view to_string(CurveSource s) {
  switch (s) {
    case CurveSource::kProposed:
      return "proposed";
    case CurveSource::kBeran:
      return "beran";
    case CurveSource::kTruth:
      return "truth";
  }
  return "unknown";
}

struct MiseReport {
  double x = 0.0;
  double h = 0.0;
  double ibias2 = 0.0;
  double ivar = 0.0;
  double mise = 0.0;
  std::size_t replicates = 0;  // replicates that entered the averages
  std::size_t dropped = 0;     // replicates with no data within h of x
};

struct MonteCarloSettings {
  KernelFamily kernel = KernelFamily::kEpanechnikov;
  std::size_t time_grid_size = 100;
  unsigned threads = thread_count();
};

// Dataset r of a campaign is drawn from this substream, whatever the
// bandwidth or estimator, so estimators are compared on common data.
inline std::uint64_t dataset_seed(std::uint64_t seed, std::uint64_t r) {
  return substream_seed(seed, r, 1);
}

/// Integrated squared bias, variance and MISE over [0, tau_x] from R
/// independent datasets. The variance uses divisor R so that
/// mise = ibias2 + ivar holds on the common sample.
inline MiseReport mise_decompose(const ScenarioSpec& spec, double x, double h,
                                 std::size_t replicates, CurveSource source,
                                 std::uint64_t seed, const MonteCarloSettings& mc = {}) {
  spec.validate();
  if (replicates < 2) throw InvalidRange("at least two replicates are required");
  const TruthOracle truth{spec.scenario_id};
  const auto times = uniform_grid(0.0, truth.tau(x), mc.time_grid_size);
  const double step = times[1] - times[0];
  const std::size_t m = times.size();

  std::vector<double> target(m);
  for (std::size_t k = 0; k < m; ++k) target[k] = truth.survival(times[k], x);

  std::vector<double> values(replicates * m);
  std::vector<char> ok(replicates, 0);
  const KernelSpec kernel(mc.kernel, h);
  parallel_for(replicates, [&](std::size_t r) {
    double* row = values.data() + r * m;
    if (source == CurveSource::kTruth) {
      std::copy(target.begin(), target.end(), row);
      ok[r] = 1;
      return;
    }
    Rng rng(dataset_seed(seed, r));
    const OrderedSample sample(draw_dataset(spec, rng));
    StepCurve curve;
    try {
      curve = estimate_at(sample, kernel, x,
                          source == CurveSource::kProposed ? Method::kProposed : Method::kBeran);
    } catch (const DegenerateWeights&) {
      return;
    }
    for (std::size_t k = 0; k < m; ++k) row[k] = curve(times[k]);
    ok[r] = 1;
  }, mc.threads);

  MiseReport rep;
  rep.x = x;
  rep.h = h;
  for (char flag : ok) flag ? ++rep.replicates : ++rep.dropped;
  if (rep.replicates < 2) {
    throw DegenerateWeights("fewer than two usable replicates at x = " + std::to_string(x) +
                            ", h = " + std::to_string(h));
  }
  const double used = static_cast<double>(rep.replicates);
  std::vector<double> bias2(m, 0.0), var(m, 0.0), mse(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double mean = 0.0;
    for (std::size_t r = 0; r < replicates; ++r) {
      if (ok[r]) mean += values[r * m + k];
    }
    mean /= used;
    double v = 0.0;
    double e = 0.0;
    for (std::size_t r = 0; r < replicates; ++r) {
      if (!ok[r]) continue;
      const double s = values[r * m + k];
      v += (s - mean) * (s - mean);
      e += (s - target[k]) * (s - target[k]);
    }
    bias2[k] = (mean - target[k]) * (mean - target[k]);
    var[k] = v / used;
    mse[k] = e / used;
  }
  rep.ibias2 = trapezoid(bias2, step);
  rep.ivar = trapezoid(var, step);
  rep.mise = trapezoid(mse, step);
  return rep;
}

struct BandwidthScan {
  double h_opt = 0.0;
  std::size_t opt_index = 0;
  std::vector<MiseReport> curve;  // one report per grid bandwidth
};

/// Monte Carlo MISE over a bandwidth grid and its minimizer (smallest
/// bandwidth on ties). Every grid point sees the same datasets.
inline BandwidthScan optimal_bandwidth_scan(const ScenarioSpec& spec, double x,
                                            std::span<const double> grid,
                                            std::size_t replicates, CurveSource source,
                                            std::uint64_t seed,
                                            const MonteCarloSettings& mc = {}) {
  if (grid.empty()) throw InvalidRange("empty bandwidth grid");
  BandwidthScan scan;
  std::vector<double> mise(grid.size(), std::numeric_limits<double>::infinity());
  for (std::size_t l = 0; l < grid.size(); ++l) {
    try {
      scan.curve.push_back(mise_decompose(spec, x, grid[l], replicates, source, seed, mc));
      mise[l] = scan.curve.back().mise;
    } catch (const DegenerateWeights&) {
      MiseReport empty;
      empty.x = x;
      empty.h = grid[l];
      empty.ibias2 = empty.ivar = empty.mise = std::numeric_limits<double>::infinity();
      empty.dropped = replicates;
      scan.curve.push_back(empty);
    }
  }
  scan.opt_index = argmin_first(mise);
  scan.h_opt = grid[scan.opt_index];
  return scan;
}

/// Bootstrap-selected bandwidths on `repetitions` simulated datasets, with
/// the integration window [0, tau_x]. Repetition r uses dataset r of the
/// campaign seed.
inline std::vector<double> bootstrap_bandwidth_study(const ScenarioSpec& spec, double x,
                                                     BandwidthSearch search,
                                                     std::size_t repetitions,
                                                     std::uint64_t seed,
                                                     KernelFamily kernel =
                                                         KernelFamily::kEpanechnikov,
                                                     unsigned threads = thread_count()) {
  spec.validate();
  search.weight_bounds = std::pair{0.0, tau_x(x)};
  std::vector<double> chosen(repetitions, 0.0);
  parallel_for(repetitions, [&](std::size_t r) {
    Rng rng(dataset_seed(seed, r));
    const OrderedSample sample(draw_dataset(spec, rng));
    chosen[r] = select_bandwidth(sample, x, search, kernel, substream_seed(seed, r, 2), 1).h_star;
  }, threads);
  return chosen;
}

}  // namespace curepl
