#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "curepl/errors.hpp"
#include "curepl/estimators.hpp"
#include "curepl/kernel.hpp"
#include "curepl/parallel.hpp"
#include "curepl/quadrature.hpp"
#include "curepl/random.hpp"
#include "curepl/sample.hpp"

// Bootstrap bandwidth selection for the proposed estimator at a fixed
// covariate value. Resamples keep the original covariates and draw the
// (time, outcome) pairs from the pilot-weighted empirical distribution; the
// selected bandwidth minimizes the bootstrap integrated squared error
// against the pilot estimate.

namespace curepl {

/// L bandwidths equispaced on a log scale; endpoints are returned exactly.
inline std::vector<double> default_grid(double h_min, double h_max, std::size_t L) {
  if (!(h_min > 0.0) || !(h_max > h_min) || !std::isfinite(h_max) || L < 2) {
    throw InvalidRange("bandwidth grid needs 0 < h_min < h_max and L >= 2");
  }
  std::vector<double> grid(L);
  const double lo = std::log(h_min);
  const double step = (std::log(h_max) - lo) / static_cast<double>(L - 1);
  for (std::size_t l = 0; l < L; ++l) {
    grid[l] = std::exp(lo + step * static_cast<double>(l));
  }
  grid.front() = h_min;
  grid.back() = h_max;
  return grid;
}

/// Local pilot bandwidth from the k-th nearest neighbours on each side of x:
/// ((d_k+ + d_k-) / 2) * 100^(1/9) * n^(-1/9). A side with fewer than k
/// neighbours borrows the distance of the other side. Points equal to x
/// belong to neither side.
inline double pilot_bandwidth(std::span<const double> xs, double x, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  std::vector<double> right;
  std::vector<double> left;
  for (double v : xs) {
    if (v > x) right.push_back(v - x);
    if (v < x) left.push_back(x - v);
  }
  auto kth = [k](std::vector<double>& d) -> std::optional<double> {
    if (d.size() < k) return std::nullopt;
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
    return d[k - 1];
  };
  auto d_plus = kth(right);
  auto d_minus = kth(left);
  if (!d_plus && !d_minus) {
    throw InsufficientNeighbors("fewer than " + std::to_string(k) +
                                " neighbours on both sides of x = " + std::to_string(x));
  }
  if (!d_plus) d_plus = d_minus;
  if (!d_minus) d_minus = d_plus;
  const double n = static_cast<double>(xs.size());
  return 0.5 * (*d_plus + *d_minus) * std::pow(100.0, 1.0 / 9.0) * std::pow(n, -1.0 / 9.0);
}

/// Default neighbour rank for the pilot bandwidth: floor(n / 4), at least 1.
inline std::size_t default_pilot_k(std::size_t n) { return std::max<std::size_t>(1, n / 4); }

/// One bootstrap resample. Record i keeps covariate sample[i].x and copies
/// (t, outcome) of record j, where j is drawn with probability
/// pilot_weights[j]. Weights must be aligned with the sample order.
inline std::vector<SurvivalRecord> resample_conditional(const OrderedSample& sample,
                                                        const WeightVector& pilot_weights,
                                                        Rng& rng) {
  if (pilot_weights.size() != sample.size()) {
    throw std::invalid_argument("pilot weights not aligned with sample");
  }
  double total = 0.0;
  for (double w : pilot_weights.values) total += w;
  if (!(total > 0.0)) throw DegenerateWeights("pilot weights have no mass");
  const DiscreteSampler draw(pilot_weights.values);
  std::vector<SurvivalRecord> out(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& src = sample[draw(rng)];
    out[i] = SurvivalRecord{sample[i].x, src.t, src.outcome};
  }
  return out;
}

/// How resampled (t, outcome) tuples are drawn.
///  kTarget: every record from the pilot conditional law at the target x.
///  kLocal:  record i from the pilot conditional law at its own X_i, which
///           keeps covariate dependence (and hence smoothing bias) in the
///           bootstrap world.
enum class ResampleScheme { kTarget, kLocal };

inline std::string to_string(ResampleScheme s) {
  return s == ResampleScheme::kTarget ? "target" : "local";
}

inline ResampleScheme parse_resample_scheme(std::string_view name) {
  if (name == "target") return ResampleScheme::kTarget;
  if (name == "local") return ResampleScheme::kLocal;
  throw std::invalid_argument("unknown resample scheme: " + std::string(name));
}

/// Local resample: record i copies (t, outcome) of record j drawn from
/// samplers[i]. One sampler per record, aligned with the sample order.
inline std::vector<SurvivalRecord> resample_local(const OrderedSample& sample,
                                                  const std::vector<DiscreteSampler>& samplers,
                                                  Rng& rng) {
  if (samplers.size() != sample.size()) {
    throw std::invalid_argument("samplers not aligned with sample");
  }
  std::vector<SurvivalRecord> out(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& src = sample[samplers[i](rng)];
    out[i] = SurvivalRecord{sample[i].x, src.t, src.outcome};
  }
  return out;
}

struct BandwidthSearch {
  std::vector<double> grid;        // strictly increasing, positive
  std::size_t replicates = 100;    // B
  std::optional<double> pilot;     // g_x; nearest-neighbour rule when empty
  std::optional<std::size_t> pilot_k;
  // Integration window [a_x, b_x]; defaults to [0, largest event time].
  std::optional<std::pair<double, double>> weight_bounds;
  std::size_t time_grid_size = 100;
  ResampleScheme scheme = ResampleScheme::kTarget;

  void validate() const {
    if (grid.size() < 2) throw InvalidRange("bandwidth grid needs at least 2 entries");
    for (std::size_t l = 0; l < grid.size(); ++l) {
      if (!(grid[l] > 0.0) || !std::isfinite(grid[l])) {
        throw InvalidRange("bandwidths must be positive and finite");
      }
      if (l > 0 && !(grid[l] > grid[l - 1])) {
        throw InvalidRange("bandwidth grid must be strictly increasing");
      }
    }
    if (replicates < 1) throw InvalidRange("at least one bootstrap replicate is required");
    if (pilot && !(*pilot > 0.0)) throw InvalidRange("pilot bandwidth must be positive");
    if (weight_bounds && !(weight_bounds->first >= 0.0 &&
                           weight_bounds->second > weight_bounds->first)) {
      throw InvalidRange("weight bounds need 0 <= a < b");
    }
    if (time_grid_size < 2) throw InvalidRange("time grid needs at least 2 points");
  }
};

struct MiseProfile {
  std::vector<double> bandwidths;
  std::vector<double> mise_star;  // +inf where every resample was degenerate
  std::vector<std::size_t> used_replicates;
  std::size_t argmin_index = 0;
  double pilot = 0.0;
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const MiseProfile&, const MiseProfile&) = default;
};

/// Index of the smallest finite value; ties go to the lowest index.
inline std::size_t argmin_first(std::span<const double> values) {
  std::size_t best = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    if (best == values.size() || values[i] < values[best]) best = i;
  }
  if (best == values.size()) {
    throw DegenerateWeights("every candidate bandwidth is degenerate at x");
  }
  return best;
}

namespace detail {

inline std::pair<double, double> resolve_bounds(const OrderedSample& sample,
                                                const BandwidthSearch& search) {
  if (search.weight_bounds) return *search.weight_bounds;
  double t_max = 0.0;
  for (const auto& r : sample) {
    if (r.is_event()) t_max = std::max(t_max, r.t);
  }
  if (!(t_max > 0.0)) {
    for (const auto& r : sample) t_max = std::max(t_max, r.t);
  }
  if (!(t_max > 0.0)) throw InvalidRange("cannot derive weight bounds: all times are zero");
  return {0.0, t_max};
}

}  // namespace detail

/// Bootstrap MISE of the proposed estimator over the bandwidth grid.
/// Replicate b draws from substream (seed, b), so the profile is identical
/// for any thread count.
inline MiseProfile bootstrap_mise(const OrderedSample& sample, double x,
                                  const BandwidthSearch& search, KernelFamily family,
                                  std::uint64_t seed, unsigned threads = thread_count()) {
  search.validate();
  const auto xs = sample.covariates();
  const std::size_t L = search.grid.size();
  const std::size_t B = search.replicates;

  MiseProfile profile;
  profile.bandwidths = search.grid;
  profile.pilot = search.pilot ? *search.pilot
                               : pilot_bandwidth(xs, x, search.pilot_k.value_or(
                                                            default_pilot_k(xs.size())));
  std::tie(profile.a, profile.b) = detail::resolve_bounds(sample, search);

  const auto times = uniform_grid(profile.a, profile.b, search.time_grid_size);
  const double step = (profile.b - profile.a) / static_cast<double>(times.size() - 1);

  const WeightVector pilot_w = nw_weights(KernelSpec(family, profile.pilot), xs, x);
  const auto reference = evaluate(survival_c(sample, pilot_w), times);

  // Local scheme: X_i is always inside its own kernel support, so these
  // weights are never degenerate.
  std::vector<DiscreteSampler> local;
  if (search.scheme == ResampleScheme::kLocal) {
    local.reserve(xs.size());
    for (double xi : xs) local.emplace_back(nw_weights(KernelSpec(family, profile.pilot), xs, xi).values);
  }

  // cells[b * L + l]; NaN marks a degenerate cell.
  std::vector<double> cells(B * L, std::numeric_limits<double>::quiet_NaN());
  parallel_for(B, [&](std::size_t b) {
    Rng rng(substream_seed(seed, b));
    const OrderedSample boot(search.scheme == ResampleScheme::kLocal
                                 ? resample_local(sample, local, rng)
                                 : resample_conditional(sample, pilot_w, rng));
    const auto boot_xs = boot.covariates();
    std::vector<double> sq(times.size());
    for (std::size_t l = 0; l < L; ++l) {
      WeightVector w;
      try {
        w = nw_weights(KernelSpec(family, search.grid[l]), boot_xs, x);
      } catch (const DegenerateWeights&) {
        continue;
      }
      const StepCurve curve = survival_c(boot, w);
      for (std::size_t k = 0; k < times.size(); ++k) {
        const double d = curve(times[k]) - reference[k];
        sq[k] = d * d;
      }
      cells[b * L + l] = trapezoid(sq, step);
    }
  }, threads);

  profile.mise_star.assign(L, std::numeric_limits<double>::infinity());
  profile.used_replicates.assign(L, 0);
  for (std::size_t l = 0; l < L; ++l) {
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t b = 0; b < B; ++b) {
      const double c = cells[b * L + l];
      if (std::isnan(c)) continue;
      acc += c;
      ++used;
    }
    profile.used_replicates[l] = used;
    if (used > 0) profile.mise_star[l] = acc / static_cast<double>(used);
  }
  profile.argmin_index = argmin_first(profile.mise_star);
  return profile;
}

struct BandwidthChoice {
  double h_star = 0.0;
  MiseProfile profile;
};

inline BandwidthChoice select_bandwidth(const OrderedSample& sample, double x,
                                        const BandwidthSearch& search, KernelFamily family,
                                        std::uint64_t seed, unsigned threads = thread_count()) {
  BandwidthChoice choice;
  choice.profile = bootstrap_mise(sample, x, search, family, seed, threads);
  choice.h_star = choice.profile.bandwidths[choice.profile.argmin_index];
  return choice;
}

}  // namespace curepl
