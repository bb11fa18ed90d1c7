#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "curepl/kernel.hpp"
#include "curepl/sample.hpp"

// Product-limit estimators of the conditional survival function for
// right-censored data where some censored subjects are known to be cured.
//
// All weighted estimators take an OrderedSample and a WeightVector aligned
// with the sample order (weights[i] belongs to sample[i]). Curves jump only
// at event times. Tied event times are merged into one jump whose hazard
// increment is (sum of tied event weights) / (risk mass just before t); the
// resulting survival factor equals the product of the per-record factors
// under the event-first tie order.

namespace curepl {

namespace detail {

inline void check_aligned(const OrderedSample& sample, const WeightVector& w) {
  if (w.size() != sample.size()) {
    throw std::invalid_argument("weight vector not aligned with sample");
  }
}

struct ProductLimit {
  StepCurve hazard;
  StepCurve survival;
};

// Shared driver for the proposed estimator (retain_cured = true) and
// Beran's estimator (retain_cured = false).
//
// Risk mass before a group starting at index s:
//   sum_{j >= s} w_j  +  sum_{j < s} w_j 1(cured_j)      (second term only
//   when retain_cured). The survival factor is computed as
//   (risk - events) / risk with the numerator assembled from its own terms,
//   so a fully exhausted risk set yields exactly zero.
inline ProductLimit product_limit(const OrderedSample& sample,
                                  std::span<const double> w, bool retain_cured) {
  const std::size_t n = sample.size();
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + w[i];

  ProductLimit out;
  out.hazard.initial_value = 0.0;
  out.survival.initial_value = 1.0;
  double cum_hazard = 0.0;
  double surv = 1.0;
  double cured_before = 0.0;

  std::size_t s = 0;
  while (s < n) {
    const double t = sample[s].t;
    std::size_t e = s;
    double events = 0.0;
    double others = 0.0;
    double cured_here = 0.0;
    while (e < n && sample[e].t == t) {
      if (sample[e].is_event()) {
        events += w[e];
      } else {
        others += w[e];
        if (sample[e].is_cured()) cured_here += w[e];
      }
      ++e;
    }
    if (events > 0.0) {
      const double retained = retain_cured ? cured_before : 0.0;
      const double risk = tail[s] + retained;
      const double remaining = others + tail[e] + retained;
      cum_hazard += events / risk;
      surv *= remaining / risk;
      out.hazard.jump_times.push_back(t);
      out.hazard.values.push_back(cum_hazard);
      out.survival.jump_times.push_back(t);
      out.survival.values.push_back(surv);
    }
    cured_before += cured_here;
    s = e;
  }
  return out;
}

}  // namespace detail

/// Weighted subdistribution of observed events: sum_i w_i 1(t_i <= t, event).
inline double subdist_h1(const OrderedSample& sample, const WeightVector& w,
                         double t) {
  detail::check_aligned(sample, w);
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.size() && sample[i].t <= t; ++i) {
    if (sample[i].is_event()) acc += w[i];
  }
  return acc;
}

/// Weighted risk mass just before t: records still under observation plus
/// records already known to be cured.
inline double risk_j(const OrderedSample& sample, const WeightVector& w,
                     double t) {
  detail::check_aligned(sample, w);
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample[i].t >= t || sample[i].is_cured()) acc += w[i];
  }
  return acc;
}

/// Conditional cumulative hazard with known-cured subjects kept at risk.
inline StepCurve cumulative_hazard_c(const OrderedSample& sample,
                                     const WeightVector& w) {
  detail::check_aligned(sample, w);
  return detail::product_limit(sample, w.values, true).hazard;
}

/// Proposed product-limit estimator of the conditional survival function.
inline StepCurve survival_c(const OrderedSample& sample, const WeightVector& w) {
  detail::check_aligned(sample, w);
  return detail::product_limit(sample, w.values, true).survival;
}

/// Beran's conditional product-limit estimator; cure labels are ignored.
inline StepCurve survival_beran(const OrderedSample& sample,
                                const WeightVector& w) {
  detail::check_aligned(sample, w);
  return detail::product_limit(sample, w.values, false).survival;
}

/// Kernel estimator of the conditional survival function for uncensored
/// samples: sum_i w_i 1(t_i > t).
inline StepCurve survival_kernel_nocensor(const OrderedSample& sample,
                                          const WeightVector& w) {
  detail::check_aligned(sample, w);
  const std::size_t n = sample.size();
  for (const auto& r : sample) {
    if (!r.is_event()) throw ContainsCensoring();
  }
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + w[i];

  StepCurve curve;
  curve.initial_value = tail[0];
  std::size_t s = 0;
  while (s < n) {
    std::size_t e = s;
    double mass = 0.0;
    while (e < n && sample[e].t == sample[s].t) mass += w[e++];
    if (mass > 0.0) {
      curve.jump_times.push_back(sample[s].t);
      curve.values.push_back(tail[e]);
    }
    s = e;
  }
  return curve;
}

namespace detail {

// Unweighted product-limit estimator on counts.
inline StepCurve counting_product_limit(std::vector<SurvivalRecord> records,
                                        bool retain_cured) {
  const OrderedSample sample(std::move(records));
  const std::size_t n = sample.size();
  StepCurve curve = StepCurve::constant(1.0);
  double surv = 1.0;
  std::size_t cured_before = 0;
  std::size_t s = 0;
  while (s < n) {
    std::size_t e = s;
    std::size_t deaths = 0;
    std::size_t cured_here = 0;
    while (e < n && sample[e].t == sample[s].t) {
      if (sample[e].is_event()) ++deaths;
      if (sample[e].is_cured()) ++cured_here;
      ++e;
    }
    if (deaths > 0) {
      const std::size_t risk = (n - s) + (retain_cured ? cured_before : 0);
      surv *= static_cast<double>(risk - deaths) / static_cast<double>(risk);
      curve.jump_times.push_back(sample[s].t);
      curve.values.push_back(surv);
    }
    cured_before += cured_here;
    s = e;
  }
  return curve;
}

}  // namespace detail

/// Unconditional version of the proposed estimator: risk set of size
/// n - i + 1 plus the number of known-cured subjects observed earlier.
inline StepCurve survival_unconditional_c(std::vector<SurvivalRecord> records) {
  if (records.empty()) throw EmptySample();
  return detail::counting_product_limit(std::move(records), true);
}

/// Kaplan-Meier estimator; known-cured records count as ordinary censoring.
inline StepCurve survival_kaplan_meier(std::vector<SurvivalRecord> records) {
  if (records.empty()) throw EmptySample();
  return detail::counting_product_limit(std::move(records), false);
}

enum class Method { kProposed, kBeran, kKaplanMeier, kUnconditional };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::kProposed:
      return "proposed";
    case Method::kBeran:
      return "beran";
    case Method::kKaplanMeier:
      return "km";
    case Method::kUnconditional:
      return "unconditional";
  }
  return "unknown";
}

inline Method parse_method(std::string_view name) {
  if (name == "proposed") return Method::kProposed;
  if (name == "beran") return Method::kBeran;
  if (name == "km") return Method::kKaplanMeier;
  if (name == "unconditional") return Method::kUnconditional;
  throw std::invalid_argument("unknown method: " + std::string(name));
}

/// Kernel-weighted estimate at x (proposed or Beran).
inline StepCurve estimate_at(const OrderedSample& sample, const KernelSpec& kernel,
                             double x, Method method) {
  const auto xs = sample.covariates();
  const WeightVector w = nw_weights(kernel, xs, x);
  switch (method) {
    case Method::kProposed:
      return survival_c(sample, w);
    case Method::kBeran:
      return survival_beran(sample, w);
    case Method::kKaplanMeier:
    case Method::kUnconditional:
      break;
  }
  throw std::invalid_argument("method is not kernel weighted");
}

}  // namespace curepl
