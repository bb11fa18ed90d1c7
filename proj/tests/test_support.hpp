#pragma once

// Test-only helpers: random sample generators and brute-force oracles that
// evaluate the product-limit formulas term by term, independently of the
// grouped implementation in curepl/estimators.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "curepl/kernel.hpp"
#include "curepl/random.hpp"
#include "curepl/sample.hpp"

namespace curepl::testing {

struct GenOptions {
  std::size_t max_n = 50;
  bool allow_ties = true;
  double p_event = 0.5;
  double p_cured = 0.25;  // remaining mass: censored-unknown
};

inline std::vector<SurvivalRecord> random_records(Rng& rng, const GenOptions& o = {}) {
  const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(o.max_n));
  const bool ties = o.allow_ties && rng.bernoulli(0.5);
  std::vector<SurvivalRecord> out(n);
  for (auto& r : out) {
    r.x = rng.uniform(-5.0, 5.0);
    r.t = ties ? std::floor(rng.uniform(0.0, 8.0)) : rng.uniform(0.0, 10.0);
    const double u = rng.uniform();
    r.outcome = u < o.p_event                ? Outcome::kEvent
                : u < o.p_event + o.p_cured ? Outcome::kCensoredCured
                                             : Outcome::kCensoredUnknown;
  }
  return out;
}

/// Random weights on the simplex, aligned with `n` records; some exact zeros.
inline WeightVector random_weights(Rng& rng, std::size_t n) {
  WeightVector w;
  w.values.resize(n);
  double total = 0.0;
  for (auto& v : w.values) {
    v = rng.bernoulli(0.2) ? 0.0 : rng.exponential(1.0);
    total += v;
  }
  if (total == 0.0) {
    w.values[0] = 1.0;
    total = 1.0;
  }
  for (auto& v : w.values) v /= total;
  return w;
}

/// Kernel weights at a random point with a bandwidth large enough to cover
/// at least one observation.
inline WeightVector random_kernel_weights(Rng& rng, const OrderedSample& s) {
  const auto xs = s.covariates();
  const double x = xs[static_cast<std::size_t>(rng.uniform() * static_cast<double>(xs.size()))] +
                   rng.uniform(-0.5, 0.5);
  const double h = rng.uniform(0.6, 8.0);
  const auto family = rng.bernoulli(0.5) ? KernelFamily::kEpanechnikov : KernelFamily::kUniform;
  return nw_weights(KernelSpec(family, h), xs, x);
}

/// Literal product over ordered records i of
///   1 - delta_i w_i 1(T_i <= t) / (sum_{j>=i} w_j + [retain] sum_{j<i} w_j 1(cured_j)),
/// with a 0/0 factor read as 1.
inline double brute_product_limit(const OrderedSample& s, const WeightVector& w, double t,
                                  bool retain_cured) {
  double prod = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i].is_event() || !(s[i].t <= t)) continue;
    double den = 0.0;
    for (std::size_t j = i; j < s.size(); ++j) den += w[j];
    if (retain_cured) {
      for (std::size_t j = 0; j < i; ++j) {
        if (s[j].is_cured()) den += w[j];
      }
    }
    if (w[i] == 0.0) continue;
    prod *= 1.0 - w[i] / den;
  }
  return prod;
}

/// Literal unconditional product with integer risk-set counts.
inline double brute_unconditional(const OrderedSample& s, double t, bool retain_cured) {
  const std::size_t n = s.size();
  double prod = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!s[i].is_event() || !(s[i].t <= t)) continue;
    double den = static_cast<double>(n - i);
    if (retain_cured) {
      for (std::size_t j = 0; j < i; ++j) den += s[j].is_cured() ? 1.0 : 0.0;
    }
    prod *= 1.0 - 1.0 / den;
  }
  return prod;
}

/// Points where two step curves built from `s` could differ: 0, every
/// observed time, and midpoints between consecutive distinct times.
inline std::vector<double> probe_times(const OrderedSample& s) {
  std::vector<double> ts{0.0};
  for (std::size_t i = 0; i < s.size(); ++i) {
    ts.push_back(s[i].t);
    if (i + 1 < s.size() && s[i + 1].t > s[i].t) ts.push_back(0.5 * (s[i].t + s[i + 1].t));
  }
  ts.push_back(s[s.size() - 1].t + 1.0);
  return ts;
}

}  // namespace curepl::testing
