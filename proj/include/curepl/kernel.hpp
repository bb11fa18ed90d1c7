#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curepl/errors.hpp"

namespace curepl {

enum class KernelFamily { kEpanechnikov, kUniform };

inline std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::kEpanechnikov:
      return "epanechnikov";
    case KernelFamily::kUniform:
      return "uniform";
  }
  return "unknown";
}

inline KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "epanechnikov") return KernelFamily::kEpanechnikov;
  if (name == "uniform") return KernelFamily::kUniform;
  throw std::invalid_argument("unknown kernel: " + std::string(name));
}

struct KernelSpec {
  KernelFamily family = KernelFamily::kEpanechnikov;
  double bandwidth = 1.0;

  KernelSpec() = default;
  KernelSpec(KernelFamily f, double h) : family(f), bandwidth(h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw std::invalid_argument("bandwidth must be positive and finite");
    }
  }
};

/// Standard kernel density evaluated at u; support is the open interval (-1, 1).
inline double kernel_eval(KernelFamily family, double u) {
  if (!(std::abs(u) < 1.0)) return 0.0;
  switch (family) {
    case KernelFamily::kEpanechnikov:
      return 0.75 * (1.0 - u * u);
    case KernelFamily::kUniform:
      return 0.5;
  }
  return 0.0;
}

inline double kernel_eval(const KernelSpec& spec, double u) {
  return kernel_eval(spec.family, u);
}

/// Nadaraya-Watson weights at a covariate point, one per observation.
struct WeightVector {
  std::vector<double> values;
  double x = 0.0;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

// The 1/h factor of K_h cancels in the normalization, so it is never applied.
// Kernel arguments are formed as (x - xs[i]) / h, which makes a common
// translation of x and xs leave the weights unchanged up to the rounding of
// that difference.
inline WeightVector nw_weights(const KernelSpec& spec, std::span<const double> xs,
                               double x) {
  if (xs.empty()) throw EmptySample();
  WeightVector w;
  w.x = x;
  w.values.resize(xs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double k = kernel_eval(spec.family, (x - xs[i]) / spec.bandwidth);
    w.values[i] = k;
    total += k;
  }
  if (!(total > 0.0)) {
    throw DegenerateWeights("no observation within bandwidth " +
                            std::to_string(spec.bandwidth) + " of x = " +
                            std::to_string(x));
  }
  for (double& v : w.values) v /= total;
  return w;
}

}  // namespace curepl
