#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "curepl/errors.hpp"

namespace curepl {

// The three observable states of a right-censored record with partially
// known cure status. Enumerator order is the tie-breaking order used when
// sorting by observed time.
enum class Outcome : unsigned char {
  kEvent = 0,            // delta = 1
  kCensoredUnknown = 1,  // delta = 0, cure status not observed
  kCensoredCured = 2,    // delta = 0, known to be cured
};

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kEvent:
      return "event";
    case Outcome::kCensoredUnknown:
      return "censored";
    case Outcome::kCensoredCured:
      return "cured";
  }
  return "unknown";
}

struct SurvivalRecord {
  double x = 0.0;
  double t = 0.0;
  Outcome outcome = Outcome::kEvent;

  bool is_event() const noexcept { return outcome == Outcome::kEvent; }
  bool is_cured() const noexcept { return outcome == Outcome::kCensoredCured; }

  friend bool operator==(const SurvivalRecord&, const SurvivalRecord&) = default;
};

/// Records sorted by observed time, covariates and outcomes carried along.
/// Within tied times: events, then censored-unknown, then censored-cured.
class OrderedSample {
 public:
  OrderedSample() = default;

  explicit OrderedSample(std::vector<SurvivalRecord> records)
      : records_(std::move(records)) {
    if (records_.empty()) throw EmptySample();
    for (const auto& r : records_) {
      if (!std::isfinite(r.t) || r.t < 0.0) {
        throw std::invalid_argument("observed times must be finite and >= 0");
      }
    }
    std::stable_sort(records_.begin(), records_.end(), before);
  }

  static bool before(const SurvivalRecord& a, const SurvivalRecord& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.outcome < b.outcome;
  }

  std::size_t size() const noexcept { return records_.size(); }
  const SurvivalRecord& operator[](std::size_t i) const { return records_[i]; }
  std::span<const SurvivalRecord> records() const noexcept { return records_; }
  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }

  std::vector<double> covariates() const {
    std::vector<double> xs(records_.size());
    std::transform(records_.begin(), records_.end(), xs.begin(),
                   [](const SurvivalRecord& r) { return r.x; });
    return xs;
  }

  std::size_t count(Outcome o) const {
    return static_cast<std::size_t>(std::count_if(
        records_.begin(), records_.end(),
        [o](const SurvivalRecord& r) { return r.outcome == o; }));
  }

 private:
  std::vector<SurvivalRecord> records_;
};

inline OrderedSample order_sample(std::vector<SurvivalRecord> records) {
  return OrderedSample(std::move(records));
}

/// Right-continuous step function on [0, inf).
struct StepCurve {
  std::vector<double> jump_times;  // strictly increasing
  std::vector<double> values;      // value on [jump_times[k], jump_times[k+1])
  double initial_value = 1.0;      // value on [0, jump_times[0])

  static StepCurve constant(double v) { return StepCurve{{}, {}, v}; }

  std::size_t jumps() const noexcept { return jump_times.size(); }

  double last_value() const noexcept {
    return values.empty() ? initial_value : values.back();
  }

  double operator()(double t) const {
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return initial_value;
    return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
  }
};

inline double evaluate(const StepCurve& curve, double t) { return curve(t); }

inline std::vector<double> evaluate(const StepCurve& curve,
                                    std::span<const double> ts) {
  std::vector<double> out(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = curve(ts[i]);
  return out;
}

}  // namespace curepl
