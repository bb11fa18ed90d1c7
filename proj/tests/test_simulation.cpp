#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "curepl/simulation.hpp"

namespace curepl {
namespace {

TEST(Latency, BoundaryValues) {
  for (double x : {-20.0, -3.0, 0.0, 7.5, 20.0}) {
    EXPECT_EQ(latency_s0(0.0, x), 1.0);
    EXPECT_EQ(latency_s0(kLatencyEnd, x), 0.0);
    EXPECT_EQ(latency_s0(10.0, x), 0.0);
  }
}

TEST(Latency, DirectEvaluationAtXZero) {
  const double a = std::exp(0.5);
  const double expected = (std::exp(-a) - std::exp(-a * 4.605)) / (1.0 - std::exp(-a * 4.605));
  EXPECT_NEAR(latency_s0(1.0, 0.0), expected, 1e-15);
  // Bisection inversion as an independent check of the quantile function.
  double lo = 0.0, hi = kLatencyEnd;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (latency_s0(mid, 0.0) > expected ? lo : hi) = mid;
  }
  EXPECT_NEAR(latency_quantile(expected, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(0.5 * (lo + hi), 1.0, 1e-12);
}

TEST(CureRate, Examples) {
  EXPECT_EQ(cure_rate(2, 0.0), 0.5);
  EXPECT_NEAR(cure_rate(2, 20.0), 0.0, 1e-15);
  EXPECT_NEAR(cure_rate(2, -20.0), 1.0, 1e-15);
  EXPECT_THROW(cure_rate(3, 0.0), std::invalid_argument);
  EXPECT_THROW(cure_rate(2, 30.0), OutOfRange);
  // Average over U[-20, 20] by midpoint quadrature.
  double acc = 0.0;
  const int m = 400000;
  for (int k = 0; k < m; ++k) acc += cure_rate(1, -20.0 + 40.0 * (k + 0.5) / m);
  EXPECT_NEAR(acc / m, 0.467, 5e-4);
}

TEST(Tau, RoundTripMonotoneAndBelowTruncation) {
  double prev = INFINITY;
  for (double x = -20.0; x <= 20.0; x += 0.25) {
    const double t = tau_x(x);
    EXPECT_NEAR(latency_s0(t, x), 0.1, 1e-12);
    EXPECT_LT(t, kLatencyEnd);
    EXPECT_LT(t, prev);
    prev = t;
  }
}

TEST(TruthOracle, MixtureIdentity) {
  for (int sc : {1, 2}) {
    const TruthOracle truth{sc};
    for (double x = -20.0; x <= 20.0; x += 0.5) {
      for (double t = 0.0; t <= 6.0; t += 0.1) {
        const double p = 1.0 - cure_rate(sc, x);
        EXPECT_NEAR(truth.survival(t, x), 1.0 - p + p * latency_s0(t, x), 1e-14);
      }
    }
  }
}

TEST(DrawDataset, PiZeroNeverLabelsCured) {
  ScenarioSpec spec;
  spec.pi = 0.0;
  spec.n = 5000;
  Rng rng(4);
  for (const auto& r : draw_dataset(spec, rng)) EXPECT_NE(r.outcome, Outcome::kCensoredCured);
}

TEST(DrawDataset, RecordsAreValidAndReproducible) {
  ScenarioSpec spec;
  spec.scenario_id = 2;
  spec.n = 1000;
  Rng a(9), b(9);
  const auto da = draw_dataset(spec, a);
  EXPECT_EQ(da, draw_dataset(spec, b));
  for (const auto& r : da) {
    EXPECT_GE(r.x, -20.0);
    EXPECT_LT(r.x, 20.0);
    EXPECT_GE(r.t, 0.0);
    if (r.is_event()) {
      EXPECT_LT(r.t, kLatencyEnd);
    }
  }
}

// Generated uncured lifetimes follow S0(. | x): Kolmogorov distance below
// the 1% critical value 1.628 / sqrt(n) at n = 10^4, three seeds.
TEST(DrawDataset, InverseTransformMatchesLatency) {
  const double x = 5.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Rng rng(seed);
    const int n = 10000;
    std::vector<double> y(n);
    for (auto& v : y) v = latency_quantile(rng.uniform_open0(), x);
    std::sort(y.begin(), y.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      const double F = 1.0 - latency_s0(y[i], x);
      d = std::max({d, std::abs(F - static_cast<double>(i) / n),
                    std::abs(F - static_cast<double>(i + 1) / n)});
    }
    EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n))) << "seed " << seed;
  }
}

TEST(MiseDecompose, TruthGivesZero) {
  ScenarioSpec spec;
  const auto r = mise_decompose(spec, 0.0, 5.0, 10, CurveSource::kTruth, 1);
  // Averaging identical curves can leave rounding residue near 1e-32.
  EXPECT_NEAR(r.ibias2, 0.0, 1e-28);
  EXPECT_NEAR(r.ivar, 0.0, 1e-28);
  EXPECT_NEAR(r.mise, 0.0, 1e-28);
  EXPECT_EQ(r.replicates, 10u);
}

TEST(MiseDecompose, IdentityAndThreadInvariance) {
  ScenarioSpec spec;
  MonteCarloSettings one;
  one.threads = 1;
  MonteCarloSettings many;
  many.threads = 6;
  for (auto src : {CurveSource::kProposed, CurveSource::kBeran}) {
    const auto a = mise_decompose(spec, -10.0, 6.0, 50, src, 3, one);
    const auto b = mise_decompose(spec, -10.0, 6.0, 50, src, 3, many);
    EXPECT_NEAR(a.mise, a.ibias2 + a.ivar, 1e-10);
    EXPECT_EQ(a.mise, b.mise);
    EXPECT_EQ(a.ivar, b.ivar);
    EXPECT_GT(a.ivar, 0.0);
  }
  EXPECT_THROW(mise_decompose(spec, 0.0, 5.0, 1, CurveSource::kProposed, 1), InvalidRange);
}

TEST(MiseDecompose, DegenerateReplicatesAreDropped) {
  ScenarioSpec spec;
  spec.n = 5;
  const auto r = mise_decompose(spec, 0.0, 2.0, 200, CurveSource::kProposed, 1);
  EXPECT_GT(r.dropped, 0u);
  EXPECT_EQ(r.dropped + r.replicates, 200u);
}

TEST(OptimalScan, TruthIsFlatAndPicksSmallest) {
  ScenarioSpec spec;
  const auto grid = default_grid(3.0, 20.0, 5);
  const auto scan = optimal_bandwidth_scan(spec, 0.0, grid, 4, CurveSource::kTruth, 1);
  EXPECT_EQ(scan.opt_index, 0u);
  EXPECT_EQ(scan.h_opt, 3.0);
  for (const auto& r : scan.curve) EXPECT_EQ(r.mise, 0.0);
}

}  // namespace
}  // namespace curepl
