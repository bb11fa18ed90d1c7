#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "curepl/estimators.hpp"
#include "test_support.hpp"

namespace curepl {
namespace {

using testing::brute_product_limit;
using testing::brute_unconditional;
using testing::probe_times;
using testing::random_kernel_weights;
using testing::random_records;
using testing::random_weights;

constexpr double kTol = 1e-12;

WeightVector uniform_weights(std::size_t n) {
  WeightVector w;
  w.values.assign(n, 1.0 / static_cast<double>(n));
  return w;
}

// times [1, 2, 3], outcomes [event, cured, event]
OrderedSample worked_example() {
  return OrderedSample({{0.0, 1.0, Outcome::kEvent},
                        {0.0, 2.0, Outcome::kCensoredCured},
                        {0.0, 3.0, Outcome::kEvent}});
}

TEST(OrderSample, SortsByTimeWithConcomitants) {
  const OrderedSample s({{3.0, 3.0, Outcome::kEvent},
                         {1.0, 1.0, Outcome::kCensoredCured},
                         {2.0, 2.0, Outcome::kCensoredUnknown}});
  ASSERT_EQ(s.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(s[i].x, static_cast<double>(i + 1));
  EXPECT_EQ(s[0].outcome, Outcome::kCensoredCured);
  EXPECT_EQ(s[2].outcome, Outcome::kEvent);
}

TEST(OrderSample, SingletonAndTieRule) {
  const OrderedSample one({{1.0, 2.0, Outcome::kEvent}});
  EXPECT_EQ(one[0], (SurvivalRecord{1.0, 2.0, Outcome::kEvent}));

  const OrderedSample tied({{0.0, 2.0, Outcome::kCensoredCured},
                            {1.0, 2.0, Outcome::kCensoredUnknown},
                            {2.0, 2.0, Outcome::kEvent}});
  EXPECT_EQ(tied[0].outcome, Outcome::kEvent);
  EXPECT_EQ(tied[1].outcome, Outcome::kCensoredUnknown);
  EXPECT_EQ(tied[2].outcome, Outcome::kCensoredCured);
}

TEST(OrderSample, Errors) {
  EXPECT_THROW(order_sample({}), EmptySample);
  EXPECT_THROW(order_sample({{0.0, -1.0, Outcome::kEvent}}), std::invalid_argument);
  EXPECT_THROW(order_sample({{0.0, std::nan(""), Outcome::kEvent}}), std::invalid_argument);
}

TEST(StepCurveEval, RightContinuous) {
  const StepCurve c{{2.0}, {0.5}, 1.0};
  EXPECT_EQ(evaluate(c, 2.0), 0.5);
  EXPECT_EQ(evaluate(c, 1.999999), 1.0);
  EXPECT_EQ(evaluate(c, 0.0), 1.0);
  EXPECT_EQ(evaluate(c, 1e9), 0.5);
  EXPECT_EQ(evaluate(StepCurve::constant(1.0), 123.0), 1.0);
}

TEST(SubdistH1, Examples) {
  const OrderedSample s({{0.0, 1.0, Outcome::kEvent},
                         {0.0, 2.0, Outcome::kEvent},
                         {0.0, 3.0, Outcome::kCensoredUnknown}});
  const auto w = uniform_weights(3);
  EXPECT_NEAR(subdist_h1(s, w, 1.5), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(subdist_h1(s, w, 0.5), 0.0);
  const OrderedSample censored({{0.0, 1.0, Outcome::kCensoredUnknown},
                                {0.0, 2.0, Outcome::kCensoredCured}});
  EXPECT_EQ(subdist_h1(censored, uniform_weights(2), 10.0), 0.0);
}

TEST(RiskJ, Examples) {
  const auto s = worked_example();
  const auto w = uniform_weights(3);
  EXPECT_NEAR(risk_j(s, w, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(risk_j(s, w, 3.0), 2.0 / 3.0, 1e-15);
  const OrderedSample no_cure({{0.0, 1.0, Outcome::kEvent}, {0.0, 2.0, Outcome::kCensoredUnknown}});
  EXPECT_EQ(risk_j(no_cure, uniform_weights(2), 5.0), 0.0);
}

TEST(CumulativeHazard, WorkedExample) {
  const auto H = cumulative_hazard_c(worked_example(), uniform_weights(3));
  ASSERT_EQ(H.jumps(), 2u);
  EXPECT_EQ(H.initial_value, 0.0);
  EXPECT_NEAR(H(1.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(H(3.0) - H(2.9), 0.5, 1e-15);
}

TEST(CumulativeHazard, SingleEventAndNoEvents) {
  const OrderedSample one({{0.0, 1.0, Outcome::kEvent}});
  WeightVector w{{1.0}, 0.0};
  const auto H = cumulative_hazard_c(one, w);
  EXPECT_EQ(H(1.0), 1.0);

  const OrderedSample none({{0.0, 1.0, Outcome::kCensoredUnknown},
                            {0.0, 2.0, Outcome::kCensoredUnknown},
                            {0.0, 3.0, Outcome::kCensoredUnknown}});
  const auto Z = cumulative_hazard_c(none, uniform_weights(3));
  EXPECT_EQ(Z.jumps(), 0u);
  EXPECT_EQ(Z(10.0), 0.0);
}

TEST(SurvivalC, WorkedExampleAgainstBeran) {
  const auto s = worked_example();
  const auto w = uniform_weights(3);
  const auto c = survival_c(s, w);
  const auto b = survival_beran(s, w);
  EXPECT_EQ(c(0.5), 1.0);
  EXPECT_NEAR(c(1.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c(2.5), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c(3.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(c(100.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(b(2.5), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(b(3.0), 0.0);
}

TEST(SurvivalC, NoEventsAndSingleEvent) {
  const OrderedSample none({{0.0, 1.0, Outcome::kCensoredCured}});
  EXPECT_EQ(survival_c(none, WeightVector{{1.0}, 0.0})(5.0), 1.0);
  const OrderedSample one({{0.0, 2.0, Outcome::kEvent}});
  const auto c = survival_c(one, WeightVector{{1.0}, 0.0});
  EXPECT_EQ(c(1.9), 1.0);
  EXPECT_EQ(c(2.0), 0.0);
}

TEST(SurvivalC, ZeroWeightEventMakesNoJump) {
  const OrderedSample s({{0.0, 1.0, Outcome::kEvent}, {5.0, 2.0, Outcome::kEvent}});
  const WeightVector w{{1.0, 0.0}, 0.0};
  const auto c = survival_c(s, w);
  EXPECT_EQ(c.jumps(), 1u);
  EXPECT_EQ(c(3.0), 0.0);
  const auto b = survival_beran(s, w);
  EXPECT_EQ(b.jumps(), 1u);
}

TEST(SurvivalC, MisalignedWeightsRejected) {
  EXPECT_THROW(survival_c(worked_example(), uniform_weights(2)), std::invalid_argument);
}

TEST(SurvivalBeran, RelabelledCuredEqualsProposed) {
  std::vector<SurvivalRecord> recs{{0.0, 1.0, Outcome::kEvent},
                                   {0.0, 2.0, Outcome::kCensoredUnknown},
                                   {0.0, 3.0, Outcome::kEvent}};
  const OrderedSample s(recs);
  const auto w = uniform_weights(3);
  for (double t : {0.0, 1.0, 2.0, 3.0, 4.0}) {
    EXPECT_EQ(survival_beran(s, w)(t), survival_c(s, w)(t));
  }
}

TEST(KernelNoCensor, Examples) {
  const OrderedSample s({{0.0, 1.0, Outcome::kEvent}, {0.0, 2.0, Outcome::kEvent}});
  const auto k = survival_kernel_nocensor(s, uniform_weights(2));
  EXPECT_EQ(k(1.5), 0.5);
  EXPECT_EQ(k(0.5), 1.0);
  EXPECT_EQ(k(2.0), 0.0);
  EXPECT_THROW(survival_kernel_nocensor(worked_example(), uniform_weights(3)), ContainsCensoring);
}

TEST(Unconditional, Examples) {
  const std::vector<SurvivalRecord> recs{{0.0, 1.0, Outcome::kEvent},
                                         {0.0, 2.0, Outcome::kCensoredCured},
                                         {0.0, 3.0, Outcome::kEvent}};
  const auto u = survival_unconditional_c(recs);
  EXPECT_EQ(u(0.5), 1.0);
  EXPECT_NEAR(u(1.5), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(u(3.0), 1.0 / 3.0, 1e-15);

  const std::vector<SurvivalRecord> cured{{0.0, 1.0, Outcome::kCensoredCured},
                                          {0.0, 2.0, Outcome::kCensoredCured}};
  EXPECT_EQ(survival_unconditional_c(cured)(10.0), 1.0);
  EXPECT_THROW(survival_unconditional_c({}), EmptySample);
}

TEST(KaplanMeier, Examples) {
  const std::vector<SurvivalRecord> recs{{0.0, 1.0, Outcome::kEvent},
                                         {0.0, 2.0, Outcome::kCensoredUnknown},
                                         {0.0, 3.0, Outcome::kEvent}};
  const auto km = survival_kaplan_meier(recs);
  EXPECT_EQ(km(0.9), 1.0);
  EXPECT_NEAR(km(1.0), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(km(3.0), 0.0);

  const std::vector<SurvivalRecord> all{{0.0, 1.0, Outcome::kEvent},
                                        {0.0, 2.0, Outcome::kEvent},
                                        {0.0, 2.0, Outcome::kEvent},
                                        {0.0, 4.0, Outcome::kEvent}};
  const auto e = survival_kaplan_meier(all);
  EXPECT_NEAR(e(1.0), 0.75, 1e-15);
  EXPECT_NEAR(e(2.0), 0.25, 1e-15);
  EXPECT_EQ(e(4.0), 0.0);

  EXPECT_EQ(survival_kaplan_meier({{0.0, 1.0, Outcome::kCensoredUnknown}})(5.0), 1.0);
  EXPECT_THROW(survival_kaplan_meier({}), EmptySample);
}

// Grouped implementation against the literal term-by-term product,
// including tied times and zero weights.
TEST(EstimatorOracle, MatchesLiteralProduct) {
  Rng rng(101);
  for (int trial = 0; trial < 1500; ++trial) {
    const OrderedSample s(random_records(rng));
    const auto w = random_weights(rng, s.size());
    const auto c = survival_c(s, w);
    const auto b = survival_beran(s, w);
    for (double t : probe_times(s)) {
      ASSERT_NEAR(c(t), brute_product_limit(s, w, t, true), kTol);
      ASSERT_NEAR(b(t), brute_product_limit(s, w, t, false), kTol);
    }
    const auto u = survival_unconditional_c({s.begin(), s.end()});
    const auto km = survival_kaplan_meier({s.begin(), s.end()});
    for (double t : probe_times(s)) {
      ASSERT_NEAR(u(t), brute_unconditional(s, t, true), kTol);
      ASSERT_NEAR(km(t), brute_unconditional(s, t, false), kTol);
    }
  }
}

TEST(EstimatorProperty, CurveInvariants) {
  Rng rng(202);
  for (int trial = 0; trial < 1500; ++trial) {
    const OrderedSample s(random_records(rng));
    const auto w = random_kernel_weights(rng, s);
    const auto c = survival_c(s, w);
    const auto H = cumulative_hazard_c(s, w);
    EXPECT_EQ(c.initial_value, 1.0);
    EXPECT_EQ(H.initial_value, 0.0);
    double prev_s = 1.0;
    double prev_h = 0.0;
    for (std::size_t k = 0; k < c.jumps(); ++k) {
      if (k > 0) {
        ASSERT_LT(c.jump_times[k - 1], c.jump_times[k]);
      }
      ASSERT_GE(c.values[k], 0.0);
      ASSERT_LE(c.values[k], prev_s);
      prev_s = c.values[k];
    }
    for (double v : H.values) {
      ASSERT_GE(v, prev_h);
      prev_h = v;
    }
  }
}

TEST(EstimatorProperty, PermutationInvariance) {
  Rng rng(303);
  std::mt19937_64 shuffler(5);
  for (int trial = 0; trial < 500; ++trial) {
    auto recs = random_records(rng);
    const OrderedSample s(recs);
    const auto w = random_kernel_weights(rng, s);
    const KernelSpec k(KernelFamily::kEpanechnikov, 3.0);
    std::shuffle(recs.begin(), recs.end(), shuffler);
    const OrderedSample p(recs);
    for (auto m : {Method::kProposed, Method::kBeran}) {
      StepCurve a, b;
      try {
        a = estimate_at(s, k, w.x, m);
        b = estimate_at(p, k, w.x, m);
      } catch (const DegenerateWeights&) {
        continue;
      }
      ASSERT_EQ(a.jump_times, b.jump_times);
      for (std::size_t j = 0; j < a.jumps(); ++j) ASSERT_NEAR(a.values[j], b.values[j], kTol);
    }
  }
}

}  // namespace
}  // namespace curepl
