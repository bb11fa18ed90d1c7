// Simulates one dataset from scenario 1, picks a bandwidth at x = -10 by
// bootstrap (both resampling schemes) and prints the proposed and Beran
// estimates next to the truth.

#include <cstdio>

#include "curepl/bandwidth.hpp"
#include "curepl/estimators.hpp"
#include "curepl/simulation.hpp"

int main() {
  using namespace curepl;
  ScenarioSpec spec;
  spec.scenario_id = 1;
  spec.n = 200;
  spec.pi = 0.8;

  Rng rng(2024);
  const OrderedSample sample(draw_dataset(spec, rng));
  const double x = -10.0;
  const TruthOracle truth{spec.scenario_id};

  BandwidthSearch search;
  search.grid = default_grid(3.0, 20.0, 50);
  search.replicates = 100;
  search.weight_bounds = std::pair{0.0, tau_x(x)};

  for (auto scheme : {ResampleScheme::kTarget, ResampleScheme::kLocal}) {
    search.scheme = scheme;
    const auto choice = select_bandwidth(sample, x, search, KernelFamily::kEpanechnikov, 7);
    std::printf("\nresample=%s: pilot g = %.3f, bootstrap h* = %.3f\n", to_string(scheme).c_str(),
                choice.profile.pilot, choice.h_star);

    const KernelSpec kernel(KernelFamily::kEpanechnikov, choice.h_star);
    const StepCurve proposed = estimate_at(sample, kernel, x, Method::kProposed);
    const StepCurve beran = estimate_at(sample, kernel, x, Method::kBeran);
    std::printf("%6s %10s %10s %10s\n", "t", "truth", "proposed", "beran");
    for (double t = 0.0; t <= 4.0; t += 0.5) {
      std::printf("%6.2f %10.4f %10.4f %10.4f\n", t, truth.survival(t, x), proposed(t), beran(t));
    }
  }
  return 0;
}
