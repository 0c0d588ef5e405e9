#include <benchmark/benchmark.h>

#include "pairqfi/channels.hpp"
#include "pairqfi/montecarlo.hpp"
#include "pairqfi/qfi.hpp"

namespace {

using namespace pairqfi;

const PupilFunction& default_pupil() {
  static const PupilFunction pupil = PupilFunction::clear_circular();
  return pupil;
}

void BM_overlap(benchmark::State& state) {
  const PupilFunction& pupil = default_pupil();
  const SceneParams scene{{0.2, 0.025, 0.025}, {}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_overlap(pupil, scene));
  }
}
BENCHMARK(BM_overlap);

void BM_h_ss(benchmark::State& state) {
  const PupilFunction& pupil = default_pupil();
  const SceneParams scene{{0.2, 0.025, 0.025}, {}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_h_ss(pupil, scene));
  }
}
BENCHMARK(BM_h_ss);

void BM_channel_probabilities(benchmark::State& state) {
  const PupilFunction pupil =
      default_pupil().resampled({static_cast<int>(state.range(0)),
                                 2 * static_cast<int>(state.range(0)), 2});
  const ZernikeBasis basis = ZernikeBasis::noll(4);
  const ChannelEvaluator evaluator(pupil, basis, 4);
  const SceneParams scene{{0.2, 0.025, 0.025}, {}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluator.probabilities(scene));
  }
}
BENCHMARK(BM_channel_probabilities)->Arg(40)->Arg(80);

void BM_sample_frame(benchmark::State& state) {
  const ZernikeBasis basis = ZernikeBasis::noll(4);
  const ChannelEvaluator evaluator(default_pupil(), basis, 4);
  const std::vector<double> probs =
      evaluator.probabilities({{0.2, 0.025, 0.025}, {}});
  Philox4x32 rng(42, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_frame(probs, static_cast<long long>(state.range(0)), rng));
  }
}
BENCHMARK(BM_sample_frame)->Arg(100000)->Arg(1000000);

void BM_ml_estimate(benchmark::State& state) {
  const PupilFunction pupil = default_pupil().resampled({40, 80, 2});
  const ZernikeBasis basis = ZernikeBasis::noll(4);
  const ChannelEvaluator evaluator(pupil, basis, 4);
  const Vec3 l0{0.2, 0.025, 0.025};
  const std::vector<double> probs = evaluator.probabilities({l0, {}});
  Philox4x32 rng(7, 0);
  const CountFrame frame = sample_frame(probs, 100000, rng);
  MlSettings settings;
  settings.multistart = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ml_estimate(frame, evaluator, l0, settings));
  }
}
BENCHMARK(BM_ml_estimate);

}  // namespace

BENCHMARK_MAIN();
