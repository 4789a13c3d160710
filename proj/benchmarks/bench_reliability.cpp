#include <benchmark/benchmark.h>

#include "rgc/metrics.hpp"
#include "rgc/model.hpp"
#include "rgc/numerics.hpp"
#include "rgc/reliability.hpp"
#include "rgc/rng.hpp"

namespace {

using namespace rgc;

struct Fixture {
  ModelParams model;
  TeacherState teacher;
  std::vector<Vec> inputs;

  Fixture() {
    RandomStream rng(1);
    model = make_mlp(8, {32, 32}, 4, rng);
    teacher = TeacherState{model, 0.999, 0.7};
    for (int i = 0; i < 256; ++i) {
      Vec x(8);
      for (double& v : x) v = rng.normal();
      inputs.push_back(std::move(x));
    }
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_Forward(benchmark::State& state) {
  const Fixture& f = fixture();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(f.model, f.inputs[i++ % f.inputs.size()]));
  }
}
BENCHMARK(BM_Forward);

void BM_Softmax(benchmark::State& state) {
  Vec logits(static_cast<std::size_t>(state.range(0)));
  RandomStream rng(2);
  for (double& v : logits) v = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(num::softmax(logits));
  }
}
BENCHMARK(BM_Softmax)->Arg(4)->Arg(64);

void BM_LastLayerTrace(benchmark::State& state) {
  const Fixture& f = fixture();
  const ForwardRecord fr = forward(f.model, f.inputs[0]);
  const Vec target = {1.0, 0.0, 0.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(last_layer_trace(fr.p, target, fr.h));
  }
}
BENCHMARK(BM_LastLayerTrace);

void BM_Conflict(benchmark::State& state) {
  const Fixture& f = fixture();
  const ForwardRecord fr = forward(f.model, f.inputs[0]);
  const Matrix g_obs = last_layer_gradient(fr, {1.0, 0.0, 0.0, 0.0});
  const Matrix g_ref = last_layer_gradient(fr, {0.0, 0.4, 0.3, 0.3});
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometric_conflict(g_obs, g_ref, 1e-8));
  }
}
BENCHMARK(BM_Conflict);

// One full per-sample scoring step: student forward, teacher target, both
// closed-form gradients, traces, and the conflict.
void BM_ScoreSample(benchmark::State& state) {
  const Fixture& f = fixture();
  const Vec target = {1.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (auto _ : state) {
    const Vec& x = f.inputs[i++ % f.inputs.size()];
    const ForwardRecord fr = forward(f.model, x);
    const Vec q = teacher_target(f.teacher, x);
    const Matrix g_obs = last_layer_gradient(fr, target);
    const Matrix g_ref = last_layer_gradient(fr, q);
    const double tau_obs = last_layer_trace(fr.p, target, fr.h);
    const double tau_ref = last_layer_trace(fr.p, q, fr.h);
    const ConflictRecord rec = geometric_conflict(g_obs, g_ref, 1e-8);
    benchmark::DoNotOptimize(radial_score(tau_obs, tau_ref, 1e-8) + rec.conflict);
  }
}
BENCHMARK(BM_ScoreSample);

void BM_FullGradient(benchmark::State& state) {
  const Fixture& f = fixture();
  const Vec target = {1.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        full_gradient(f.model, f.inputs[i++ % f.inputs.size()], target));
  }
}
BENCHMARK(BM_FullGradient);

void BM_Auroc(benchmark::State& state) {
  RandomStream rng(3);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Vec scores(n);
  std::vector<bool> positive(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.normal();
    positive[i] = rng.uniform01() < 0.4;
  }
  positive[0] = true;
  positive[1] = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(auroc(scores, positive));
  }
}
BENCHMARK(BM_Auroc)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
