#include <benchmark/benchmark.h>

#include <map>

#include "ellipsotope/safeset.hpp"

using namespace ellipsotope;
using Eigen::VectorXd;

namespace {

const SafeSetResult& platoon(TemplateKind kind) {
  static std::map<TemplateKind, SafeSetResult> cache;
  auto it = cache.find(kind);
  if (it == cache.end()) it = cache.emplace(kind, synthesize_safe_set(platoon_benchmark(2, kind))).first;
  return it->second;
}

// online cost: solve for beta at x0, then one input evaluation
void BM_ControllerEvaluation(benchmark::State& state) {
  const TemplateKind kind = state.range(0) == 0 ? TemplateKind::zonotope : TemplateKind::ellipsoid;
  const SafeSetResult& r = platoon(kind);
  if (!r.found) {
    state.SkipWithError("synthesis failed");
    return;
  }
  std::uint64_t seed = 0;
  for (auto _ : state) {
    state.PauseTiming();
    const VectorXd x0 = sample_boundary_point(r, seed++);
    state.ResumeTiming();
    benchmark::DoNotOptimize(evaluate_controller(r.controller, x0, 0.0));
  }
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_ControllerEvaluation)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_PlatoonSynthesis(benchmark::State& state) {
  const SafeSetProblem p = platoon_benchmark(static_cast<int>(state.range(0)), TemplateKind::ellipsoid);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_safe_set(p).found);
}
BENCHMARK(BM_PlatoonSynthesis)->Arg(1)->Arg(2)->Iterations(1)->Unit(benchmark::kSecond);

}  // namespace
