#include <benchmark/benchmark.h>

#include "ellipsotope/containment.hpp"
#include "ellipsotope/norms.hpp"
#include "ellipsotope/rng.hpp"

using namespace ellipsotope;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ContainmentResult run(const Ellipsotope& in, const Ellipsotope& out, Method m) {
  ContainmentOptions o;
  o.method = m;
  o.sampling_lower_bound = false;
  return containment_radius(in, out, o);
}

// args: n, m
void BM_Lr(benchmark::State& state) {
  CounterRng rng(1);
  const Index n = state.range(0), m = state.range(1);
  Ellipsotope in(Exponent::infinity(), rng.normal_matrix(n, m)), out(Exponent::infinity(), rng.normal_matrix(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(run(in, out, Method::lr).r_upper);
}
BENCHMARK(BM_Lr)->Args({2, 4})->Args({4, 8})->Args({6, 12})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_Zsr(benchmark::State& state) {
  CounterRng rng(2);
  const Index n = state.range(0), m = state.range(1);
  Ellipsotope in(Exponent::infinity(), rng.normal_matrix(n, m)), out(Exponent::two(), rng.normal_matrix(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(run(in, out, Method::zsr).r_upper);
}
BENCHMARK(BM_Zsr)->Args({2, 8})->Args({4, 12})->Args({6, 20})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_Sr(benchmark::State& state) {
  CounterRng rng(3);
  const Index n = state.range(0), m = state.range(1);
  Ellipsotope in(Exponent(4.0), rng.normal_matrix(n, m)), out(Exponent(1.5), rng.normal_matrix(n, n + 1));
  for (auto _ : state) benchmark::DoNotOptimize(run(in, out, Method::sr).r_upper);
}
BENCHMARK(BM_Sr)->Args({2, 4})->Args({3, 6})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_EllipsoidSdp(benchmark::State& state) {
  CounterRng rng(4);
  const Index n = state.range(0);
  Ellipsotope in(Exponent::two(), rng.normal_matrix(n, n)), out(Exponent::two(), rng.normal_matrix(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(run(in, out, Method::ellipsoid_sdp).r_upper);
}
BENCHMARK(BM_EllipsoidSdp)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Vpoly(benchmark::State& state) {
  CounterRng rng(5);
  const Index n = state.range(0);
  Ellipsotope in(Exponent::one(), rng.normal_matrix(n, 3 * n)), out(Exponent::infinity(), rng.normal_matrix(n, 2 * n));
  for (auto _ : state) benchmark::DoNotOptimize(run(in, out, Method::vpoly).r_upper);
}
BENCHMARK(BM_Vpoly)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Bruteforce(benchmark::State& state) {
  CounterRng rng(6);
  const Index m = state.range(0);
  Ellipsotope in(Exponent::infinity(), rng.normal_matrix(2, m)), out(Exponent::two(), rng.normal_matrix(2, 2));
  for (auto _ : state) benchmark::DoNotOptimize(run(in, out, Method::bruteforce).r_upper);
}
BENCHMARK(BM_Bruteforce)->Arg(8)->Arg(12)->Arg(16)->UseRealTime()->Unit(benchmark::kMillisecond);

// args: p index (0: 1, 1: 2, 2: 3, 3: inf)
void BM_EllipsotopeNorm(benchmark::State& state) {
  const Exponent ps[] = {Exponent::one(), Exponent::two(), Exponent(3.0), Exponent::infinity()};
  CounterRng rng(7);
  EllipsotopeNorm norm(rng.normal_matrix(4, 10), ps[state.range(0)]);
  const VectorXd x = rng.normal_vector(4);
  for (auto _ : state) benchmark::DoNotOptimize(norm(x));
}
BENCHMARK(BM_EllipsotopeNorm)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_OperatorNorm(benchmark::State& state) {
  CounterRng rng(8);
  const MatrixXd A = rng.normal_matrix(6, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(A, Exponent::infinity(), Exponent::one()).value);
}
BENCHMARK(BM_OperatorNorm)->Arg(8)->Arg(14)->Arg(18)->Unit(benchmark::kMillisecond);

}  // namespace
