#include <benchmark/benchmark.h>

#include <vector>

#include "isrlu/activation.hpp"
#include "isrlu/bench.hpp"
#include "isrlu/fast_rsqrt.hpp"
#include "isrlu/kernels.hpp"

namespace {

using isrlu::ActivationKind;
using isrlu::ActivationSpec;
using isrlu::Tier;

std::vector<float> input_of(std::size_t n) {
  isrlu::BenchConfig config;
  config.n_elements = n;
  return isrlu::make_bench_input(config);
}

void forward(benchmark::State& state, ActivationSpec spec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = input_of(n);
  std::vector<float> out(n);
  for (auto _ : state) {
    isrlu::kernels::apply_forward<float>(spec, in, out);
    benchmark::DoNotOptimize(out.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void forward_with_slope(benchmark::State& state, ActivationSpec spec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = input_of(n);
  std::vector<float> out(n), slope(n);
  for (auto _ : state) {
    isrlu::kernels::apply_forward_with_slope<float>(spec, in, out, slope);
    benchmark::DoNotOptimize(out.data());
    benchmark::DoNotOptimize(slope.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void backward(benchmark::State& state, ActivationSpec spec) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = input_of(n);
  const std::vector<float> up(n, 1.0f);
  std::vector<float> out(n);
  for (auto _ : state) {
    isrlu::kernels::apply_backward<float>(spec, in, up, out);
    benchmark::DoNotOptimize(out.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void scalar_rsqrt(benchmark::State& state) {
  const auto policy = isrlu::ApproxPolicy::tuned(static_cast<int>(state.range(0)));
  float v = 1.5f, acc = 0.0f;
  for (auto _ : state) {
    acc += isrlu::rsqrt_approx(v, policy);
    v += 1e-3f;
    benchmark::DoNotOptimize(acc);
  }
}

// Cache-resident (16K) and memory-bound (16M) sizes.
#define ISRLU_KERNEL(fn, name, ...) \
  BENCHMARK_CAPTURE(fn, name, __VA_ARGS__)->Arg(1 << 14)->Arg(1 << 24)->Unit(benchmark::kMicrosecond)

ISRLU_KERNEL(forward, relu, ActivationSpec{ActivationKind::Relu});
ISRLU_KERNEL(forward, isrlu, ActivationSpec{ActivationKind::Isrlu, 1.0});
ISRLU_KERNEL(forward, isrlu_approx0, ActivationSpec{ActivationKind::Isrlu, 1.0, Tier::approx(0)});
ISRLU_KERNEL(forward, isrlu_approx1, ActivationSpec{ActivationKind::Isrlu, 1.0, Tier::approx(1)});
ISRLU_KERNEL(forward, isrlu_approx2, ActivationSpec{ActivationKind::Isrlu, 1.0, Tier::approx(2)});
ISRLU_KERNEL(forward, isru, ActivationSpec{ActivationKind::Isru, 1.0});
ISRLU_KERNEL(forward, isru_approx0, ActivationSpec{ActivationKind::Isru, 1.0, Tier::approx(0)});
ISRLU_KERNEL(forward, elu, ActivationSpec{ActivationKind::Elu, 1.0});
ISRLU_KERNEL(forward, tanh, ActivationSpec{ActivationKind::Tanh});
ISRLU_KERNEL(forward, isru_sigmoid, ActivationSpec{ActivationKind::IsruSigmoid});
ISRLU_KERNEL(forward_with_slope, isrlu, ActivationSpec{ActivationKind::Isrlu, 1.0});
ISRLU_KERNEL(forward_with_slope, isrlu_approx0, ActivationSpec{ActivationKind::Isrlu, 1.0, Tier::approx(0)});
ISRLU_KERNEL(forward_with_slope, elu, ActivationSpec{ActivationKind::Elu, 1.0});
ISRLU_KERNEL(backward, isrlu, ActivationSpec{ActivationKind::Isrlu, 1.0});
ISRLU_KERNEL(backward, elu, ActivationSpec{ActivationKind::Elu, 1.0});
BENCHMARK(scalar_rsqrt)->DenseRange(0, 2);

}  // namespace

BENCHMARK_MAIN();
