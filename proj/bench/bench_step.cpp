#include <benchmark/benchmark.h>

#include "modalnet/fixtures.hpp"
#include "modalnet/laws.hpp"

using namespace mnet;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::Parallel : Exec::Serial; }

// One synchronous step of k tensored nerves.
void BM_TensorStep(benchmark::State& st) {
  const auto k = static_cast<std::size_t>(st.range(0));
  const auto rt = fixtures::retina_discrete();
  std::vector<ModalDynamicalSystem> parts(k, rt.dynamics);
  const auto sys = tensor_mds(parts, exec_of(st));
  const Value s0 = *sys.default_state;
  gen::Rng rng(1);
  const auto input = sample_assignment(sys.over.interface(sys.mode_of(s0)).inputs, rng);
  for (auto _ : st) benchmark::DoNotOptimize(sys.update(s0, input));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(k));
}
BENCHMARK(BM_TensorStep)->ArgsProduct({{4, 16, 32}, {0, 1}})->ArgNames({"leaves", "parallel"});

// 50 steps of the flat visual system.
void BM_VisualSystemRun(benchmark::State& st) {
  const auto net = fixtures::visual_system().network;
  const auto sys = build_flat(net, exec_of(st));
  gen::Rng rng(2);
  const auto trace = laws::random_trace(rng, sys.over, 50);
  for (auto _ : st) benchmark::DoNotOptimize(run(sys, *sys.default_state, trace));
}
BENCHMARK(BM_VisualSystemRun)->ArgsProduct({{0}, {0, 1}})->ArgNames({"", "parallel"});

// Exhaustive functoriality check on the discretized eye.
void BM_Functoriality(benchmark::State& st) {
  const auto ey = fixtures::eye(static_cast<std::size_t>(st.range(0)));
  const auto nerves = tensor_mdn(std::vector<MdnMorphism>(static_cast<std::size_t>(st.range(0)), ey.retina.nerve));
  std::vector<ModalDynamicalSystem> leaves(static_cast<std::size_t>(st.range(0)), ey.retina.dynamics);
  const auto d = tensor_mds(leaves);
  CheckOptions co;
  co.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(check_functoriality(nerves, ey.eye, d, co));
}
BENCHMARK(BM_Functoriality)->ArgsProduct({{2, 3}, {0, 1}})->ArgNames({"width", "parallel"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
