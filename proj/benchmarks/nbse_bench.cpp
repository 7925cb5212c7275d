// Microbenchmarks for the numeric kernels on realistic k-NN graphs:
// assembly, extremal eigenpair, Nishimori root search, graph construction
// and histogram selection. Sizes follow the M = 200..800 range the library
// targets.
#include <benchmark/benchmark.h>

#include <random>

#include "nbse/ablation.hpp"
#include "nbse/bethe_hessian.hpp"
#include "nbse/fingerprint.hpp"
#include "nbse/graph.hpp"
#include "nbse/nishimori.hpp"
#include "nbse/rng.hpp"
#include "nbse/synthetic.hpp"

namespace {

using namespace nbse;

SyntheticData blobs(int m) {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::sbm_blobs;
  spec.m = m;
  spec.d = 60;
  spec.classes = 2;
  spec.separation = 6.0;
  spec.seed = 1;
  return make_synthetic(spec);
}

SimilarityGraph knn(const SyntheticData& synth) {
  return build_knn_graph(synth.data.X, 9, local_scales(synth.data.X, 10),
                         false);
}

void BM_local_scales(benchmark::State& state) {
  const SyntheticData synth = blobs(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(local_scales(synth.data.X, 10));
}
BENCHMARK(BM_local_scales)->Arg(200)->Arg(400)->Arg(800)
    ->Unit(benchmark::kMillisecond);

void BM_build_knn_graph(benchmark::State& state) {
  const SyntheticData synth = blobs(static_cast<int>(state.range(0)));
  const LocalScales scales = local_scales(synth.data.X, 10);
  for (auto _ : state)
    benchmark::DoNotOptimize(build_knn_graph(synth.data.X, 9, scales, false));
}
BENCHMARK(BM_build_knn_graph)->Arg(200)->Arg(400)->Arg(800)
    ->Unit(benchmark::kMillisecond);

void BM_assemble(benchmark::State& state) {
  const SyntheticData synth = blobs(static_cast<int>(state.range(0)));
  const SimilarityGraph g = knn(synth);
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_bethe_hessian(g, 0.4));
}
BENCHMARK(BM_assemble)->Arg(200)->Arg(400)->Arg(800)
    ->Unit(benchmark::kMicrosecond);

void BM_smallest_eigenpair(benchmark::State& state) {
  const SyntheticData synth = blobs(static_cast<int>(state.range(0)));
  const BetheHessianAssembly a = assemble_bethe_hessian(knn(synth), 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(smallest_eigenpair(a));
}
BENCHMARK(BM_smallest_eigenpair)->Arg(200)->Arg(400)->Arg(800)
    ->Unit(benchmark::kMillisecond);

void BM_find_beta_n(benchmark::State& state) {
  const SyntheticData synth = blobs(static_cast<int>(state.range(0)));
  const SimilarityGraph g = knn(synth);
  for (auto _ : state) benchmark::DoNotOptimize(find_beta_n(g));
}
BENCHMARK(BM_find_beta_n)->Arg(200)->Arg(400)
    ->Unit(benchmark::kMillisecond);

void BM_feature_axis_embedding(benchmark::State& state) {
  const SyntheticData synth = blobs(200);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        feature_axis_embedding(synth.data.X, FeatureAxisParams{}));
}
BENCHMARK(BM_feature_axis_embedding)->Unit(benchmark::kMillisecond);

void BM_select_features(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 gen(9);
  Eigen::VectorXd phi(d);
  for (int i = 0; i < d; ++i) phi[i] = uniform_unit(gen);
  for (auto _ : state)
    benchmark::DoNotOptimize(select_features(phi, d / 4));
}
BENCHMARK(BM_select_features)->Arg(60)->Arg(200)->Arg(2000)
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
