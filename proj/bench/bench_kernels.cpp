// Serial reference vs OpenMP kernel for each parallel hot path. Every pair
// produces identical bits, so the ratio is the whole story. Thread count
// follows OMP_NUM_THREADS.

#include "har/features.hpp"
#include "har/nn/adam.hpp"
#include "har/nn/batch.hpp"
#include "har/rng.hpp"
#include "har/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <numeric>

namespace {

using namespace har;

SplitManifest windows(std::size_t per_class) {
  ClassCounts counts{};
  counts.fill(per_class);
  return synthetic_manifest(Split::train, counts, SyntheticOptions{});
}

void BM_Extract(benchmark::State& state, bool parallel) {
  const auto m = windows(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto f = parallel ? extract_features_batch(m.samples, {}) : extract_features_serial(m.samples, {});
    benchmark::DoNotOptimize(f.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.samples.size()));
}

struct Model {
  nn::Network<float> net{nn::ModelSpec::defaults()};
  nn::SampleMatrix<float> data;
  std::vector<float> params;

  explicit Model(std::size_t per_class) {
    const auto set = build_feature_set(windows(per_class), dsp::WelchConfig{});
    data = nn::make_sample_matrix<float>(set, quantize(fit_normalizer(set.tensors)));
    params = nn::init_params<float>(net.layout(), 42);
  }
};

void BM_Gradient(benchmark::State& state, bool parallel) {
  Model m(11);  // 66 samples; one default batch of 64
  nn::BatchGradient<float> bg(m.net);
  std::vector<std::size_t> idx(64);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<float> grad(m.params.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? bg.compute(m.params, m.data, idx, grad)
                                      : bg.compute_serial(m.params, m.data, idx, grad));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}

void BM_Predict(benchmark::State& state, bool parallel) {
  Model m(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto p = parallel ? nn::predict(m.net, m.params, m.data) : nn::predict_serial(m.net, m.params, m.data);
    benchmark::DoNotOptimize(p.probs.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.data.count));
}

void BM_Adam(benchmark::State& state, bool parallel) {
  const nn::Network<float> net(nn::ModelSpec::defaults());
  auto params = nn::init_params<float>(net.layout(), 1);
  std::vector<float> grad(params.size());
  Rng rng(2);
  for (auto& g : grad) g = static_cast<float>(rng.uniform(-1.0, 1.0));
  nn::Adam<float> adam(params.size(), {});
  for (auto _ : state) {
    parallel ? adam.step(params, grad) : adam.step_serial(params, grad);
    benchmark::DoNotOptimize(params.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(params.size()));
}

BENCHMARK_CAPTURE(BM_Extract, serial, false)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extract, openmp, true)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Gradient, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Gradient, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Predict, serial, false)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Predict, openmp, true)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Adam, serial, false)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Adam, openmp, true)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
