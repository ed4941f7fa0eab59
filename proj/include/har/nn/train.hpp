#pragma once

#include "har/nn/adam.hpp"
#include "har/nn/batch.hpp"
#include "har/nn/network.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace har::nn {

struct TrainConfig {
  std::size_t epochs = 40;
  std::size_t batch_size = 64;
  AdamConfig adam;
  /// Parameters are initialized from mix_seed(seed, 0); the per-epoch
  /// shuffles draw from one Rng seeded with mix_seed(seed, 1).
  std::uint64_t seed = 42;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Metrics of one full evaluation pass over a split.
struct SplitMetrics {
  double loss = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const SplitMetrics&) const = default;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  SplitMetrics train;
  SplitMetrics test;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainRun {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // earliest epoch with the highest test accuracy

  bool operator==(const TrainRun&) const = default;
};

struct TrainResult {
  std::vector<float> params;  // parameters after best_epoch
  TrainRun run;
};

/// Evaluation pass used after every epoch. Macro metrics require every
/// class to be present in the split.
SplitMetrics split_metrics(const Predictions& pred, const SampleMatrix<float>& data, std::size_t classes);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam over seeded shuffles; the final partial batch of an epoch
/// is kept. After each epoch both splits are evaluated in full. Throws
/// std::invalid_argument on an empty split.
TrainResult train(const Network<float>& net, const SampleMatrix<float>& train_set,
                  const SampleMatrix<float>& test_set, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace har::nn
