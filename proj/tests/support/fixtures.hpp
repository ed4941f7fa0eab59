#pragma once

// Small in-memory datasets built from synthetic windows.

#include "har/features.hpp"
#include "har/nn/batch.hpp"
#include "har/rng.hpp"
#include "har/synthetic.hpp"

namespace har::testing {

inline FeatureSet synthetic_features(Split split, std::size_t per_class, std::uint64_t seed = 1,
                                     double noise = 0.6) {
  ClassCounts counts{};
  counts.fill(per_class);
  SyntheticOptions opt;
  opt.seed = seed;
  opt.noise = noise;
  return build_feature_set(synthetic_manifest(split, counts, opt), dsp::WelchConfig{});
}

/// Replaces the labels with a seeded random permutation of a balanced
/// assignment, so nothing but memorization can fit them.
inline void scramble_labels(FeatureSet& set, std::uint64_t seed) {
  std::vector<std::size_t> idx(set.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i % kNumClasses;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(idx));
  for (std::size_t i = 0; i < idx.size(); ++i) set.labels[i] = class_at(idx[i]);
}

inline nn::SampleMatrix<float> normalized(const FeatureSet& set, const NormStats& stats) {
  return nn::make_sample_matrix<float>(set, stats);
}

}  // namespace har::testing
