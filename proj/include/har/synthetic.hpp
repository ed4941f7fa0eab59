#pragma once

#include "har/dataset.hpp"

#include <cstdint>
#include <filesystem>

namespace har {

/// Options for writing a synthetic dataset in the UCI HAR directory layout.
/// Used for tests, demos and benchmarks when the real recordings are absent.
struct SyntheticOptions {
  ClassCounts train_counts{20, 20, 20, 20, 20, 20};
  ClassCounts test_counts{10, 10, 10, 10, 10, 10};
  std::uint64_t seed = 1;
  /// Write literal zeros instead of class-dependent signals (small files,
  /// useful when only counts matter).
  bool zeros = false;
  /// Additive noise standard deviation relative to the class tone amplitude.
  double noise = 0.6;
};

/// Class-dependent tone mixture plus Gaussian noise for one window.
InertialWindow synthetic_window(const ActivityClass& activity, std::uint64_t seed,
                                std::uint64_t index, double noise);

/// The windows write_synthetic_dataset would store for `split`, in file
/// order (`options.zeros` is ignored).
SplitManifest synthetic_manifest(Split split, const ClassCounts& counts, const SyntheticOptions& options);

/// Writes <root>/{train,test}/... with labels interleaved across classes.
void write_synthetic_dataset(const std::filesystem::path& root, const SyntheticOptions& options);

/// Synthetic windows with the published counts for both splits.
SyntheticOptions published_count_options();

}  // namespace har
