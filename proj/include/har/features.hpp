#pragma once

#include "har/binary_io.hpp"
#include "har/dataset.hpp"
#include "har/dsp.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace har {

/// Two-channel feature tensor for one window. The frequency channel holds the
/// one-sided FFT magnitude of each stream, the power channel its Welch PSD.
/// Both are stream-major (kNumStreams rows).
struct FeatureTensor {
  std::size_t freq_bins = 0;
  std::size_t power_bins = 0;
  std::vector<double> freq;   // kNumStreams x freq_bins
  std::vector<double> power;  // kNumStreams x power_bins

  FeatureTensor() = default;
  FeatureTensor(std::size_t freq_bins_, std::size_t power_bins_)
      : freq_bins(freq_bins_),
        power_bins(power_bins_),
        freq(kNumStreams * freq_bins_, 0.0),
        power(kNumStreams * power_bins_, 0.0) {}

  std::span<const double> freq_row(std::size_t s) const {
    return std::span<const double>(freq).subspan(s * freq_bins, freq_bins);
  }
  std::span<const double> power_row(std::size_t s) const {
    return std::span<const double>(power).subspan(s * power_bins, power_bins);
  }
  bool same_shape(const FeatureTensor& o) const {
    return freq_bins == o.freq_bins && power_bins == o.power_bins &&
           freq.size() == o.freq.size() && power.size() == o.power.size();
  }
  bool operator==(const FeatureTensor&) const = default;
};

FeatureTensor extract_features(const InertialWindow& window, const dsp::WelchConfig& cfg);

/// OpenMP kernel over samples. Output order matches input order and each
/// element is bit-identical to extract_features_serial.
std::vector<FeatureTensor> extract_features_batch(std::span<const LabeledSample> samples,
                                                  const dsp::WelchConfig& cfg);
/// Single-threaded reference for extract_features_batch.
std::vector<FeatureTensor> extract_features_serial(std::span<const LabeledSample> samples,
                                                   const dsp::WelchConfig& cfg);

/// Rounds every value to the nearest 32-bit float (the cache precision).
FeatureTensor quantize(FeatureTensor t);

/// Per-position training statistics for z-score normalization.
struct NormStats {
  std::size_t freq_bins = 0;
  std::size_t power_bins = 0;
  std::vector<double> freq_mean, freq_std;
  std::vector<double> power_mean, power_std;
  double epsilon = 1e-8;

  bool operator==(const NormStats&) const = default;
};

inline constexpr double kDefaultNormEpsilon = 1e-8;

/// Mean and population standard deviation at every position, reduced
/// sequentially in input order. Throws std::invalid_argument on empty input
/// and ShapeError on mixed shapes.
NormStats fit_normalizer(std::span<const FeatureTensor> tensors,
                         double epsilon = kDefaultNormEpsilon);

/// Rounds means and deviations to 32-bit floats, the precision they are
/// persisted at, so in-memory and reloaded statistics agree exactly.
NormStats quantize(NormStats stats);

/// (t - mean) / (std + epsilon), elementwise.
FeatureTensor apply_normalizer(const FeatureTensor& t, const NormStats& stats);
/// t * (std + epsilon) + mean; inverse of apply_normalizer.
FeatureTensor invert_normalizer(const FeatureTensor& t, const NormStats& stats);

/// Labeled feature tensors for one split, as stored in a feature cache.
struct FeatureSet {
  std::size_t freq_bins = 0;
  std::size_t power_bins = 0;
  std::vector<FeatureTensor> tensors;
  std::vector<ActivityClass> labels;

  std::size_t size() const { return tensors.size(); }
};

/// Extracts and quantizes features for every sample of a split.
FeatureSet build_feature_set(const SplitManifest& manifest, const dsp::WelchConfig& cfg,
                             bool parallel = true);

/// Feature cache layout (little-endian):
///   "HARFEAT1", u32 sample count, u32 freq bins, u32 power bins,
///   then per sample: u8 class id, 9 x freq_bins f32, 9 x power_bins f32.
std::string encode_feature_cache(const FeatureSet& set);
FeatureSet decode_feature_cache(std::string_view bytes, const std::string& source = "<memory>");
void write_feature_cache(const std::filesystem::path& path, const FeatureSet& set);
FeatureSet read_feature_cache(const std::filesystem::path& path);

/// Four tensor records <prefix>freq_mean, <prefix>freq_std, <prefix>power_mean,
/// <prefix>power_std, each kNumStreams x bins.
std::vector<TensorRecord> norm_stats_records(const NormStats& stats, const std::string& prefix);
/// Inverse of norm_stats_records; looks records up by name.
NormStats norm_stats_from_records(std::span<const TensorRecord> records, const std::string& prefix,
                                  double epsilon);

/// NormStats sidecar: "HARNORM1", f64 epsilon, u32 record count, then tensor
/// records freq_mean, freq_std, power_mean, power_std (9 x bins each).
std::string encode_norm_stats(const NormStats& stats);
NormStats decode_norm_stats(std::string_view bytes, const std::string& source = "<memory>");
void write_norm_stats(const std::filesystem::path& path, const NormStats& stats);
NormStats read_norm_stats(const std::filesystem::path& path);

}  // namespace har
