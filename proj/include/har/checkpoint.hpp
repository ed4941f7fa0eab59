#pragma once

// Model checkpoint ("HARMCNN1"), little-endian:
//   8 bytes  magic "HARMCNN1"
//   u16      format version (kCheckpointVersion)
//   u32 + n  UTF-8 JSON metadata: architecture, welch, stream_order,
//            class_labels, seed, epoch, train, norm_epsilon
//   u32      record count
//   records  one tensor record per parameter slot, named as in the network
//            layout, then norm.freq_mean, norm.freq_std, norm.power_mean,
//            norm.power_std

#include "har/dsp.hpp"
#include "har/features.hpp"
#include "har/nn/model_spec.hpp"
#include "har/nn/train.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace har {

inline constexpr std::uint16_t kCheckpointVersion = 1;

struct Checkpoint {
  nn::ModelSpec model;
  dsp::WelchConfig welch;
  nn::TrainConfig train;
  std::uint64_t seed = 0;
  std::size_t epoch = 0;  // 1-based epoch the parameters were taken from
  NormStats norm;
  std::vector<float> params;  // flat, in network layout order

  bool operator==(const Checkpoint&) const = default;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
/// Throws FormatError on a bad magic, an unsupported version, metadata that
/// disagrees with the records, or truncation.
Checkpoint decode_checkpoint(std::string_view bytes, const std::string& source = "<memory>");

/// Atomic (temp file + rename).
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace har
