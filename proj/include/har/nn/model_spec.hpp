#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace har::nn {

enum class Activation { identity, relu, sigmoid };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// One convolution stage: valid 1-D convolution over all input streams,
/// activation, then non-overlapping max pooling of width `pool` (1 = none).
struct ConvSpec {
  std::size_t filters = 32;
  std::size_t kernel = 7;
  std::size_t stride = 1;
  Activation activation = Activation::relu;
  std::size_t pool = 2;

  bool operator==(const ConvSpec&) const = default;
};

struct DenseSpec {
  std::size_t units = 128;
  Activation activation = Activation::relu;

  bool operator==(const DenseSpec&) const = default;
};

/// Convolution stack plus the dense layer that closes one input channel.
struct ChannelSpec {
  std::vector<ConvSpec> convs;
  DenseSpec dense;

  bool operator==(const ChannelSpec&) const = default;
};

/// Two-channel network: the frequency features (streams x freq_bins) and the
/// power features (streams x power_bins) each pass through their own channel
/// stack; the two dense outputs are concatenated and mapped to `classes`
/// logits by a final affine layer.
struct ModelSpec {
  std::size_t streams = 9;
  std::size_t freq_bins = 65;
  std::size_t power_bins = 33;
  std::size_t classes = 6;
  ChannelSpec freq_channel;
  ChannelSpec power_channel;

  /// 2 x [conv 32@7 relu, pool 2] -> [conv 64@5 relu, pool 2] -> dense 128 relu.
  static ModelSpec defaults();

  /// Throws std::invalid_argument when the channels differ in hyperparameters
  /// or any stage does not fit its input length.
  void validate() const;

  bool operator==(const ModelSpec&) const = default;
};

/// Where one named parameter tensor lives inside the flat parameter vector.
struct ParamSlot {
  std::string name;
  std::vector<std::size_t> dims;
  std::size_t offset = 0;
  std::size_t size = 0;
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  bool is_bias = false;
  /// Activation following this layer, which selects the init scale.
  Activation activation = Activation::identity;
};

struct ConvLayout {
  ConvSpec spec;
  std::size_t in_streams = 0;
  std::size_t in_len = 0;
  std::size_t out_len = 0;
  std::size_t pooled_len = 0;
  std::size_t weight = 0;  // offset of [filters][kernel][in_streams]
  std::size_t bias = 0;    // offset of [filters]
};

struct ChannelLayout {
  std::vector<ConvLayout> convs;
  std::size_t in_streams = 0;
  std::size_t in_len = 0;
  std::size_t flat_dim = 0;  // pooled_len x filters of the last stage
  DenseSpec dense;
  std::size_t dense_weight = 0;  // [units][flat_dim]
  std::size_t dense_bias = 0;
};

/// Offsets of every parameter tensor in one contiguous vector, in the order
/// freq channel, power channel, fusion layer.
struct NetworkLayout {
  ModelSpec spec;
  ChannelLayout freq;
  ChannelLayout power;
  std::size_t fusion_in = 0;
  std::size_t fusion_weight = 0;  // [classes][fusion_in]
  std::size_t fusion_bias = 0;
  std::size_t param_count = 0;
  std::vector<ParamSlot> slots;
};

/// floor((in_len - kernel) / stride) + 1; throws when kernel > in_len.
std::size_t conv_output_length(std::size_t in_len, std::size_t kernel, std::size_t stride);

NetworkLayout make_layout(const ModelSpec& spec);

}  // namespace har::nn
