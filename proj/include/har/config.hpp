#pragma once

#include "har/dsp.hpp"
#include "har/features.hpp"
#include "har/nn/model_spec.hpp"
#include "har/nn/train.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace har {

/// Everything a pipeline run depends on. The JSON form written by
/// config_to_json lists every field; when reading, absent keys keep their
/// defaults and unknown keys are rejected.
struct RunConfig {
  std::filesystem::path dataset_root = "data/UCI HAR Dataset";
  std::filesystem::path output_dir = "out";
  dsp::WelchConfig welch;
  nn::ChannelSpec freq_channel = nn::ModelSpec::defaults().freq_channel;
  nn::ChannelSpec power_channel = nn::ModelSpec::defaults().power_channel;
  nn::TrainConfig train;
  double norm_epsilon = kDefaultNormEpsilon;

  /// Network spec with input sizes derived from the window length and the
  /// Welch segment length.
  nn::ModelSpec model_spec() const;

  /// Throws ConfigError when any part is unusable.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

std::string config_to_json(const RunConfig& cfg);
/// Throws ConfigError on malformed JSON, wrong types or unknown keys.
RunConfig config_from_json(std::string_view text, const std::string& source = "<config>");

RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& cfg);

}  // namespace har
