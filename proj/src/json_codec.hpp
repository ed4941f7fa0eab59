#pragma once

// JSON mapping of the configuration structs, shared by the config file and
// the checkpoint metadata block. Readers reject unknown keys and wrong types;
// keys that are absent keep the value already in the target.

#include "har/dsp.hpp"
#include "har/nn/model_spec.hpp"
#include "har/nn/train.hpp"

#include <json.hpp>

#include <string>

namespace har::json_codec {

using nlohmann::json;

nlohmann::ordered_json to_json(const dsp::WelchConfig& c);
nlohmann::ordered_json to_json(const nn::ConvSpec& c);
nlohmann::ordered_json to_json(const nn::DenseSpec& c);
nlohmann::ordered_json to_json(const nn::ChannelSpec& c);
nlohmann::ordered_json to_json(const nn::TrainConfig& c);
/// Full spec including input dimensions and class count.
nlohmann::ordered_json to_json(const nn::ModelSpec& s);

/// Each reader throws E (ConfigError or FormatError) naming `where`.
template <class E>
void read(const json& j, const std::string& where, dsp::WelchConfig& out);
template <class E>
void read(const json& j, const std::string& where, nn::ChannelSpec& out);
template <class E>
void read(const json& j, const std::string& where, nn::TrainConfig& out);
template <class E>
void read(const json& j, const std::string& where, nn::ModelSpec& out);

}  // namespace har::json_codec
