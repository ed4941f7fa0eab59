#include "har/config.hpp"

#include "har/binary_io.hpp"
#include "har/dataset.hpp"
#include "har/error.hpp"
#include "json_codec.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace har {

nn::ModelSpec RunConfig::model_spec() const {
  nn::ModelSpec s;
  s.streams = kNumStreams;
  s.freq_bins = kWindowLen / 2 + 1;
  s.power_bins = welch.bins();
  s.classes = kNumClasses;
  s.freq_channel = freq_channel;
  s.power_channel = power_channel;
  return s;
}

void RunConfig::validate() const {
  try {
    welch.validate(kWindowLen);
    model_spec().validate();
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  if (!(norm_epsilon >= 0.0) || !std::isfinite(norm_epsilon)) {
    throw ConfigError("invalid configuration: norm_epsilon must be finite and non-negative");
  }
}

std::string config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["dataset_root"] = cfg.dataset_root.generic_string();
  j["output_dir"] = cfg.output_dir.generic_string();
  j["welch"] = json_codec::to_json(cfg.welch);
  j["model"] = {{"freq_channel", json_codec::to_json(cfg.freq_channel)},
                {"power_channel", json_codec::to_json(cfg.power_channel)}};
  j["train"] = json_codec::to_json(cfg.train);
  j["norm_epsilon"] = cfg.norm_epsilon;
  return j.dump(2) + "\n";
}

RunConfig config_from_json(std::string_view text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(source + ": top level must be an object");
  RunConfig cfg;
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const auto& v = item.value();
    const std::string where = source + ": " + key;
    if (key == "dataset_root" || key == "output_dir") {
      if (!v.is_string()) throw ConfigError(where + ": expected a string");
      (key == "dataset_root" ? cfg.dataset_root : cfg.output_dir) = v.get<std::string>();
    } else if (key == "welch") {
      json_codec::read<ConfigError>(v, where, cfg.welch);
    } else if (key == "model") {
      if (!v.is_object()) throw ConfigError(where + ": expected an object");
      for (const auto& m : v.items()) {
        if (m.key() == "freq_channel") {
          json_codec::read<ConfigError>(m.value(), where + ".freq_channel", cfg.freq_channel);
        } else if (m.key() == "power_channel") {
          json_codec::read<ConfigError>(m.value(), where + ".power_channel", cfg.power_channel);
        } else {
          throw ConfigError(where + ": unknown key '" + m.key() + "'");
        }
      }
    } else if (key == "train") {
      json_codec::read<ConfigError>(v, where, cfg.train);
    } else if (key == "norm_epsilon") {
      if (!v.is_number()) throw ConfigError(where + ": expected a number");
      cfg.norm_epsilon = v.get<double>();
    } else {
      throw ConfigError(source + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), path.string());
}

void save_config(const std::filesystem::path& path, const RunConfig& cfg) {
  atomic_write_file(path, config_to_json(cfg));
}

}  // namespace har
