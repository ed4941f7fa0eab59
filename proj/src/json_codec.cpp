#include "json_codec.hpp"

#include "har/error.hpp"

#include <set>

namespace har::json_codec {

using ojson = nlohmann::ordered_json;

ojson to_json(const dsp::WelchConfig& c) {
  return ojson{{"segment_len", c.segment_len}, {"overlap", c.overlap}, {"window", dsp::to_string(c.window)}};
}

ojson to_json(const nn::ConvSpec& c) {
  return ojson{{"filters", c.filters},
               {"kernel", c.kernel},
               {"stride", c.stride},
               {"activation", nn::to_string(c.activation)},
               {"pool", c.pool}};
}

ojson to_json(const nn::DenseSpec& c) {
  return ojson{{"units", c.units}, {"activation", nn::to_string(c.activation)}};
}

ojson to_json(const nn::ChannelSpec& c) {
  ojson convs = ojson::array();
  for (const auto& cv : c.convs) convs.push_back(to_json(cv));
  return ojson{{"convs", convs}, {"dense", to_json(c.dense)}};
}

ojson to_json(const nn::TrainConfig& c) {
  return ojson{{"epochs", c.epochs},
               {"batch_size", c.batch_size},
               {"learning_rate", c.adam.learning_rate},
               {"beta1", c.adam.beta1},
               {"beta2", c.adam.beta2},
               {"adam_eps", c.adam.epsilon},
               {"seed", c.seed}};
}

ojson to_json(const nn::ModelSpec& s) {
  return ojson{{"streams", s.streams},
               {"freq_bins", s.freq_bins},
               {"power_bins", s.power_bins},
               {"classes", s.classes},
               {"freq_channel", to_json(s.freq_channel)},
               {"power_channel", to_json(s.power_channel)}};
}

namespace {

/// Tracks which keys of one object were consumed so leftovers can be reported.
template <class E>
class Object {
 public:
  Object(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw E(where_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json& at(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  void size(const char* key, std::size_t& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_unsigned()) throw E(path(key) + ": expected a non-negative integer");
    out = v.get<std::size_t>();
  }

  void u64(const char* key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number_unsigned()) throw E(path(key) + ": expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void real(const char* key, double& out) {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_number()) throw E(path(key) + ": expected a number");
    out = v.get<double>();
  }

  std::string string(const char* key) {
    const json& v = at(key);
    if (!v.is_string()) throw E(path(key) + ": expected a string");
    return v.get<std::string>();
  }

  void activation(const char* key, nn::Activation& out) {
    if (!has(key)) return;
    const std::string name = string(key);
    try {
      out = nn::activation_from_string(name);
    } catch (const std::invalid_argument& e) {
      throw E(path(key) + ": " + e.what());
    }
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw E(where_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <class E>
void read_conv(const json& j, const std::string& where, nn::ConvSpec& out) {
  Object<E> o(j, where);
  o.size("filters", out.filters);
  o.size("kernel", out.kernel);
  o.size("stride", out.stride);
  o.activation("activation", out.activation);
  o.size("pool", out.pool);
  o.finish();
}

template <class E>
void read_dense(const json& j, const std::string& where, nn::DenseSpec& out) {
  Object<E> o(j, where);
  o.size("units", out.units);
  o.activation("activation", out.activation);
  o.finish();
}

}  // namespace

template <class E>
void read(const json& j, const std::string& where, dsp::WelchConfig& out) {
  Object<E> o(j, where);
  o.size("segment_len", out.segment_len);
  o.size("overlap", out.overlap);
  if (o.has("window")) {
    const std::string name = o.string("window");
    try {
      out.window = dsp::window_kind_from_string(name);
    } catch (const std::invalid_argument& e) {
      throw E(o.path("window") + ": " + e.what());
    }
  }
  o.finish();
}

template <class E>
void read(const json& j, const std::string& where, nn::ChannelSpec& out) {
  Object<E> o(j, where);
  if (o.has("convs")) {
    const json& arr = o.at("convs");
    if (!arr.is_array()) throw E(o.path("convs") + ": expected an array");
    out.convs.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      nn::ConvSpec c;
      read_conv<E>(arr[i], o.path("convs") + "[" + std::to_string(i) + "]", c);
      out.convs.push_back(c);
    }
  }
  if (o.has("dense")) read_dense<E>(o.at("dense"), o.path("dense"), out.dense);
  o.finish();
}

template <class E>
void read(const json& j, const std::string& where, nn::TrainConfig& out) {
  Object<E> o(j, where);
  o.size("epochs", out.epochs);
  o.size("batch_size", out.batch_size);
  o.real("learning_rate", out.adam.learning_rate);
  o.real("beta1", out.adam.beta1);
  o.real("beta2", out.adam.beta2);
  o.real("adam_eps", out.adam.epsilon);
  o.u64("seed", out.seed);
  o.finish();
}

template <class E>
void read(const json& j, const std::string& where, nn::ModelSpec& out) {
  Object<E> o(j, where);
  o.size("streams", out.streams);
  o.size("freq_bins", out.freq_bins);
  o.size("power_bins", out.power_bins);
  o.size("classes", out.classes);
  if (o.has("freq_channel")) read<E>(o.at("freq_channel"), o.path("freq_channel"), out.freq_channel);
  if (o.has("power_channel")) read<E>(o.at("power_channel"), o.path("power_channel"), out.power_channel);
  o.finish();
}

template void read<ConfigError>(const json&, const std::string&, dsp::WelchConfig&);
template void read<ConfigError>(const json&, const std::string&, nn::ChannelSpec&);
template void read<ConfigError>(const json&, const std::string&, nn::TrainConfig&);
template void read<ConfigError>(const json&, const std::string&, nn::ModelSpec&);
template void read<FormatError>(const json&, const std::string&, dsp::WelchConfig&);
template void read<FormatError>(const json&, const std::string&, nn::ChannelSpec&);
template void read<FormatError>(const json&, const std::string&, nn::TrainConfig&);
template void read<FormatError>(const json&, const std::string&, nn::ModelSpec&);

}  // namespace har::json_codec
