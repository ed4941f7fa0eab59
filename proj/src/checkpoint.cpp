#include "har/checkpoint.hpp"

#include "har/binary_io.hpp"
#include "har/dataset.hpp"
#include "har/error.hpp"
#include "json_codec.hpp"

#include <algorithm>

namespace har {

namespace {

constexpr std::string_view kMagic = "HARMCNN1";
constexpr std::string_view kNormPrefix = "norm.";

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  const auto layout = nn::make_layout(ckpt.model);
  if (ckpt.params.size() != layout.param_count) {
    throw ShapeError("checkpoint: " + std::to_string(ckpt.params.size()) + " parameters for a model of " +
                     std::to_string(layout.param_count));
  }
  nlohmann::ordered_json meta;
  meta["architecture"] = json_codec::to_json(ckpt.model);
  meta["welch"] = json_codec::to_json(ckpt.welch);
  meta["stream_order"] = kStreamNames;
  meta["class_labels"] = kClassLabels;
  meta["seed"] = ckpt.seed;
  meta["epoch"] = ckpt.epoch;
  meta["train"] = json_codec::to_json(ckpt.train);
  meta["norm_epsilon"] = ckpt.norm.epsilon;

  BinaryWriter w;
  w.bytes(kMagic);
  w.u16(kCheckpointVersion);
  w.str(meta.dump());
  const auto norm = norm_stats_records(ckpt.norm, std::string(kNormPrefix));
  w.u32(static_cast<std::uint32_t>(layout.slots.size() + norm.size()));
  for (const auto& slot : layout.slots) {
    TensorRecord r;
    r.name = slot.name;
    for (auto d : slot.dims) r.dims.push_back(static_cast<std::uint32_t>(d));
    r.data.assign(ckpt.params.begin() + static_cast<std::ptrdiff_t>(slot.offset),
                  ckpt.params.begin() + static_cast<std::ptrdiff_t>(slot.offset + slot.size));
    write_tensor_record(w, r);
  }
  for (const auto& r : norm) write_tensor_record(w, r);
  return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes, const std::string& source) {
  BinaryReader r(bytes, source);
  r.expect_magic(kMagic);
  const auto version = r.u16();
  if (version != kCheckpointVersion) {
    throw FormatError(source + ": unsupported checkpoint version " + std::to_string(version) + " (this build reads " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(r.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(source + ": metadata is not valid JSON: " + e.what());
  }
  if (!meta.is_object()) throw FormatError(source + ": metadata must be a JSON object");
  const auto need = [&](const char* key) -> const nlohmann::json& {
    if (!meta.contains(key)) throw FormatError(source + ": metadata lacks '" + key + "'");
    return meta.at(key);
  };

  Checkpoint c;
  json_codec::read<FormatError>(need("architecture"), source + ": architecture", c.model);
  json_codec::read<FormatError>(need("welch"), source + ": welch", c.welch);
  json_codec::read<FormatError>(need("train"), source + ": train", c.train);
  if (need("stream_order") != nlohmann::json(kStreamNames)) {
    throw FormatError(source + ": stream order differs from this build");
  }
  if (need("class_labels") != nlohmann::json(kClassLabels)) {
    throw FormatError(source + ": class labels differ from this build");
  }
  if (!need("seed").is_number_unsigned() || !need("epoch").is_number_unsigned() || !need("norm_epsilon").is_number()) {
    throw FormatError(source + ": seed, epoch and norm_epsilon must be numbers");
  }
  c.seed = meta["seed"].get<std::uint64_t>();
  c.epoch = meta["epoch"].get<std::size_t>();
  const double eps = meta["norm_epsilon"].get<double>();

  nn::NetworkLayout layout;
  try {
    c.model.validate();
    layout = nn::make_layout(c.model);
  } catch (const std::invalid_argument& e) {
    throw FormatError(source + ": invalid architecture: " + e.what());
  }

  const auto count = r.u32();
  std::vector<TensorRecord> records;
  records.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) records.push_back(read_tensor_record(r));
  if (!r.at_end()) throw FormatError(source + ": trailing bytes after tensor records");

  c.params.assign(layout.param_count, 0.0f);
  for (const auto& slot : layout.slots) {
    const auto it = std::find_if(records.begin(), records.end(), [&](const TensorRecord& t) { return t.name == slot.name; });
    if (it == records.end()) throw FormatError(source + ": missing tensor record '" + slot.name + "'");
    if (!std::equal(it->dims.begin(), it->dims.end(), slot.dims.begin(), slot.dims.end())) {
      throw FormatError(source + ": record '" + slot.name + "' has the wrong shape for the architecture");
    }
    std::copy(it->data.begin(), it->data.end(), c.params.begin() + static_cast<std::ptrdiff_t>(slot.offset));
  }
  c.norm = norm_stats_from_records(records, std::string(kNormPrefix), eps);
  if (c.norm.freq_bins != c.model.freq_bins || c.norm.power_bins != c.model.power_bins) {
    throw FormatError(source + ": normalizer shape does not match the architecture");
  }
  if (records.size() != layout.slots.size() + 4) {
    throw FormatError(source + ": unexpected extra tensor records");
  }
  return c;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  atomic_write_file(path, encode_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_binary_file(path), path.string());
}

}  // namespace har
