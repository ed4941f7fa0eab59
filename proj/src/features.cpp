#include "har/features.hpp"

#include "har/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace har {

namespace {

constexpr std::string_view kCacheMagic = "HARFEAT1";
constexpr std::string_view kNormMagic = "HARNORM1";

double to_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

}  // namespace

FeatureTensor extract_features(const InertialWindow& window, const dsp::WelchConfig& cfg) {
  cfg.validate(kWindowLen);
  FeatureTensor out(kWindowLen / 2 + 1, cfg.bins());
  for (std::size_t s = 0; s < kNumStreams; ++s) {
    const auto stream = window.stream(s);
    const auto mag = dsp::magnitude_onesided(dsp::fft_real(stream));
    std::copy(mag.begin(), mag.end(), out.freq.begin() + static_cast<std::ptrdiff_t>(s * out.freq_bins));
    const auto psd = dsp::welch_psd(stream, cfg, kSampleRateHz);
    std::copy(psd.values.begin(), psd.values.end(),
              out.power.begin() + static_cast<std::ptrdiff_t>(s * out.power_bins));
  }
  return out;
}

std::vector<FeatureTensor> extract_features_batch(std::span<const LabeledSample> samples,
                                                  const dsp::WelchConfig& cfg) {
  cfg.validate(kWindowLen);
  std::vector<FeatureTensor> out(samples.size());
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = extract_features(samples[static_cast<std::size_t>(i)].window, cfg);
  }
  return out;
}

std::vector<FeatureTensor> extract_features_serial(std::span<const LabeledSample> samples,
                                                   const dsp::WelchConfig& cfg) {
  std::vector<FeatureTensor> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(extract_features(s.window, cfg));
  return out;
}

FeatureTensor quantize(FeatureTensor t) {
  for (double& v : t.freq) v = to_f32(v);
  for (double& v : t.power) v = to_f32(v);
  return t;
}

NormStats fit_normalizer(std::span<const FeatureTensor> tensors, double epsilon) {
  if (tensors.empty()) throw std::invalid_argument("fit_normalizer: no training tensors");
  if (!(epsilon > 0.0)) throw std::invalid_argument("fit_normalizer: epsilon must be positive");
  const FeatureTensor& first = tensors.front();
  for (const auto& t : tensors) {
    if (!t.same_shape(first)) throw ShapeError("fit_normalizer: tensors have mixed shapes");
  }

  NormStats stats;
  stats.freq_bins = first.freq_bins;
  stats.power_bins = first.power_bins;
  stats.epsilon = epsilon;
  const double n = static_cast<double>(tensors.size());

  const auto fit = [&](auto member, std::vector<double>& mean, std::vector<double>& sd) {
    const std::size_t len = (first.*member).size();
    mean.assign(len, 0.0);
    sd.assign(len, 0.0);
    for (const auto& t : tensors) {
      const auto& v = t.*member;
      for (std::size_t i = 0; i < len; ++i) mean[i] += v[i];
    }
    for (double& m : mean) m /= n;
    for (const auto& t : tensors) {
      const auto& v = t.*member;
      for (std::size_t i = 0; i < len; ++i) {
        const double d = v[i] - mean[i];
        sd[i] += d * d;
      }
    }
    for (double& s : sd) s = std::sqrt(s / n);
  };
  fit(&FeatureTensor::freq, stats.freq_mean, stats.freq_std);
  fit(&FeatureTensor::power, stats.power_mean, stats.power_std);
  return stats;
}

NormStats quantize(NormStats stats) {
  for (auto* v : {&stats.freq_mean, &stats.freq_std, &stats.power_mean, &stats.power_std}) {
    for (double& x : *v) x = to_f32(x);
  }
  return stats;
}

namespace {

void check_stats_shape(const FeatureTensor& t, const NormStats& s) {
  if (t.freq_bins != s.freq_bins || t.power_bins != s.power_bins ||
      t.freq.size() != s.freq_mean.size() || t.power.size() != s.power_mean.size()) {
    throw ShapeError("normalizer: tensor shape (" + std::to_string(t.freq_bins) + ", " +
                     std::to_string(t.power_bins) + ") does not match statistics (" +
                     std::to_string(s.freq_bins) + ", " + std::to_string(s.power_bins) + ")");
  }
}

}  // namespace

FeatureTensor apply_normalizer(const FeatureTensor& t, const NormStats& s) {
  check_stats_shape(t, s);
  FeatureTensor out = t;
  for (std::size_t i = 0; i < out.freq.size(); ++i) {
    out.freq[i] = (t.freq[i] - s.freq_mean[i]) / (s.freq_std[i] + s.epsilon);
  }
  for (std::size_t i = 0; i < out.power.size(); ++i) {
    out.power[i] = (t.power[i] - s.power_mean[i]) / (s.power_std[i] + s.epsilon);
  }
  return out;
}

FeatureTensor invert_normalizer(const FeatureTensor& t, const NormStats& s) {
  check_stats_shape(t, s);
  FeatureTensor out = t;
  for (std::size_t i = 0; i < out.freq.size(); ++i) {
    out.freq[i] = t.freq[i] * (s.freq_std[i] + s.epsilon) + s.freq_mean[i];
  }
  for (std::size_t i = 0; i < out.power.size(); ++i) {
    out.power[i] = t.power[i] * (s.power_std[i] + s.epsilon) + s.power_mean[i];
  }
  return out;
}

FeatureSet build_feature_set(const SplitManifest& manifest, const dsp::WelchConfig& cfg,
                             bool parallel) {
  FeatureSet set;
  set.freq_bins = kWindowLen / 2 + 1;
  set.power_bins = cfg.bins();
  set.tensors = parallel ? extract_features_batch(manifest.samples, cfg)
                         : extract_features_serial(manifest.samples, cfg);
  for (auto& t : set.tensors) t = quantize(std::move(t));
  set.labels.reserve(manifest.samples.size());
  for (const auto& s : manifest.samples) set.labels.push_back(s.activity);
  return set;
}

std::string encode_feature_cache(const FeatureSet& set) {
  if (set.labels.size() != set.tensors.size()) {
    throw ShapeError("feature cache: label count does not match tensor count");
  }
  BinaryWriter w;
  w.bytes(kCacheMagic);
  w.u32(static_cast<std::uint32_t>(set.size()));
  w.u32(static_cast<std::uint32_t>(set.freq_bins));
  w.u32(static_cast<std::uint32_t>(set.power_bins));
  std::vector<float> row;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& t = set.tensors[i];
    if (t.freq_bins != set.freq_bins || t.power_bins != set.power_bins) {
      throw ShapeError("feature cache: tensor " + std::to_string(i) + " has the wrong shape");
    }
    w.u8(static_cast<std::uint8_t>(set.labels[i].id));
    row.assign(t.freq.begin(), t.freq.end());
    w.f32s(row);
    row.assign(t.power.begin(), t.power.end());
    w.f32s(row);
  }
  return w.take();
}

FeatureSet decode_feature_cache(std::string_view bytes, const std::string& source) {
  BinaryReader r(bytes, source);
  r.expect_magic(kCacheMagic);
  const auto count = r.u32();
  FeatureSet set;
  set.freq_bins = r.u32();
  set.power_bins = r.u32();
  const std::size_t per_sample = 1 + 4 * kNumStreams * (set.freq_bins + set.power_bins);
  if (static_cast<std::uint64_t>(count) * per_sample != r.remaining()) {
    throw FormatError(source + ": size does not match header (" + std::to_string(count) +
                      " samples of " + std::to_string(per_sample) + " bytes, " +
                      std::to_string(r.remaining()) + " bytes present)");
  }
  set.tensors.reserve(count);
  set.labels.reserve(count);
  std::vector<float> row;
  for (std::uint32_t i = 0; i < count; ++i) {
    const int id = r.u8();
    if (id < 1 || id > static_cast<int>(kNumClasses)) {
      throw FormatError(source + ": sample " + std::to_string(i) + " has class id " + std::to_string(id));
    }
    set.labels.push_back(class_of(id));
    FeatureTensor t(set.freq_bins, set.power_bins);
    row.resize(t.freq.size());
    r.f32s(row);
    std::copy(row.begin(), row.end(), t.freq.begin());
    row.resize(t.power.size());
    r.f32s(row);
    std::copy(row.begin(), row.end(), t.power.begin());
    set.tensors.push_back(std::move(t));
  }
  return set;
}

void write_feature_cache(const std::filesystem::path& path, const FeatureSet& set) {
  atomic_write_file(path, encode_feature_cache(set));
}

FeatureSet read_feature_cache(const std::filesystem::path& path) {
  return decode_feature_cache(read_binary_file(path), path.string());
}

std::vector<TensorRecord> norm_stats_records(const NormStats& s, const std::string& prefix) {
  const auto rec = [&](const char* name, const std::vector<double>& v, std::size_t bins) {
    TensorRecord r;
    r.name = prefix + name;
    r.dims = {static_cast<std::uint32_t>(kNumStreams), static_cast<std::uint32_t>(bins)};
    r.data.assign(v.begin(), v.end());
    return r;
  };
  return {rec("freq_mean", s.freq_mean, s.freq_bins), rec("freq_std", s.freq_std, s.freq_bins),
          rec("power_mean", s.power_mean, s.power_bins), rec("power_std", s.power_std, s.power_bins)};
}

NormStats norm_stats_from_records(std::span<const TensorRecord> records, const std::string& prefix,
                                  double epsilon) {
  const auto find = [&](const char* name) -> const TensorRecord& {
    const std::string full = prefix + name;
    for (const auto& r : records) {
      if (r.name == full) {
        if (r.dims.size() != 2 || r.dims[0] != kNumStreams) {
          throw FormatError("record '" + full + "' must be " + std::to_string(kNumStreams) + " x bins");
        }
        return r;
      }
    }
    throw FormatError("missing tensor record '" + full + "'");
  };
  NormStats s;
  s.epsilon = epsilon;
  const auto& fm = find("freq_mean");
  const auto& fs = find("freq_std");
  const auto& pm = find("power_mean");
  const auto& ps = find("power_std");
  if (fm.dims != fs.dims || pm.dims != ps.dims) throw FormatError("normalizer records disagree on shape");
  s.freq_bins = fm.dims[1];
  s.power_bins = pm.dims[1];
  s.freq_mean.assign(fm.data.begin(), fm.data.end());
  s.freq_std.assign(fs.data.begin(), fs.data.end());
  s.power_mean.assign(pm.data.begin(), pm.data.end());
  s.power_std.assign(ps.data.begin(), ps.data.end());
  return s;
}

std::string encode_norm_stats(const NormStats& stats) {
  BinaryWriter w;
  w.bytes(kNormMagic);
  w.f64(stats.epsilon);
  const auto records = norm_stats_records(stats, "");
  w.u32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) write_tensor_record(w, r);
  return w.take();
}

NormStats decode_norm_stats(std::string_view bytes, const std::string& source) {
  BinaryReader r(bytes, source);
  r.expect_magic(kNormMagic);
  const double eps = r.f64();
  const auto n = r.u32();
  std::vector<TensorRecord> records;
  for (std::uint32_t i = 0; i < n; ++i) records.push_back(read_tensor_record(r));
  if (!r.at_end()) throw FormatError(source + ": trailing bytes after normalizer records");
  return norm_stats_from_records(records, "", eps);
}

void write_norm_stats(const std::filesystem::path& path, const NormStats& stats) {
  atomic_write_file(path, encode_norm_stats(stats));
}

NormStats read_norm_stats(const std::filesystem::path& path) {
  return decode_norm_stats(read_binary_file(path), path.string());
}

}  // namespace har
