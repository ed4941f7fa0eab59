#include "har/synthetic.hpp"

#include "har/error.hpp"
#include "har/rng.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>

namespace har {

namespace fs = std::filesystem;

InertialWindow synthetic_window(const ActivityClass& activity, std::uint64_t seed,
                                std::uint64_t index, double noise) {
  Rng rng(mix_seed(seed, index));
  InertialWindow w;
  const auto c = static_cast<double>(activity.index());
  // Each class gets its own dominant cycle count and amplitude per stream; a
  // random phase and gain jitter keep individual windows distinct.
  for (std::size_t s = 0; s < kNumStreams; ++s) {
    const double cycles = 2.0 + static_cast<double>((activity.index() * 5 + s * 3) % 17);
    const double amp = 0.2 + 0.1 * c + 0.03 * static_cast<double>(s);
    const double gain = 1.0 + 0.2 * (rng.uniform01() - 0.5);
    const double phase = 2.0 * std::numbers::pi * rng.uniform01();
    const double offset = s >= 6 ? 0.3 * c : 0.0;
    auto stream = w.stream(s);
    for (std::size_t t = 0; t < kWindowLen; ++t) {
      const double arg =
          2.0 * std::numbers::pi * cycles * static_cast<double>(t) / kWindowLen + phase;
      stream[t] = offset + gain * amp * std::sin(arg) + noise * amp * rng.normal();
    }
  }
  return w;
}

namespace {

// Labels cycle through the classes that still have windows left, so any file
// prefix mixes classes the way the real recordings do.
std::vector<int> interleaved_labels(const ClassCounts& counts) {
  std::vector<int> labels;
  ClassCounts left = counts;
  bool any = true;
  while (any) {
    any = false;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (left[c] > 0) {
        labels.push_back(static_cast<int>(c) + 1);
        --left[c];
        any = true;
      }
    }
  }
  return labels;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DatasetError("cannot write " + p.string());
  return out;
}

void write_split(const fs::path& root, Split split, const ClassCounts& counts,
                 const SyntheticOptions& options) {
  const auto labels = interleaved_labels(counts);
  fs::create_directories(signal_file_path(root, split, kStreamNames[0]).parent_path());

  std::vector<InertialWindow> windows;
  if (!options.zeros) {
    for (auto& s : synthetic_manifest(split, counts, options).samples) windows.push_back(std::move(s.window));
  }

  char buf[32];
  for (std::size_t s = 0; s < kNumStreams; ++s) {
    auto out = open_out(signal_file_path(root, split, kStreamNames[s]));
    std::string line;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      line.clear();
      for (std::size_t t = 0; t < kWindowLen; ++t) {
        if (options.zeros) {
          line += " 0";
        } else {
          std::snprintf(buf, sizeof buf, " %.7e", windows[i].stream(s)[t]);
          line += buf;
        }
      }
      line += '\n';
      out << line;
    }
  }
  auto y = open_out(label_file_path(root, split));
  auto subj = open_out(subject_file_path(root, split));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y << labels[i] << '\n';
    subj << (1 + i % kMaxSubjectId) << '\n';
  }
}

}  // namespace

SplitManifest synthetic_manifest(Split split, const ClassCounts& counts, const SyntheticOptions& options) {
  SplitManifest m;
  m.split = split;
  m.per_class_counts = counts;
  const auto labels = interleaved_labels(counts);
  const std::uint64_t split_seed = mix_seed(options.seed, split == Split::train ? 0 : 1);
  m.samples.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    LabeledSample s;
    s.activity = class_of(labels[i]);
    s.window = synthetic_window(s.activity, split_seed, i, options.noise);
    s.subject_id = static_cast<int>(1 + i % kMaxSubjectId);
    m.samples.push_back(std::move(s));
  }
  return m;
}

void write_synthetic_dataset(const fs::path& root, const SyntheticOptions& options) {
  write_split(root, Split::train, options.train_counts, options);
  write_split(root, Split::test, options.test_counts, options);
}

SyntheticOptions published_count_options() {
  SyntheticOptions o;
  o.train_counts = kTrainCounts;
  o.test_counts = kTestCounts;
  return o;
}

}  // namespace har
