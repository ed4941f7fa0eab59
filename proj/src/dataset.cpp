#include "har/dataset.hpp"

#include "har/error.hpp"

#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace har {

namespace fs = std::filesystem;

ActivityClass class_of(int id) {
  if (id < 1 || id > static_cast<int>(kNumClasses)) {
    throw std::out_of_range("unknown activity id " + std::to_string(id));
  }
  return ActivityClass{id, kClassLabels[static_cast<std::size_t>(id - 1)]};
}

ActivityClass class_at(std::size_t index) { return class_of(static_cast<int>(index) + 1); }

std::string to_string(Split split) { return split == Split::train ? "train" : "test"; }

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "test") return Split::test;
  throw std::invalid_argument("unknown split '" + name + "' (expected train|test)");
}

const ClassCounts& expected_counts(Split split) {
  return split == Split::train ? kTrainCounts : kTestCounts;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

}  // namespace

TextMatrix parse_signal_text(std::string_view text, std::size_t columns,
                             const std::string& source) {
  TextMatrix m;
  m.cols = columns;

  // Trailing blank lines (usually a final newline) are not rows.
  std::size_t end = text.size();
  while (end > 0 && (is_space(text[end - 1]) || text[end - 1] == '\n')) --end;
  text = text.substr(0, end);
  if (text.empty()) return m;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;

    std::size_t count = 0;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !is_space(line[j])) ++j;
      const std::string_view token = line.substr(i, j - i);
      double value = 0.0;
      // from_chars rejects a leading '+', which some writers emit.
      const std::string_view digits = token.front() == '+' ? token.substr(1) : token;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || !std::isfinite(value)) {
        throw ParseError(source + ": line " + std::to_string(line_no) + ", column " +
                             std::to_string(count + 1) + ": cannot parse '" +
                             std::string(token) + "'",
                         line_no);
      }
      m.values.push_back(value);
      ++count;
      i = j;
    }
    if (count != columns) {
      throw ParseError(source + ": line " + std::to_string(line_no) + ": expected " +
                           std::to_string(columns) + " columns, found " +
                           std::to_string(count),
                       line_no);
    }
    ++m.rows;
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return m;
}

TextMatrix parse_signal_file(const fs::path& path, std::size_t columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_signal_text(buf.str(), columns, path.string());
}

fs::path signal_file_path(const fs::path& root, Split split, std::string_view stream) {
  const std::string s = to_string(split);
  return root / s / "Inertial Signals" / (std::string(stream) + "_" + s + ".txt");
}

fs::path label_file_path(const fs::path& root, Split split) {
  const std::string s = to_string(split);
  return root / s / ("y_" + s + ".txt");
}

fs::path subject_file_path(const fs::path& root, Split split) {
  const std::string s = to_string(split);
  return root / s / ("subject_" + s + ".txt");
}

namespace {

int as_integer(double v, const fs::path& file, std::size_t row) {
  if (v != std::floor(v)) {
    throw DatasetError(file.string() + ": line " + std::to_string(row + 1) +
                       ": expected an integer, found " + std::to_string(v));
  }
  return static_cast<int>(v);
}

}  // namespace

SplitManifest load_split(const fs::path& root, Split split, const LoadOptions& options) {
  // Slots 0..8 are the signal streams, 9 the labels, 10 the subjects.
  constexpr std::size_t kFiles = kNumStreams + 2;
  std::array<fs::path, kFiles> paths;
  for (std::size_t s = 0; s < kNumStreams; ++s) paths[s] = signal_file_path(root, split, kStreamNames[s]);
  paths[kNumStreams] = label_file_path(root, split);
  paths[kNumStreams + 1] = subject_file_path(root, split);

  for (const auto& p : paths) {
    if (!fs::is_regular_file(p)) throw DatasetError("missing dataset file: " + p.string());
  }

  std::array<TextMatrix, kFiles> parsed;
  std::array<std::exception_ptr, kFiles> errors{};
  const auto parse_one = [&](std::size_t f) {
    try {
      parsed[f] = parse_signal_file(paths[f], f < kNumStreams ? kWindowLen : 1);
    } catch (...) {
      errors[f] = std::current_exception();
    }
  };
  if (options.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t f = 0; f < kFiles; ++f) parse_one(f);
  } else {
    for (std::size_t f = 0; f < kFiles; ++f) parse_one(f);
  }
  // Report the first failing file in fixed order regardless of scheduling.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const std::size_t rows = parsed[kNumStreams].rows;
  for (std::size_t f = 0; f < kFiles; ++f) {
    if (parsed[f].rows != rows) {
      throw DatasetError("row-count mismatch: " + paths[f].string() + " has " +
                         std::to_string(parsed[f].rows) + " rows, " +
                         paths[kNumStreams].string() + " has " + std::to_string(rows));
    }
  }

  SplitManifest manifest;
  manifest.split = split;
  manifest.samples.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    LabeledSample& sample = manifest.samples[r];
    for (std::size_t s = 0; s < kNumStreams; ++s) {
      const double* src = parsed[s].values.data() + r * kWindowLen;
      std::copy(src, src + kWindowLen, sample.window.stream(s).begin());
    }
    const int label = as_integer(parsed[kNumStreams].values[r], paths[kNumStreams], r);
    if (label < 1 || label > static_cast<int>(kNumClasses)) {
      throw DatasetError(paths[kNumStreams].string() + ": line " + std::to_string(r + 1) +
                         ": unknown activity id " + std::to_string(label));
    }
    sample.activity = class_of(label);
    sample.subject_id = as_integer(parsed[kNumStreams + 1].values[r], paths[kNumStreams + 1], r);
    if (sample.subject_id < 1 || sample.subject_id > kMaxSubjectId) {
      throw DatasetError(paths[kNumStreams + 1].string() + ": line " + std::to_string(r + 1) +
                         ": subject id " + std::to_string(sample.subject_id) +
                         " outside [1, " + std::to_string(kMaxSubjectId) + "]");
    }
    ++manifest.per_class_counts[sample.activity.index()];
  }

  if (options.check_counts) {
    const auto diffs = count_mismatches(manifest);
    if (!diffs.empty()) {
      std::string msg = to_string(split) + " split does not match the published class counts:";
      for (const auto& d : diffs) {
        msg += " " + std::string(d.activity.label) + " expected " + std::to_string(d.expected) +
               " got " + std::to_string(d.actual) + ";";
      }
      throw DatasetError(msg);
    }
  }
  return manifest;
}

std::vector<CountDiff> count_mismatches(const SplitManifest& manifest) {
  std::vector<CountDiff> diffs;
  const auto& expected = expected_counts(manifest.split);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (manifest.per_class_counts[c] != expected[c]) {
      diffs.push_back({class_at(c), expected[c], manifest.per_class_counts[c]});
    }
  }
  return diffs;
}

SplitManifest take_per_class(const SplitManifest& manifest, std::size_t per_class) {
  SplitManifest out;
  out.split = manifest.split;
  for (const auto& s : manifest.samples) {
    auto& n = out.per_class_counts[s.activity.index()];
    if (n < per_class) {
      out.samples.push_back(s);
      ++n;
    }
  }
  return out;
}

}  // namespace har
