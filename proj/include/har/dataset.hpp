#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace har {

inline constexpr std::size_t kNumClasses = 6;
inline constexpr std::size_t kNumStreams = 9;
inline constexpr std::size_t kWindowLen = 128;
inline constexpr double kSampleRateHz = 50.0;
inline constexpr int kMaxSubjectId = 30;

/// Stream order used everywhere a window is laid out: body acceleration,
/// body angular velocity, total acceleration; x, y, z within each family.
/// Checkpoints record it so inference cannot silently reorder inputs.
inline constexpr std::array<std::string_view, kNumStreams> kStreamNames = {
    "body_acc_x",  "body_acc_y",  "body_acc_z",   //
    "body_gyro_x", "body_gyro_y", "body_gyro_z",  //
    "total_acc_x", "total_acc_y", "total_acc_z"};

/// Activity labels in dataset id order (id 1 = Wlk ... id 6 = Lay).
inline constexpr std::array<std::string_view, kNumClasses> kClassLabels = {
    "Wlk", "WUp", "WDn", "Sit", "Stn", "Lay"};

struct ActivityClass {
  int id = 0;  // 1..6
  std::string_view label;

  /// Zero-based position used by matrices and network outputs.
  std::size_t index() const { return static_cast<std::size_t>(id - 1); }
  bool operator==(const ActivityClass& o) const { return id == o.id; }
};

/// Throws std::out_of_range unless 1 <= id <= 6.
ActivityClass class_of(int id);
ActivityClass class_at(std::size_t index);

enum class Split { train, test };

std::string to_string(Split split);
Split split_from_string(const std::string& name);

using ClassCounts = std::array<std::size_t, kNumClasses>;

/// Published per-class window counts for each split.
inline constexpr ClassCounts kTrainCounts = {1226, 1073, 986, 1286, 1374, 1407};
inline constexpr ClassCounts kTestCounts = {496, 471, 420, 491, 532, 537};
inline constexpr std::size_t kTrainTotal = 7352;
inline constexpr std::size_t kTestTotal = 2947;

const ClassCounts& expected_counts(Split split);

/// One 2.56 s window: 9 streams x 128 readings, stream-major.
struct InertialWindow {
  std::vector<double> values = std::vector<double>(kNumStreams * kWindowLen, 0.0);

  std::span<const double> stream(std::size_t s) const {
    return std::span<const double>(values).subspan(s * kWindowLen, kWindowLen);
  }
  std::span<double> stream(std::size_t s) {
    return std::span<double>(values).subspan(s * kWindowLen, kWindowLen);
  }
  bool operator==(const InertialWindow&) const = default;
};

struct LabeledSample {
  InertialWindow window;
  ActivityClass activity;
  int subject_id = 0;

  bool operator==(const LabeledSample&) const = default;
};

struct SplitManifest {
  Split split = Split::train;
  std::vector<LabeledSample> samples;
  ClassCounts per_class_counts{};
};

/// Row-major numeric matrix parsed from a whitespace-separated text file.
struct TextMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

/// Parses a whitespace-separated file with exactly `columns` values per line.
/// Locale-independent. Throws ParseError naming the line on a column-count
/// mismatch or an unparsable token; throws DatasetError when the file cannot
/// be opened. An empty file yields zero rows.
TextMatrix parse_signal_file(const std::filesystem::path& path,
                             std::size_t columns = kWindowLen);

/// Same as parse_signal_file but over in-memory text; `source` names it in errors.
TextMatrix parse_signal_text(std::string_view text, std::size_t columns,
                             const std::string& source = "<memory>");

std::filesystem::path signal_file_path(const std::filesystem::path& root, Split split,
                                       std::string_view stream);
std::filesystem::path label_file_path(const std::filesystem::path& root, Split split);
std::filesystem::path subject_file_path(const std::filesystem::path& root, Split split);

struct LoadOptions {
  /// Fail unless per-class counts equal the published split counts.
  bool check_counts = true;
  /// Parse the 11 split files concurrently.
  bool parallel = true;
};

/// Loads one split of the UCI HAR layout:
///   <root>/<split>/Inertial Signals/<stream>_<split>.txt  (9 files)
///   <root>/<split>/y_<split>.txt, <root>/<split>/subject_<split>.txt
/// Throws DatasetError (missing file, row-count mismatch, unknown activity id,
/// subject out of range, count mismatch) or ParseError.
SplitManifest load_split(const std::filesystem::path& root, Split split,
                         const LoadOptions& options = {});

struct CountDiff {
  ActivityClass activity;
  std::size_t expected = 0;
  std::size_t actual = 0;
};

/// Per-class differences against the published counts; empty when they match.
std::vector<CountDiff> count_mismatches(const SplitManifest& manifest);

/// Keeps at most `per_class` samples of each class, preserving file order.
SplitManifest take_per_class(const SplitManifest& manifest, std::size_t per_class);

}  // namespace har
