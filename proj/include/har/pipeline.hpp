#pragma once

// The four operator commands as library calls. The CLI parses arguments and
// maps exceptions to exit codes; everything else lives here so the tests and
// the acceptance suite drive exactly the code the tool runs.
//
// Files written to the output directory:
//   features_train.bin, features_test.bin   HARFEAT1 caches
//   norm_stats.bin                          HARNORM1 train-split statistics
//   model.harm                              HARMCNN1 checkpoint (best epoch)
//   epochs.csv                              per-epoch metrics
//   run_config.json                         the configuration used by train
//   report.json, roc_<label>.csv            evaluation output

#include "har/checkpoint.hpp"
#include "har/config.hpp"
#include "har/dataset.hpp"
#include "har/features.hpp"
#include "har/metrics.hpp"
#include "har/nn/train.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace har::pipeline {

struct DataOptions {
  /// Keep at most this many samples per class from each split (file order).
  /// Setting it also disables the published-count check.
  std::optional<std::size_t> subset;
  bool check_counts = true;
};

/// Loads one split; throws DatasetError on layout, content or count problems.
SplitManifest load(const std::filesystem::path& root, Split split, const DataOptions& opt);

struct ValidateReport {
  ClassCounts train{};
  ClassCounts test{};
  std::vector<CountDiff> train_diff;
  std::vector<CountDiff> test_diff;

  bool ok() const { return train_diff.empty() && test_diff.empty(); }
};

/// Loads both splits without the count check and compares with the
/// published per-class counts. Structural problems still throw.
ValidateReport validate_dataset(const std::filesystem::path& root);
void print_validate(const ValidateReport& report, std::ostream& out);

struct OutputFiles {
  std::filesystem::path features_train, features_test, norm_stats, model, epochs, run_config, report;

  static OutputFiles in(const std::filesystem::path& dir);
  std::filesystem::path roc(std::size_t class_index) const;

 private:
  std::filesystem::path dir_;
};

struct PreparedData {
  FeatureSet train;
  FeatureSet test;
  NormStats norm;
};

/// Extracts features for both splits, fits the normalizer on the training
/// split and writes the two caches and the statistics sidecar.
PreparedData extract(const RunConfig& cfg, const DataOptions& opt, std::ostream& log);

/// Reuses the caches in the output directory when all three exist and no
/// subset is requested; otherwise calls extract().
PreparedData load_or_extract(const RunConfig& cfg, const DataOptions& opt, std::ostream& log);

struct TrainOutcome {
  nn::TrainRun run;
  Checkpoint checkpoint;
};

/// Trains on prepared data and writes model.harm, epochs.csv and
/// run_config.json. Throws DatasetError when a split lacks a class.
TrainOutcome train(const RunConfig& cfg, const PreparedData& data, std::ostream& log);

/// Header epoch,train_loss,train_acc,test_acc,test_precision,test_recall,test_f1;
/// values in shortest round-trip form.
std::string epochs_csv(const nn::TrainRun& run);

/// Published per-class test accuracies and macro scores used as the
/// comparison target in reports (fractions, class order Wlk..Lay).
inline constexpr std::array<double, kNumClasses> kReferencePerClassAccuracy = {0.9738, 0.9490, 0.9548,
                                                                                0.8717, 0.9624, 0.9981};
inline constexpr double kReferenceAccuracy = 0.9525;
inline constexpr double kReferencePrecision = 0.9532;
inline constexpr double kReferenceRecall = 0.9516;
inline constexpr double kReferenceF1 = 0.9524;

struct Evaluation {
  Split split = Split::test;
  metrics::EvalReport report;
  std::size_t checkpoint_epoch = 0;
  std::uint64_t checkpoint_seed = 0;
};

/// Extracts features with the checkpoint's Welch settings, normalizes with
/// its statistics and scores every sample.
Evaluation evaluate(const Checkpoint& ckpt, const std::filesystem::path& dataset_root, Split split,
                    const DataOptions& opt);

std::string report_json(const Evaluation& ev);
/// fpr,tpr rows from (0,0) to (1,1).
std::string roc_csv(const metrics::RocCurve& roc);

/// Writes report.json and one roc_<label>.csv per class.
void write_evaluation(const std::filesystem::path& out_dir, const Evaluation& ev);
void print_evaluation(const Evaluation& ev, std::ostream& out);

}  // namespace har::pipeline
