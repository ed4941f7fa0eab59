#include "har/pipeline.hpp"

#include "har/binary_io.hpp"
#include "har/error.hpp"
#include "har/nn/batch.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <iomanip>

namespace har::pipeline {

namespace fs = std::filesystem;

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

ClassCounts count_classes(const FeatureSet& set) {
  ClassCounts c{};
  for (const auto& a : set.labels) ++c[a.index()];
  return c;
}

void require_all_classes(const ClassCounts& counts, const std::string& what) {
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (counts[c] == 0) {
      throw DatasetError(what + " has no samples of class " + std::string(kClassLabels[c]) +
                         "; every class must be present");
    }
  }
}

}  // namespace

SplitManifest load(const fs::path& root, Split split, const DataOptions& opt) {
  LoadOptions lo;
  lo.check_counts = opt.check_counts && !opt.subset;
  auto m = load_split(root, split, lo);
  if (opt.subset) m = take_per_class(m, *opt.subset);
  return m;
}

ValidateReport validate_dataset(const fs::path& root) {
  LoadOptions lo;
  lo.check_counts = false;
  const auto train = load_split(root, Split::train, lo);
  const auto test = load_split(root, Split::test, lo);
  return ValidateReport{train.per_class_counts, test.per_class_counts, count_mismatches(train),
                        count_mismatches(test)};
}

void print_validate(const ValidateReport& r, std::ostream& out) {
  const auto& et = expected_counts(Split::train);
  const auto& es = expected_counts(Split::test);
  out << "class  id     train  expected      test  expected\n";
  std::size_t tt = 0, ts = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    out << std::left << std::setw(5) << kClassLabels[c] << std::right << std::setw(4) << c + 1 << std::setw(10)
        << r.train[c] << std::setw(10) << et[c] << std::setw(10) << r.test[c] << std::setw(10) << es[c]
        << ((r.train[c] != et[c] || r.test[c] != es[c]) ? "  MISMATCH" : "") << "\n";
    tt += r.train[c];
    ts += r.test[c];
  }
  out << "total     " << std::setw(10) << tt << std::setw(10) << kTrainTotal << std::setw(10) << ts << std::setw(10)
      << kTestTotal << "\n";
  out << (r.ok() ? "all per-class counts match\n" : "per-class counts differ from the published split\n");
}

OutputFiles OutputFiles::in(const fs::path& dir) {
  OutputFiles f;
  f.dir_ = dir;
  f.features_train = dir / "features_train.bin";
  f.features_test = dir / "features_test.bin";
  f.norm_stats = dir / "norm_stats.bin";
  f.model = dir / "model.harm";
  f.epochs = dir / "epochs.csv";
  f.run_config = dir / "run_config.json";
  f.report = dir / "report.json";
  return f;
}

fs::path OutputFiles::roc(std::size_t class_index) const {
  return dir_ / ("roc_" + std::string(kClassLabels[class_index]) + ".csv");
}

PreparedData extract(const RunConfig& cfg, const DataOptions& opt, std::ostream& log) {
  cfg.validate();
  PreparedData d;
  for (Split split : {Split::train, Split::test}) {
    const auto manifest = load(cfg.dataset_root, split, opt);
    if (manifest.samples.empty()) throw DatasetError(to_string(split) + " split is empty");
    auto set = build_feature_set(manifest, cfg.welch);
    log << "extracted " << set.size() << " " << to_string(split) << " samples (" << set.freq_bins
        << " frequency bins, " << set.power_bins << " power bins)\n";
    (split == Split::train ? d.train : d.test) = std::move(set);
  }
  d.norm = quantize(fit_normalizer(d.train.tensors, cfg.norm_epsilon));
  fs::create_directories(cfg.output_dir);
  const auto files = OutputFiles::in(cfg.output_dir);
  write_feature_cache(files.features_train, d.train);
  write_feature_cache(files.features_test, d.test);
  write_norm_stats(files.norm_stats, d.norm);
  log << "wrote " << files.features_train.string() << ", " << files.features_test.string() << ", "
      << files.norm_stats.string() << "\n";
  return d;
}

PreparedData load_or_extract(const RunConfig& cfg, const DataOptions& opt, std::ostream& log) {
  const auto files = OutputFiles::in(cfg.output_dir);
  const bool cached =
      fs::exists(files.features_train) && fs::exists(files.features_test) && fs::exists(files.norm_stats);
  if (!cached || opt.subset) return extract(cfg, opt, log);
  PreparedData d;
  d.train = read_feature_cache(files.features_train);
  d.test = read_feature_cache(files.features_test);
  d.norm = read_norm_stats(files.norm_stats);
  const auto spec = cfg.model_spec();
  if (d.train.power_bins != spec.power_bins || d.test.power_bins != spec.power_bins ||
      d.norm.power_bins != spec.power_bins || d.norm.epsilon != cfg.norm_epsilon) {
    throw ConfigError("cached features in " + cfg.output_dir.string() +
                      " were built with different settings; re-run extract");
  }
  log << "using cached features: " << d.train.size() << " train, " << d.test.size() << " test samples\n";
  return d;
}

TrainOutcome train(const RunConfig& cfg, const PreparedData& data, std::ostream& log) {
  cfg.validate();
  require_all_classes(count_classes(data.train), "training split");
  require_all_classes(count_classes(data.test), "test split");
  const auto spec = cfg.model_spec();
  const nn::Network<float> net(spec);
  const auto tr = nn::make_sample_matrix<float>(data.train, data.norm);
  const auto te = nn::make_sample_matrix<float>(data.test, data.norm);
  log << "training " << net.param_count() << " parameters on " << tr.count << " samples, " << cfg.train.epochs
      << " epochs, batch " << cfg.train.batch_size << ", seed " << cfg.train.seed << "\n";

  auto result = nn::train(net, tr, te, cfg.train, [&](const nn::EpochRecord& e) {
    log << "epoch " << std::setw(3) << e.epoch << "  train_loss " << std::fixed << std::setprecision(4)
        << e.train.loss << "  train_acc " << pct(e.train.accuracy) << "%  test_acc " << pct(e.test.accuracy)
        << "%  test_f1 " << pct(e.test.f1) << "%\n"
        << std::defaultfloat;
  });

  TrainOutcome out;
  out.run = std::move(result.run);
  out.checkpoint.model = spec;
  out.checkpoint.welch = cfg.welch;
  out.checkpoint.train = cfg.train;
  out.checkpoint.seed = cfg.train.seed;
  out.checkpoint.epoch = out.run.best_epoch;
  out.checkpoint.norm = data.norm;
  out.checkpoint.params = std::move(result.params);

  fs::create_directories(cfg.output_dir);
  const auto files = OutputFiles::in(cfg.output_dir);
  write_checkpoint(files.model, out.checkpoint);
  atomic_write_file(files.epochs, epochs_csv(out.run));
  save_config(files.run_config, cfg);
  const auto& best = out.run.epochs[out.run.best_epoch - 1];
  log << "best test accuracy " << pct(best.test.accuracy) << "% at epoch " << out.run.best_epoch << "; wrote "
      << files.model.string() << " and " << files.epochs.string() << "\n";
  return out;
}

std::string epochs_csv(const nn::TrainRun& run) {
  std::string s = "epoch,train_loss,train_acc,test_acc,test_precision,test_recall,test_f1\n";
  for (const auto& e : run.epochs) {
    s += std::to_string(e.epoch);
    for (double v : {e.train.loss, e.train.accuracy, e.test.accuracy, e.test.precision, e.test.recall, e.test.f1}) {
      s += ',';
      s += shortest(v);
    }
    s += '\n';
  }
  return s;
}

Evaluation evaluate(const Checkpoint& ckpt, const fs::path& dataset_root, Split split, const DataOptions& opt) {
  const auto manifest = load(dataset_root, split, opt);
  if (manifest.samples.empty()) throw DatasetError(to_string(split) + " split is empty");
  const auto set = build_feature_set(manifest, ckpt.welch);
  require_all_classes(count_classes(set), to_string(split) + " split");
  const nn::Network<float> net(ckpt.model);
  const auto data = nn::make_sample_matrix<float>(set, ckpt.norm);
  const auto pred = nn::predict(net, ckpt.params, data);
  const std::vector<std::size_t> truth(data.labels.begin(), data.labels.end());

  Evaluation ev;
  ev.split = split;
  ev.report = metrics::evaluate_predictions(pred.probs, pred.predicted, truth, ckpt.model.classes);
  ev.checkpoint_epoch = ckpt.epoch;
  ev.checkpoint_seed = ckpt.seed;
  return ev;
}

std::string report_json(const Evaluation& ev) {
  using ojson = nlohmann::ordered_json;
  const auto& r = ev.report;
  ojson j;
  j["split"] = to_string(ev.split);
  j["samples"] = r.samples;
  j["checkpoint_epoch"] = ev.checkpoint_epoch;
  j["seed"] = ev.checkpoint_seed;
  j["class_labels"] = kClassLabels;
  j["accuracy"] = r.accuracy;
  j["per_class_accuracy"] = r.per_class_accuracy;
  ojson cm = ojson::array();
  for (std::size_t t = 0; t < r.cm.classes(); ++t) {
    ojson row = ojson::array();
    for (std::size_t p = 0; p < r.cm.classes(); ++p) row.push_back(r.cm(t, p));
    cm.push_back(row);
  }
  j["confusion_matrix"] = cm;  // rows: true class, columns: predicted class
  j["macro"] = {{"precision", r.prf.precision},
                {"recall", r.prf.recall},
                {"f1", r.prf.f1},
                {"mean_class_f1", r.prf.mean_class_f1}};
  j["per_class"] = {{"precision", r.prf.class_precision},
                    {"recall", r.prf.class_recall},
                    {"f1", r.prf.class_f1}};
  j["empty_prediction_column"] = r.prf.empty_prediction_column;
  std::vector<double> auc;
  for (const auto& roc : r.roc) auc.push_back(roc.auc);
  j["auc"] = auc;

  std::vector<double> gap;
  for (std::size_t c = 0; c < kNumClasses; ++c) gap.push_back(r.per_class_accuracy[c] - kReferencePerClassAccuracy[c]);
  j["reference"] = {{"accuracy", kReferenceAccuracy},
                    {"per_class_accuracy", kReferencePerClassAccuracy},
                    {"macro_precision", kReferencePrecision},
                    {"macro_recall", kReferenceRecall},
                    {"macro_f1", kReferenceF1}};
  j["gap_to_reference"] = {{"accuracy", r.accuracy - kReferenceAccuracy},
                           {"per_class_accuracy", gap},
                           {"macro_precision", r.prf.precision - kReferencePrecision},
                           {"macro_recall", r.prf.recall - kReferenceRecall},
                           {"macro_f1", r.prf.f1 - kReferenceF1}};
  return j.dump(2) + "\n";
}

std::string roc_csv(const metrics::RocCurve& roc) {
  std::string s = "fpr,tpr\n";
  for (const auto& [fpr, tpr] : roc.points) s += shortest(fpr) + "," + shortest(tpr) + "\n";
  return s;
}

void write_evaluation(const fs::path& out_dir, const Evaluation& ev) {
  fs::create_directories(out_dir);
  const auto files = OutputFiles::in(out_dir);
  atomic_write_file(files.report, report_json(ev));
  for (std::size_t c = 0; c < ev.report.roc.size(); ++c) atomic_write_file(files.roc(c), roc_csv(ev.report.roc[c]));
}

void print_evaluation(const Evaluation& ev, std::ostream& out) {
  const auto& r = ev.report;
  out << to_string(ev.split) << " split: " << r.samples << " samples, accuracy " << pct(r.accuracy)
      << "% (reference " << pct(kReferenceAccuracy) << "%, gap " << pct(r.accuracy - kReferenceAccuracy) << ")\n";
  out << "macro precision " << pct(r.prf.precision) << "%  recall " << pct(r.prf.recall) << "%  F1 " << pct(r.prf.f1)
      << "%  (mean per-class F1 " << pct(r.prf.mean_class_f1) << "%)\n";
  if (r.prf.empty_prediction_column) out << "note: at least one class was never predicted (precision 0)\n";
  out << "\nclass  accuracy  reference     gap     AUC\n";
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    out << std::left << std::setw(5) << kClassLabels[c] << std::right << std::setw(9) << pct(r.per_class_accuracy[c])
        << std::setw(11) << pct(kReferencePerClassAccuracy[c]) << std::setw(8)
        << pct(r.per_class_accuracy[c] - kReferencePerClassAccuracy[c]) << std::setw(8) << std::fixed
        << std::setprecision(4) << r.roc[c].auc << std::defaultfloat << "\n";
  }
  out << "\nconfusion matrix (rows: true, columns: predicted)\n     ";
  for (std::size_t p = 0; p < kNumClasses; ++p) out << std::setw(6) << kClassLabels[p];
  out << "\n";
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    out << std::left << std::setw(5) << kClassLabels[t] << std::right;
    for (std::size_t p = 0; p < kNumClasses; ++p) out << std::setw(6) << r.cm(t, p);
    out << "\n";
  }
}

}  // namespace har::pipeline
