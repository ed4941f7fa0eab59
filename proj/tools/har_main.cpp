// har: validate, extract, train and evaluate on the UCI HAR layout.
//
// Exit codes: 0 success, 1 internal or configuration error, 2 dataset or
// validation error (including malformed caches and checkpoints).

#include "har/error.hpp"
#include "har/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

namespace fs = std::filesystem;
using namespace har;

struct Options {
  std::string config;
  std::string dataset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string split = "test";
  std::optional<std::size_t> subset;
  std::string checkpoint;
  bool skip_count_check = false;
};

RunConfig resolve(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.dataset.empty()) cfg.dataset_root = o.dataset;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed) cfg.train.seed = *o.seed;
  cfg.validate();
  return cfg;
}

pipeline::DataOptions data_options(const Options& o) {
  pipeline::DataOptions d;
  d.subset = o.subset;
  d.check_counts = !o.skip_count_check;
  return d;
}

int cmd_validate(const Options& o) {
  const auto cfg = resolve(o);
  const auto report = pipeline::validate_dataset(cfg.dataset_root);
  pipeline::print_validate(report, std::cout);
  return report.ok() ? 0 : 2;
}

int cmd_extract(const Options& o) {
  pipeline::extract(resolve(o), data_options(o), std::cout);
  return 0;
}

int cmd_train(const Options& o) {
  const auto cfg = resolve(o);
  const auto data = pipeline::load_or_extract(cfg, data_options(o), std::cout);
  pipeline::train(cfg, data, std::cout);
  return 0;
}

int cmd_evaluate(const Options& o) {
  const auto cfg = resolve(o);
  const fs::path ckpt_path = o.checkpoint.empty() ? pipeline::OutputFiles::in(cfg.output_dir).model : fs::path(o.checkpoint);
  const auto ckpt = read_checkpoint(ckpt_path);
  const auto ev = pipeline::evaluate(ckpt, cfg.dataset_root, split_from_string(o.split), data_options(o));
  pipeline::write_evaluation(cfg.output_dir, ev);
  pipeline::print_evaluation(ev, std::cout);
  std::cout << "\nwrote " << pipeline::OutputFiles::in(cfg.output_dir).report.string() << " and roc_<class>.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human activity recognition from inertial windows: spectral features and a two-channel 1-D CNN"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration (defaults apply to absent keys)");
    sub->add_option("--dataset", o.dataset, "dataset root containing train/ and test/");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--subset", o.subset, "at most N samples per class from each split (implies --skip-count-check)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--skip-count-check", o.skip_count_check, "accept splits whose class counts differ from the published ones");
  };

  auto* validate = app.add_subcommand("validate", "check dataset layout and per-class counts");
  validate->add_option("--config", o.config, "JSON run configuration");
  validate->add_option("--dataset", o.dataset, "dataset root containing train/ and test/");
  auto* extract = app.add_subcommand("extract", "write feature caches and normalizer statistics");
  common(extract);
  auto* train = app.add_subcommand("train", "train the network and write the checkpoint and epoch log");
  common(train);
  train->add_option("--seed", o.seed, "training seed (overrides the config)");
  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint on one split and write the report");
  common(evaluate);
  evaluate->add_option("--split", o.split, "split to evaluate")->check(CLI::IsMember({"train", "test"}));
  evaluate->add_option("--checkpoint", o.checkpoint, "checkpoint file (default <out>/model.harm)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (validate->parsed()) return cmd_validate(o);
    if (extract->parsed()) return cmd_extract(o);
    if (train->parsed()) return cmd_train(o);
    if (evaluate->parsed()) return cmd_evaluate(o);
  } catch (const DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
