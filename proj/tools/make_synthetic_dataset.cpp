// Writes a synthetic dataset in the UCI HAR directory layout, for smoke runs
// and demos when the real recordings are not at hand.

#include "har/synthetic.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic dataset in the UCI HAR layout"};
  std::string out;
  std::size_t train_per_class = 20;
  std::size_t test_per_class = 10;
  bool published = false;
  har::SyntheticOptions opt;
  app.add_option("out", out, "dataset root to create")->required();
  app.add_option("--train-per-class", train_per_class, "training windows per class");
  app.add_option("--test-per-class", test_per_class, "test windows per class");
  app.add_flag("--published-counts", published, "use the published per-class counts for both splits");
  app.add_flag("--zeros", opt.zeros, "write literal zeros (only the counts matter)");
  app.add_option("--seed", opt.seed, "generator seed");
  app.add_option("--noise", opt.noise, "noise level relative to the class tone amplitude");
  CLI11_PARSE(app, argc, argv);

  if (published) {
    opt.train_counts = har::kTrainCounts;
    opt.test_counts = har::kTestCounts;
  } else {
    opt.train_counts.fill(train_per_class);
    opt.test_counts.fill(test_per_class);
  }
  try {
    har::write_synthetic_dataset(out, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote synthetic dataset to " << out << "\n";
  return 0;
}
