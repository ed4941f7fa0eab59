// Runs the `har` executable on synthetic datasets and checks exit codes,
// written files and report consistency.

#include "har/checkpoint.hpp"
#include "har/synthetic.hpp"
#include "support/temp_dir.hpp"

#include <doctest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using har::testing::read_file;
using har::testing::TempDir;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

Result run(const std::string& args) {
  const std::string cmd = std::string("\"") + HAR_CLI_PATH + "\" " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

void small_dataset(const fs::path& root, std::size_t train = 12, std::size_t test = 6) {
  har::SyntheticOptions opt;
  opt.train_counts.fill(train);
  opt.test_counts.fill(test);
  opt.seed = 5;
  opt.noise = 1.5;
  har::write_synthetic_dataset(root, opt);
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

std::string fast_config(const fs::path& dir, std::size_t epochs) {
  const auto path = dir / "fast.json";
  write_text(path, R"({"train": {"epochs": )" + std::to_string(epochs) +
                       R"(, "batch_size": 16},
  "model": {
    "freq_channel": {"convs": [{"filters": 8, "kernel": 5, "pool": 2}], "dense": {"units": 16}},
    "power_channel": {"convs": [{"filters": 8, "kernel": 5, "pool": 2}], "dense": {"units": 16}}}})");
  return q(path);
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += (c == '\n');
  return n;
}

}  // namespace

TEST_CASE("validate") {
  TempDir dir;
  SUBCASE("published counts pass") {
    auto opt = har::published_count_options();
    opt.zeros = true;
    har::write_synthetic_dataset(dir.path(), opt);
    const auto r = run("validate --dataset " + q(dir.path()));
    CHECK(r.code == 0);
    CHECK(r.output.find("7352") != std::string::npos);
    CHECK(r.output.find("2947") != std::string::npos);
    CHECK(r.output.find("all per-class counts match") != std::string::npos);
  }
  SUBCASE("count mismatch exits 2 with a per-class table") {
    small_dataset(dir.path());
    const auto r = run("validate --dataset " + q(dir.path()));
    CHECK(r.code == 2);
    CHECK(r.output.find("MISMATCH") != std::string::npos);
  }
  SUBCASE("missing signal file exits 2 and names the file") {
    small_dataset(dir.path());
    fs::remove(dir.path() / "test" / "Inertial Signals" / "body_gyro_y_test.txt");
    const auto r = run("validate --dataset " + q(dir.path()));
    CHECK(r.code == 2);
    CHECK(r.output.find("body_gyro_y_test.txt") != std::string::npos);
  }
  SUBCASE("truncated label file exits 2 with a row-count diagnostic") {
    small_dataset(dir.path());
    const auto labels = dir.path() / "train" / "y_train.txt";
    auto text = read_file(labels);
    text.resize(text.size() - 4);
    write_text(labels, text);
    const auto r = run("validate --dataset " + q(dir.path()));
    CHECK(r.code == 2);
    CHECK(r.output.find("row-count mismatch") != std::string::npos);
  }
  SUBCASE("unknown activity id exits 2") {
    small_dataset(dir.path());
    const auto labels = dir.path() / "test" / "y_test.txt";
    auto text = read_file(labels);
    text[0] = '7';
    write_text(labels, text);
    const auto r = run("validate --dataset " + q(dir.path()));
    CHECK(r.code == 2);
    CHECK(r.output.find("unknown activity id 7") != std::string::npos);
  }
  SUBCASE("absent dataset exits 2") {
    const auto r = run("validate --dataset " + q(dir.path() / "nowhere"));
    CHECK(r.code == 2);
  }
}

TEST_CASE("extract") {
  TempDir dir;
  small_dataset(dir.path() / "data");
  const auto out = dir.path() / "out";
  const std::string base = "extract --dataset " + q(dir.path() / "data") + " --out " + q(out);
  SUBCASE("published-count check applies unless skipped") {
    CHECK(run(base).code == 2);
    CHECK(run(base + " --skip-count-check").code == 0);
  }
  SUBCASE("caches are idempotent and subset-aware") {
    REQUIRE(run(base + " --skip-count-check").code == 0);
    const auto a = read_file(out / "features_train.bin");
    const auto s = read_file(out / "norm_stats.bin");
    CHECK(a.substr(0, 8) == "HARFEAT1");
    CHECK(s.substr(0, 8) == "HARNORM1");
    REQUIRE(run(base + " --skip-count-check").code == 0);
    CHECK(read_file(out / "features_train.bin") == a);
    CHECK(read_file(out / "norm_stats.bin") == s);
    REQUIRE(run(base + " --subset 3").code == 0);
    // 8-byte magic + 3 x u32, then per sample 1 label byte + 9 x (65 + 33) floats.
    CHECK(read_file(out / "features_train.bin").size() == 20 + 18 * (1 + 4 * 9 * (65 + 33)));
  }
  SUBCASE("unwritable output directory fails") {
    write_text(dir.path() / "file", "x");
    const auto r = run("extract --dataset " + q(dir.path() / "data") + " --out " + q(dir.path() / "file" / "sub") +
                       " --skip-count-check");
    CHECK(r.code != 0);
  }
  SUBCASE("a corrupted cache is reported when train reads it") {
    REQUIRE(run(base + " --skip-count-check").code == 0);
    auto bytes = read_file(out / "features_test.bin");
    bytes[0] = 'X';
    write_text(out / "features_test.bin", bytes);
    const auto r = run("train --dataset " + q(dir.path() / "data") + " --out " + q(out) + " --skip-count-check");
    CHECK(r.code == 2);
    CHECK(r.output.find("bad magic") != std::string::npos);
  }
}

TEST_CASE("train and evaluate") {
  TempDir dir;
  small_dataset(dir.path() / "data");
  const std::string data = " --dataset " + q(dir.path() / "data") + " --skip-count-check";

  SUBCASE("default configuration writes one row per epoch") {
    const auto out = dir.path() / "default";
    const auto r = run("train" + data + " --out " + q(out) + " --subset 2");
    REQUIRE(r.code == 0);
    const auto csv = read_file(out / "epochs.csv");
    CHECK(csv.rfind("epoch,train_loss,train_acc,test_acc,test_precision,test_recall,test_f1\n", 0) == 0);
    CHECK(line_count(csv) == 41);
    const auto cfg = nlohmann::json::parse(read_file(out / "run_config.json"));
    CHECK(cfg["train"]["seed"] == 42);
  }

  SUBCASE("identical runs produce identical files") {
    const auto cfg = fast_config(dir.path(), 4);
    for (const char* name : {"a", "b"}) {
      const auto out = dir.path() / name;
      REQUIRE(run("train" + data + " --config " + cfg + " --out " + q(out) + " --seed 9").code == 0);
      REQUIRE(run("evaluate" + data + " --config " + cfg + " --out " + q(out)).code == 0);
    }
    for (const char* f : {"epochs.csv", "model.harm", "report.json", "roc_Sit.csv", "features_train.bin"}) {
      CAPTURE(f);
      CHECK(read_file(dir.path() / "a" / f) == read_file(dir.path() / "b" / f));
    }
    const auto out = dir.path() / "c";
    REQUIRE(run("train" + data + " --config " + cfg + " --out " + q(out) + " --seed 10").code == 0);
    CHECK(read_file(out / "model.harm") != read_file(dir.path() / "a" / "model.harm"));
  }

  SUBCASE("report is self-consistent and matches the split") {
    const auto cfg = fast_config(dir.path(), 3);
    const auto out = dir.path() / "r";
    REQUIRE(run("train" + data + " --config " + cfg + " --out " + q(out)).code == 0);
    for (const std::string split : {"test", "train"}) {
      const auto r = run("evaluate" + data + " --config " + cfg + " --out " + q(out) + " --split " + split);
      REQUIRE(r.code == 0);
      CHECK(r.output.find("reference") != std::string::npos);
      const auto j = nlohmann::json::parse(read_file(out / "report.json"));
      CHECK(j["split"] == split);
      const std::size_t per_class = split == "test" ? 6 : 12;
      const auto& cm = j["confusion_matrix"];
      std::size_t trace = 0, total = 0;
      double p_sum = 0.0, r_sum = 0.0;
      for (std::size_t t = 0; t < 6; ++t) {
        std::size_t row = 0, col = 0;
        for (std::size_t p = 0; p < 6; ++p) {
          row += cm[t][p].get<std::size_t>();
          col += cm[p][t].get<std::size_t>();
        }
        CHECK(row == per_class);
        trace += cm[t][t].get<std::size_t>();
        total += row;
        const double diag = cm[t][t].get<double>();
        CHECK(std::abs(j["per_class_accuracy"][t].get<double>() - diag / static_cast<double>(row)) <= 1e-12);
        const double prec = col ? diag / static_cast<double>(col) : 0.0;
        CHECK(std::abs(j["per_class"]["precision"][t].get<double>() - prec) <= 1e-12);
        p_sum += prec;
        r_sum += diag / static_cast<double>(row);
        CHECK(std::abs(j["gap_to_reference"]["per_class_accuracy"][t].get<double>() -
                       (diag / static_cast<double>(row) - j["reference"]["per_class_accuracy"][t].get<double>())) <=
              1e-12);
      }
      CHECK(j["samples"] == total);
      CHECK(j["accuracy"].get<double>() == static_cast<double>(trace) / static_cast<double>(total));
      const double mp = p_sum / 6.0, mr = r_sum / 6.0;
      CHECK(std::abs(j["macro"]["precision"].get<double>() - mp) <= 1e-12);
      CHECK(std::abs(j["macro"]["recall"].get<double>() - mr) <= 1e-12);
      CHECK(std::abs(j["macro"]["f1"].get<double>() - 2.0 * mp * mr / (mp + mr)) <= 1e-12);
      const auto roc = read_file(out / "roc_Lay.csv");
      CHECK(roc.rfind("fpr,tpr\n0,0\n", 0) == 0);
      CHECK(roc.size() >= 12);
      CHECK(roc.substr(roc.size() - 4) == "1,1\n");
    }
  }

  SUBCASE("checkpoint problems exit 2") {
    const auto cfg = fast_config(dir.path(), 1);
    const auto out = dir.path() / "k";
    REQUIRE(run("train" + data + " --config " + cfg + " --out " + q(out)).code == 0);
    auto bytes = read_file(out / "model.harm");
    bytes[8] = 9;
    write_text(dir.path() / "v9.harm", bytes);
    auto r = run("evaluate" + data + " --out " + q(out) + " --checkpoint " + q(dir.path() / "v9.harm"));
    CHECK(r.code == 2);
    CHECK(r.output.find("unsupported checkpoint version 9") != std::string::npos);
    r = run("evaluate" + data + " --out " + q(out) + " --checkpoint " + q(dir.path() / "none.harm"));
    CHECK(r.code == 2);
  }

  SUBCASE("configuration and usage errors exit 1") {
    write_text(dir.path() / "bad.json", R"({"train": {"epochz": 3}})");
    CHECK(run("train" + data + " --config " + q(dir.path() / "bad.json")).code == 1);
    write_text(dir.path() / "mixed.json", R"({"model": {"power_channel": {"dense": {"units": 3}}}})");
    const auto r = run("train" + data + " --config " + q(dir.path() / "mixed.json"));
    CHECK(r.code == 1);
    CHECK(r.output.find("identical") != std::string::npos);
    CHECK(run("train --no-such-flag").code == 1);
    CHECK(run("").code == 1);
    CHECK(run("evaluate --split validation").code == 1);
    CHECK(run("--help").code == 0);
  }
}
