#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rgc/dataset.hpp"
#include "rgc/io.hpp"

#ifndef RGC_CLI_PATH
#error "RGC_CLI_PATH must be defined by the build"
#endif

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RGC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: ", path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kTinyFlags =
    "--per-class 30 --test-per-class 10 --classes 3 --dim 4 "
    "--warmup-epochs 2 --finetune-epochs 3 --batch-size 16 --seed 5 "
    "--noise-kind symmetric --noise-rate 0.3";

}  // namespace

TEST_CASE("generate writes re-parseable dataset files") {
  const fs::path dir = fresh_dir("rgc_cli_generate");
  const int code = run_cli("generate " + kTinyFlags + " --output " + dir.string());
  CHECK(code == 0);
  const auto train = rgc::read_dataset_csv((dir / "dataset.csv").string());
  const auto test = rgc::read_dataset_csv((dir / "dataset_test.csv").string());
  CHECK(train.size() == 90);
  CHECK(test.size() == 30);
  std::size_t noisy = 0;
  for (const rgc::Sample& s : train) noisy += s.is_noisy ? 1 : 0;
  CHECK(noisy > 10);
  fs::remove_all(dir);
}

TEST_CASE("train produces the four run artifacts") {
  const fs::path dir = fresh_dir("rgc_cli_train");
  const int code = run_cli("train " + kTinyFlags + " --output " + dir.string());
  CHECK(code == 0);
  const fs::path run_dir = dir / "rgc_seed5";
  CHECK(fs::exists(run_dir / "run_log.jsonl"));
  CHECK(fs::exists(run_dir / "reliability.csv"));
  CHECK(fs::exists(run_dir / "threshold_sweep.csv"));
  CHECK(fs::exists(run_dir / "summary.csv"));

  // The dump is re-parseable and covers every fine-tuning epoch.
  const auto rows = rgc::read_reliability_csv((run_dir / "reliability.csv").string());
  CHECK(rows.size() == 90 * 3);

  SUBCASE("audit recomputes metrics from the dumps") {
    const int audit_code = run_cli("audit --run-dir " + run_dir.string());
    CHECK(audit_code == 0);
    CHECK(fs::exists(run_dir / "threshold_sweep_audit.csv"));
    // The audit sweep matches the training-time sweep byte for byte.
    CHECK(slurp(run_dir / "threshold_sweep_audit.csv") ==
          slurp(run_dir / "threshold_sweep.csv"));
  }
  fs::remove_all(dir);
}

TEST_CASE("repeat runs are byte identical") {
  const fs::path dir_a = fresh_dir("rgc_cli_repeat_a");
  const fs::path dir_b = fresh_dir("rgc_cli_repeat_b");
  CHECK(run_cli("train " + kTinyFlags + " --output " + dir_a.string()) == 0);
  CHECK(run_cli("train " + kTinyFlags + " --output " + dir_b.string()) == 0);
  for (const char* name :
       {"run_log.jsonl", "reliability.csv", "threshold_sweep.csv", "summary.csv"}) {
    CHECK(slurp(dir_a / "rgc_seed5" / name) == slurp(dir_b / "rgc_seed5" / name));
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("suite aggregates means over seeds") {
  const fs::path dir = fresh_dir("rgc_cli_suite");
  const fs::path config = dir / "config.json";
  {
    std::ofstream out(config);
    out << R"({
      "dataset": {"classes": 3, "per_class": 30, "test_per_class": 10, "dim": 4},
      "noise": {"kind": "symmetric", "rate": 0.3},
      "trainer": {"warmup_epochs": 2, "finetune_epochs": 3, "batch_size": 16},
      "ablation": {"variants": ["rgc", "ce"]},
      "output_dir": ")" << (dir / "runs").string() << R"(",
      "seeds": [5, 6]
    })";
  }
  CHECK(run_cli("suite --config " + config.string()) == 0);
  for (const char* run : {"rgc_seed5", "rgc_seed6", "ce_seed5", "ce_seed6"}) {
    CHECK(fs::exists(dir / "runs" / run / "summary.csv"));
  }
  const std::string table = slurp(dir / "runs" / "suite_summary.csv");
  // Header + 4 per-run rows + 2 mean rows.
  CHECK(std::count(table.begin(), table.end(), '\n') == 7);
  CHECK(table.find("rgc,mean") != std::string::npos);
  CHECK(table.find("ce,mean") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("config errors exit with code 2") {
  const fs::path dir = fresh_dir("rgc_cli_badcfg");
  const fs::path config = dir / "bad.json";
  {
    std::ofstream out(config);
    out << R"({"trainer": {"fuse_beta": 1.5}})";
  }
  CHECK(run_cli("train --config " + config.string()) == 2);
  CHECK(run_cli("train --noise-rate 1.5") == 2);
  fs::remove_all(dir);
}

TEST_CASE("flags override config file values") {
  const fs::path dir = fresh_dir("rgc_cli_override");
  const fs::path config = dir / "config.json";
  {
    std::ofstream out(config);
    out << R"({
      "dataset": {"classes": 3, "per_class": 20, "test_per_class": 10, "dim": 4},
      "noise": {"kind": "symmetric", "rate": 0.0},
      "trainer": {"warmup_epochs": 1, "finetune_epochs": 1, "batch_size": 16},
      "seeds": [9]
    })";
  }
  // Override the noise rate on the command line; the run directory layout
  // proves the flag seed also took effect.
  const int code = run_cli("generate --config " + config.string() +
                           " --noise-rate 0.5 --output " + dir.string());
  CHECK(code == 0);
  const auto train = rgc::read_dataset_csv((dir / "dataset.csv").string());
  std::size_t noisy = 0;
  for (const rgc::Sample& s : train) noisy += s.is_noisy ? 1 : 0;
  CHECK(noisy > 15);  // ~50% of 60
  fs::remove_all(dir);
}
