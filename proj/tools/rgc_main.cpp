// Experiment harness for the geometric-reliability training pipeline.
//
// Verbs:
//   generate  draw the configured dataset (with noise) and write it as CSV
//   train     run a single (variant, seed) experiment
//   suite     run the full ablation grid and aggregate a summary table
//   audit     recompute detection metrics from an existing run directory
//
// Exit codes: 0 success, 2 configuration error, 3 training divergence.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rgc/config.hpp"
#include "rgc/dataset.hpp"
#include "rgc/errors.hpp"
#include "rgc/io.hpp"
#include "rgc/rng.hpp"
#include "rgc/runner.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> noise_kind;
  std::optional<double> noise_rate;
  std::optional<int> classes;
  std::optional<int> per_class;
  std::optional<int> test_per_class;
  std::optional<int> dim;
  std::optional<double> separation;
  std::optional<int> warmup_epochs;
  std::optional<int> finetune_epochs;
  std::optional<double> learning_rate;
  std::optional<int> batch_size;
  std::optional<double> ema_momentum;
  std::optional<double> temperature;
  std::optional<double> mu;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> lambda;
  std::optional<std::string> output_dir;
  std::optional<std::vector<std::string>> variants;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "JSON config file");
  cmd->add_option("--seed", flags.seed, "root seed (replaces the config seed list)");
  cmd->add_option("--noise-kind", flags.noise_kind,
                  "symmetric | asymmetric | instance_dependent");
  cmd->add_option("--noise-rate", flags.noise_rate, "label corruption rate in [0,1)");
  cmd->add_option("--classes", flags.classes, "number of mixture classes");
  cmd->add_option("--per-class", flags.per_class, "training samples per class");
  cmd->add_option("--test-per-class", flags.test_per_class, "held-out samples per class");
  cmd->add_option("--dim", flags.dim, "feature dimension");
  cmd->add_option("--separation", flags.separation, "pairwise center distance");
  cmd->add_option("--warmup-epochs", flags.warmup_epochs, "warm-up epochs");
  cmd->add_option("--finetune-epochs", flags.finetune_epochs, "fine-tuning epochs");
  cmd->add_option("--lr", flags.learning_rate, "SGD learning rate");
  cmd->add_option("--batch-size", flags.batch_size, "mini-batch size");
  cmd->add_option("--ema-momentum", flags.ema_momentum, "teacher EMA momentum m");
  cmd->add_option("--temperature", flags.temperature, "teacher sharpening T");
  cmd->add_option("--mu", flags.mu, "score smoothing momentum");
  cmd->add_option("--alpha", flags.alpha, "trust-weight sharpness");
  cmd->add_option("--beta", flags.beta, "radial/angular fusion coefficient");
  cmd->add_option("--lambda", flags.lambda, "reference-loss weight");
  cmd->add_option("--output", flags.output_dir, "output directory");
  cmd->add_option("--variants", flags.variants,
                  "ablation variants (rgc, trace, teacher, trace_teacher, ce)")
      ->delimiter(',');
}

rgc::ExperimentConfig load_config(const CommonFlags& flags) {
  rgc::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = rgc::parse_config(flags.config_path);
  if (flags.seed) cfg.seeds = {*flags.seed};
  if (flags.noise_kind) cfg.noise.kind = rgc::noise_kind_from_string(*flags.noise_kind);
  if (flags.noise_rate) cfg.noise.rate = *flags.noise_rate;
  if (flags.classes) cfg.dataset.num_classes = *flags.classes;
  if (flags.per_class) cfg.dataset.per_class = *flags.per_class;
  if (flags.test_per_class) cfg.dataset.test_per_class = *flags.test_per_class;
  if (flags.dim) cfg.dataset.dim = *flags.dim;
  if (flags.separation) cfg.dataset.separation = *flags.separation;
  if (flags.warmup_epochs) cfg.trainer.warmup_epochs = *flags.warmup_epochs;
  if (flags.finetune_epochs) cfg.trainer.finetune_epochs = *flags.finetune_epochs;
  if (flags.learning_rate) cfg.trainer.learning_rate = *flags.learning_rate;
  if (flags.batch_size) cfg.trainer.batch_size = *flags.batch_size;
  if (flags.ema_momentum) cfg.trainer.ema_momentum = *flags.ema_momentum;
  if (flags.temperature) cfg.trainer.sharpen_temperature = *flags.temperature;
  if (flags.mu) cfg.trainer.score_momentum = *flags.mu;
  if (flags.alpha) cfg.trainer.trust_alpha = *flags.alpha;
  if (flags.beta) cfg.trainer.fuse_beta = *flags.beta;
  if (flags.lambda) cfg.trainer.reference_weight = *flags.lambda;
  if (flags.output_dir) cfg.output_dir = *flags.output_dir;
  if (flags.variants) cfg.ablation.variants = *flags.variants;
  cfg.validate();
  return cfg;
}

int cmd_generate(const CommonFlags& flags) {
  const rgc::ExperimentConfig cfg = load_config(flags);
  const std::uint64_t seed = cfg.seeds.front();
  const rgc::DatasetBundle data = rgc::build_dataset(cfg, seed);
  std::filesystem::create_directories(cfg.output_dir);
  const auto train_path = std::filesystem::path(cfg.output_dir) / "dataset.csv";
  const auto test_path = std::filesystem::path(cfg.output_dir) / "dataset_test.csv";
  rgc::write_dataset_csv(train_path.string(), data.train);
  rgc::write_dataset_csv(test_path.string(), data.test);
  std::size_t noisy = 0;
  for (const rgc::Sample& s : data.train) noisy += s.is_noisy ? 1 : 0;
  std::cout << "wrote " << data.train.size() << " train / " << data.test.size()
            << " test samples (" << noisy << " noisy) to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_train(const CommonFlags& flags, const std::string& variant_name) {
  rgc::ExperimentConfig cfg = load_config(flags);
  const rgc::ScoreVariant variant = rgc::variant_from_string(variant_name);
  const std::uint64_t seed = cfg.seeds.front();
  const std::filesystem::path run_dir =
      std::filesystem::path(cfg.output_dir) /
      (variant_name + "_seed" + std::to_string(seed));
  const rgc::SummaryRow row =
      rgc::run_single(cfg, variant, seed, run_dir, variant_name);
  std::cout << "run " << run_dir.string() << ": accuracy=" << row.final_accuracy
            << " auroc=" << row.auroc << " hcpr=" << row.hcpr << "\n";
  return 0;
}

int cmd_suite(const CommonFlags& flags) {
  const rgc::ExperimentConfig cfg = load_config(flags);
  const std::vector<rgc::SummaryRow> table = rgc::run_suite(cfg);
  for (const rgc::SummaryRow& row : table) {
    if (row.seed != "mean") continue;
    std::cout << row.variant << ": mean accuracy=" << row.final_accuracy
              << " auroc=" << row.auroc << " hcpr=" << row.hcpr << "\n";
  }
  std::cout << "summary table: "
            << (std::filesystem::path(cfg.output_dir) / "suite_summary.csv").string()
            << "\n";
  return 0;
}

int cmd_audit(const std::string& run_dir) {
  const rgc::AuditReport report = rgc::audit_run(run_dir);
  std::cout << "audited epoch " << report.epoch << " (" << report.samples
            << " samples): auroc=" << report.auroc_score
            << " auprc=" << report.auprc_score
            << " hcpr@median=" << report.hcpr_at_median << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric-reliability experiments on synthetic noisy-label data"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string variant_name = "rgc";
  std::string audit_dir;

  CLI::App* generate = app.add_subcommand("generate", "write the dataset CSVs");
  add_common_flags(generate, flags);

  CLI::App* train = app.add_subcommand("train", "run a single experiment");
  add_common_flags(train, flags);
  train->add_option("--variant", variant_name,
                    "rgc | trace | teacher | trace_teacher | ce");

  CLI::App* suite = app.add_subcommand("suite", "run the ablation grid");
  add_common_flags(suite, flags);

  CLI::App* audit = app.add_subcommand("audit", "recompute metrics from dumps");
  audit->add_option("--run-dir", audit_dir, "run directory to audit")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(flags);
    if (train->parsed()) return cmd_train(flags, variant_name);
    if (suite->parsed()) return cmd_suite(flags);
    if (audit->parsed()) return cmd_audit(audit_dir);
  } catch (const rgc::InvalidConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rgc::TrainingDivergedError& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
