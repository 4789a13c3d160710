#include "rgc/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "rgc/errors.hpp"
#include "rgc/metrics.hpp"
#include "rgc/rng.hpp"

namespace rgc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool any_true(const std::vector<bool>& mask) {
  return std::any_of(mask.begin(), mask.end(), [](bool b) { return b; });
}

std::string seed_label(std::uint64_t seed) { return std::to_string(seed); }

}  // namespace

DatasetBundle build_dataset(const ExperimentConfig& cfg, std::uint64_t root_seed) {
  cfg.validate();
  DatasetBundle bundle;
  bundle.train = make_gaussian_mixture(cfg.dataset.num_classes, cfg.dataset.per_class,
                                       cfg.dataset.dim, cfg.dataset.separation,
                                       derive_seed(root_seed, "dataset"));
  const int test_offset = static_cast<int>(bundle.train.size());
  bundle.test = make_gaussian_mixture(cfg.dataset.num_classes, cfg.dataset.test_per_class,
                                      cfg.dataset.dim, cfg.dataset.separation,
                                      derive_seed(root_seed, "dataset-test"), test_offset);
  NoiseSpec spec;
  spec.kind = cfg.noise.kind;
  spec.rate = cfg.noise.rate;
  spec.class_map = cfg.noise.class_map;
  spec.seed = derive_seed(root_seed, "noise");
  inject_noise(bundle.train, spec);
  return bundle;
}

SummaryRow run_single(const ExperimentConfig& cfg, ScoreVariant variant,
                      std::uint64_t seed, const std::filesystem::path& run_dir,
                      const std::string& label) {
  const DatasetBundle data = build_dataset(cfg, seed);

  TrainerConfig tcfg = cfg.trainer;
  tcfg.seed = seed;
  const RunResult result = run_experiment(data.train, data.test, tcfg, variant);

  std::filesystem::create_directories(run_dir);
  write_run_log((run_dir / "run_log.jsonl").string(), result.epoch_logs);
  write_reliability_csv((run_dir / "reliability.csv").string(), result.reliability);

  SummaryRow row;
  row.variant = label;
  row.seed = seed_label(seed);
  row.final_accuracy = result.test_accuracy;
  row.auroc = kNan;
  row.hcpr = kNan;

  const bool has_noisy = any_true(result.noisy_mask);
  const bool has_hard = any_true(result.hard_clean_mask);
  std::vector<SweepRow> sweep;
  if (has_noisy && !result.reliability.empty()) {
    row.auroc = auroc(result.final_scores, result.noisy_mask);
  }
  if (has_noisy && has_hard && !result.reliability.empty()) {
    sweep = threshold_sweep(result.final_scores, result.noisy_mask,
                            result.hard_clean_mask);
    // Median over the diagnostic pool (noisy plus hard-clean), the
    // population the detection metrics are defined on.
    Vec pool;
    for (std::size_t i = 0; i < result.final_scores.size(); ++i) {
      if (result.noisy_mask[i] || result.hard_clean_mask[i]) {
        pool.push_back(result.final_scores[i]);
      }
    }
    const double median = quantile(pool, 0.5);
    row.hcpr = detection_at_threshold(result.final_scores, result.noisy_mask,
                                      result.hard_clean_mask, median)
                   .hcpr;
  }
  write_threshold_sweep_csv((run_dir / "threshold_sweep.csv").string(), sweep);
  write_summary_csv((run_dir / "summary.csv").string(), {row});
  return row;
}

std::vector<SummaryRow> run_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::filesystem::path root(cfg.output_dir);
  std::filesystem::create_directories(root);

  // (label, variant, trainer overrides) grid.
  struct PlannedRun {
    std::string label;
    ScoreVariant variant;
    std::optional<double> beta_override;
    std::optional<double> alpha_override;
  };
  std::vector<PlannedRun> plan;
  for (const std::string& name : cfg.ablation.variants) {
    plan.push_back({name, variant_from_string(name), {}, {}});
  }
  for (double beta : cfg.ablation.beta_sweep) {
    std::ostringstream label;
    label << "rgc_beta" << beta;
    plan.push_back({label.str(), ScoreVariant::FullRgc, beta, {}});
  }
  for (double alpha : cfg.ablation.alpha_sweep) {
    std::ostringstream label;
    label << "rgc_alpha" << alpha;
    plan.push_back({label.str(), ScoreVariant::FullRgc, {}, alpha});
  }

  std::vector<SummaryRow> rows;
  for (const PlannedRun& run : plan) {
    for (std::uint64_t seed : cfg.seeds) {
      ExperimentConfig run_cfg = cfg;
      if (run.beta_override) run_cfg.trainer.fuse_beta = *run.beta_override;
      if (run.alpha_override) run_cfg.trainer.trust_alpha = *run.alpha_override;
      const std::filesystem::path run_dir =
          root / (run.label + "_seed" + seed_label(seed));
      rows.push_back(run_single(run_cfg, run.variant, seed, run_dir, run.label));
    }
  }

  // Per-label means over seeds, appended in plan order.
  std::vector<SummaryRow> table = rows;
  for (const PlannedRun& run : plan) {
    SummaryRow mean;
    mean.variant = run.label;
    mean.seed = "mean";
    int count = 0;
    double acc = 0.0, auc = 0.0, hcpr = 0.0;
    bool auc_defined = true, hcpr_defined = true;
    for (const SummaryRow& row : rows) {
      if (row.variant != run.label) continue;
      ++count;
      acc += row.final_accuracy;
      if (std::isnan(row.auroc)) auc_defined = false; else auc += row.auroc;
      if (std::isnan(row.hcpr)) hcpr_defined = false; else hcpr += row.hcpr;
    }
    if (count == 0) continue;
    mean.final_accuracy = acc / count;
    mean.auroc = auc_defined ? auc / count : kNan;
    mean.hcpr = hcpr_defined ? hcpr / count : kNan;
    table.push_back(mean);
  }
  write_summary_csv((root / "suite_summary.csv").string(), table);
  return table;
}

AuditReport audit_run(const std::filesystem::path& run_dir) {
  const std::vector<ReliabilityRecord> all =
      read_reliability_csv((run_dir / "reliability.csv").string());
  if (all.empty()) {
    throw UndefinedMetricError("audit: reliability dump has no rows");
  }
  int last_epoch = all.front().epoch;
  for (const ReliabilityRecord& r : all) last_epoch = std::max(last_epoch, r.epoch);

  Vec scores;
  std::vector<bool> noisy, hard;
  for (const ReliabilityRecord& r : all) {
    if (r.epoch != last_epoch) continue;
    scores.push_back(r.s_smoothed);
    noisy.push_back(r.is_noisy);
    hard.push_back(r.is_hard_clean);
  }

  AuditReport report;
  report.epoch = last_epoch;
  report.samples = scores.size();
  report.auroc_score = kNan;
  report.auprc_score = kNan;
  report.hcpr_at_median = kNan;

  const bool has_noisy = any_true(noisy);
  const bool has_hard = any_true(hard);
  std::vector<SweepRow> sweep;
  if (has_noisy) {
    report.auroc_score = auroc(scores, noisy);
    report.auprc_score = auprc(scores, noisy);
  }
  if (has_noisy && has_hard) {
    sweep = threshold_sweep(scores, noisy, hard);
    Vec pool;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (noisy[i] || hard[i]) pool.push_back(scores[i]);
    }
    report.hcpr_at_median =
        detection_at_threshold(scores, noisy, hard, quantile(pool, 0.5)).hcpr;
  }
  write_threshold_sweep_csv((run_dir / "threshold_sweep_audit.csv").string(), sweep);
  return report;
}

}  // namespace rgc
