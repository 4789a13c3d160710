#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rgc/config.hpp"
#include "rgc/io.hpp"
#include "rgc/trainer.hpp"

namespace rgc {

/// Train and test splits drawn from the configured mixture, with noise
/// injected into the training split only. Dataset, noise, and test draws
/// use the "dataset", "noise", and "dataset-test" sub-streams of the
/// root seed, so they are independent of trainer settings. Test ids
/// start after the last training id.
struct DatasetBundle {
  std::vector<Sample> train;
  std::vector<Sample> test;
};

DatasetBundle build_dataset(const ExperimentConfig& cfg, std::uint64_t root_seed);

/// Runs one (variant, seed) experiment and writes the four artifacts
/// into run_dir: run_log.jsonl, reliability.csv, threshold_sweep.csv,
/// summary.csv. When the run has no noisy or no hard-clean samples the
/// sweep is header-only and AUROC/HCPR are NaN. `label` names the run
/// in summaries (usually the variant, plus any sweep suffix).
SummaryRow run_single(const ExperimentConfig& cfg, ScoreVariant variant,
                      std::uint64_t seed, const std::filesystem::path& run_dir,
                      const std::string& label);

/// Expands the ablation grid (variants x seeds, plus beta/alpha sweep
/// entries as full-RGC runs) under cfg.output_dir, one directory per
/// run, and writes the aggregate table suite_summary.csv with per-run
/// rows followed by per-variant means. Returns the table.
std::vector<SummaryRow> run_suite(const ExperimentConfig& cfg);

struct AuditReport {
  int epoch = 0;  // epoch audited (the last one in the dump)
  std::size_t samples = 0;
  double auroc_score = 0.0;   // NaN when undefined
  double auprc_score = 0.0;   // NaN when undefined
  double hcpr_at_median = 0.0;  // NaN when undefined
};

/// Recomputes detection metrics from an existing reliability dump and
/// rewrites the threshold sweep as threshold_sweep_audit.csv.
AuditReport audit_run(const std::filesystem::path& run_dir);

}  // namespace rgc
