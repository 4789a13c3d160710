#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rgc/dataset.hpp"
#include "rgc/model.hpp"
#include "rgc/reliability.hpp"

namespace rgc {

/// All training hyperparameters. validate() throws InvalidConfigError
/// naming the offending field and bound.
struct TrainerConfig {
  int warmup_epochs = 5;             // E_w
  int finetune_epochs = 30;
  double learning_rate = 0.1;
  int batch_size = 64;
  std::vector<int> hidden_widths = {32, 32};
  double ema_momentum = 0.999;       // m
  double sharpen_temperature = 0.7;  // T
  double score_momentum = 0.9;       // mu
  double trust_alpha = 0.6;          // alpha
  double fuse_beta = 0.2;            // beta
  double reference_weight = 1.0;     // lambda
  double eps = 1e-8;
  double hard_clean_fraction = 0.2;
  std::uint64_t seed = 1;

  /// Test/ablation hooks: pin every trust weight to a constant, or
  /// replace the lambda*(1-w) reference coefficient with a constant.
  std::optional<double> forced_trust;
  std::optional<double> fixed_reference_coeff;

  void validate() const;

  bool operator==(const TrainerConfig&) const = default;
};

/// Score-composition and objective switches for the ablation grid.
///  - FullRgc:      s = beta*R_hat + (1-beta)*C_hat, trust-weighted objective.
///  - TraceTeacher: s = R_hat only (relative radial mismatch), same objective.
///  - TraceOnly:    no teacher; s = standardized log absolute trace;
///                  objective keeps only the trust-weighted observed branch.
///  - TeacherOnly:  teacher supervision without reliability scoring:
///                  w = 1 and a fixed reference coefficient of 0.5*lambda
///                  (the weight a neutral-trust sample would get).
///  - PlainCe:      observed-label cross-entropy only, no scoring machinery.
enum class ScoreVariant { FullRgc, TraceTeacher, TraceOnly, TeacherOnly, PlainCe };

ScoreVariant variant_from_string(const std::string& name);
std::string to_string(ScoreVariant variant);

/// One line of the run log.
struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double mean_trust_clean = 0.0;
  double mean_trust_noisy = 0.0;
  std::optional<double> teacher_agreement;  // empty when no teacher runs
  int clean_count = 0;
  int noisy_count = 0;
};

/// Per-sample smoothed unreliability scores, dense over sample ids,
/// persisted across epochs. Updated once per sample per epoch.
struct ScoreStore {
  std::vector<std::optional<double>> smoothed;

  explicit ScoreStore(std::size_t max_id = 0) : smoothed(max_id) {}
  void ensure_size(std::size_t n) {
    if (smoothed.size() < n) smoothed.resize(n);
  }
};

/// Plain observed-label cross-entropy SGD for cfg.warmup_epochs epochs.
/// Returns the per-sample losses of the warmed model (used for hard-clean
/// tagging). Deterministic given the batch stream.
Vec warmup(ModelParams& model, const std::vector<Sample>& samples,
           const TrainerConfig& cfg, RandomStream& batch_rng,
           std::vector<EpochLog>* logs = nullptr);

/// Observed-label cross-entropy of each sample under the given params.
Vec per_sample_losses(const ModelParams& model, const std::vector<Sample>& samples);

struct EpochOutput {
  EpochLog log;
  std::vector<ReliabilityRecord> records;
};

/// One fine-tuning epoch:
///  (a) score every sample against the frozen (student, teacher) snapshot,
///  (b) standardize radial and angular signals over the epoch and fuse,
///  (c) update the per-sample smoothed scores,
///  (d) map them to trust weights,
///  (e) run trust-weighted mini-batch SGD with the epoch-frozen weights
///      and snapshot teacher targets,
///  (f) EMA-update the teacher after every optimizer step.
/// Trust weights depend only on the snapshot, so batch order cannot
/// change them. teacher must be non-null except for TraceOnly/PlainCe.
EpochOutput rgc_epoch(ModelParams& model, TeacherState* teacher,
                      const std::vector<Sample>& samples, ScoreStore& store,
                      const TrainerConfig& cfg, int epoch, ScoreVariant variant,
                      RandomStream& batch_rng);

/// Full experiment result on one dataset split.
struct RunResult {
  std::vector<EpochLog> epoch_logs;                       // warm-up then fine-tune
  std::vector<std::vector<ReliabilityRecord>> reliability;  // per fine-tune epoch
  Vec warmup_losses;     // observed-label CE under the warmed model
  Vec final_losses;      // observed-label CE at the final snapshot
  Vec final_scores;      // final smoothed scores (0 for PlainCe)
  Vec final_tau_obs;
  Vec final_trust;
  std::vector<bool> noisy_mask;
  std::vector<bool> hard_clean_mask;
  double test_accuracy = 0.0;
  ModelParams model;
};

/// Dataset -> warm-up -> hard-clean tagging -> fine-tuning, with the
/// teacher initialized from the warmed student. All randomness flows
/// from cfg.seed through the "init" and "batch-order" streams.
RunResult run_experiment(const std::vector<Sample>& train,
                         const std::vector<Sample>& test,
                         const TrainerConfig& cfg, ScoreVariant variant);

/// Fraction of test samples whose argmax prediction matches the clean label.
double clean_accuracy(const ModelParams& model, const std::vector<Sample>& samples);

}  // namespace rgc
