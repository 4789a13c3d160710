#include "rgc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rgc/errors.hpp"
#include "rgc/numerics.hpp"

namespace rgc {

void TrainerConfig::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidConfigError(msg); };
  if (warmup_epochs < 0) fail("trainer.warmup_epochs: must be >= 0");
  if (finetune_epochs < 0) fail("trainer.finetune_epochs: must be >= 0");
  if (learning_rate <= 0.0) fail("trainer.learning_rate: must be > 0");
  if (batch_size < 1) fail("trainer.batch_size: must be >= 1");
  for (int w : hidden_widths) {
    if (w < 1) fail("trainer.hidden_widths: widths must be >= 1");
  }
  if (ema_momentum < 0.0 || ema_momentum >= 1.0) fail("trainer.ema_momentum: must be in [0, 1)");
  if (sharpen_temperature <= 0.0) fail("trainer.sharpen_temperature: must be > 0");
  if (score_momentum < 0.0 || score_momentum >= 1.0) fail("trainer.score_momentum: must be in [0, 1)");
  if (trust_alpha <= 0.0) fail("trainer.trust_alpha: must be > 0");
  if (fuse_beta < 0.0 || fuse_beta > 1.0) fail("trainer.fuse_beta: must be in [0, 1]");
  if (reference_weight < 0.0) fail("trainer.reference_weight: must be >= 0");
  if (eps <= 0.0) fail("trainer.eps: must be > 0");
  if (hard_clean_fraction <= 0.0 || hard_clean_fraction >= 1.0) {
    fail("trainer.hard_clean_fraction: must be in (0, 1)");
  }
  if (forced_trust && (*forced_trust < 0.0 || *forced_trust > 1.0)) {
    fail("trainer.forced_trust: must be in [0, 1]");
  }
  if (fixed_reference_coeff && *fixed_reference_coeff < 0.0) {
    fail("trainer.fixed_reference_coeff: must be >= 0");
  }
}

ScoreVariant variant_from_string(const std::string& name) {
  if (name == "rgc") return ScoreVariant::FullRgc;
  if (name == "trace_teacher") return ScoreVariant::TraceTeacher;
  if (name == "trace") return ScoreVariant::TraceOnly;
  if (name == "teacher") return ScoreVariant::TeacherOnly;
  if (name == "ce") return ScoreVariant::PlainCe;
  throw InvalidConfigError("ablation.variants: unknown variant '" + name + "'");
}

std::string to_string(ScoreVariant variant) {
  switch (variant) {
    case ScoreVariant::FullRgc: return "rgc";
    case ScoreVariant::TraceTeacher: return "trace_teacher";
    case ScoreVariant::TraceOnly: return "trace";
    case ScoreVariant::TeacherOnly: return "teacher";
    case ScoreVariant::PlainCe: return "ce";
  }
  return "rgc";
}

namespace {

Vec one_hot(int label, int num_classes) {
  Vec e(num_classes, 0.0);
  e[static_cast<std::size_t>(label)] = 1.0;
  return e;
}

bool uses_teacher(ScoreVariant v) {
  return v == ScoreVariant::FullRgc || v == ScoreVariant::TraceTeacher ||
         v == ScoreVariant::TeacherOnly;
}

int argmax(const Vec& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// One epoch of plain observed-label cross-entropy SGD; returns the mean
/// per-sample loss seen during the pass.
double ce_epoch(ModelParams& model, const std::vector<Sample>& samples,
                const TrainerConfig& cfg, RandomStream& batch_rng, int epoch) {
  const int k = model.num_classes();
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  batch_rng.shuffle(order);

  double loss_sum = 0.0;
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
    ModelGrad grad = make_zero_grad(model);
    const double inv_b = 1.0 / static_cast<double>(stop - start);
    for (std::size_t t = start; t < stop; ++t) {
      const Sample& s = samples[order[t]];
      const ForwardRecord fr = forward(model, s.x);
      const Vec target = one_hot(s.observed_label, k);
      const double loss = num::cross_entropy(fr.p, target);
      if (!std::isfinite(loss)) {
        throw TrainingDivergedError("epoch " + std::to_string(epoch) + ", sample " +
                                    std::to_string(s.id) + ": non-finite loss");
      }
      loss_sum += loss;
      Vec dz(fr.p);
      for (std::size_t c = 0; c < dz.size(); ++c) dz[c] -= target[c];
      accumulate(grad, backward(model, fr, dz), inv_b);
    }
    apply_sgd(model, grad, cfg.learning_rate);
  }
  return loss_sum / static_cast<double>(samples.size());
}

EpochLog make_ce_log(const std::vector<Sample>& samples, int epoch, double mean_loss) {
  EpochLog log;
  log.epoch = epoch;
  log.mean_loss = mean_loss;
  log.mean_trust_clean = 1.0;
  log.mean_trust_noisy = 1.0;
  for (const Sample& s : samples) (s.is_noisy ? log.noisy_count : log.clean_count)++;
  return log;
}

}  // namespace

Vec per_sample_losses(const ModelParams& model, const std::vector<Sample>& samples) {
  const int k = model.num_classes();
  Vec losses(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const ForwardRecord fr = forward(model, samples[i].x);
    losses[i] = num::cross_entropy(fr.p, one_hot(samples[i].observed_label, k));
  }
  return losses;
}

Vec warmup(ModelParams& model, const std::vector<Sample>& samples,
           const TrainerConfig& cfg, RandomStream& batch_rng,
           std::vector<EpochLog>* logs) {
  cfg.validate();
  if (samples.empty()) {
    throw InvalidInputError("warmup: empty sample set");
  }
  for (int e = 0; e < cfg.warmup_epochs; ++e) {
    const double mean_loss = ce_epoch(model, samples, cfg, batch_rng, e);
    if (logs) logs->push_back(make_ce_log(samples, e, mean_loss));
  }
  return per_sample_losses(model, samples);
}

EpochOutput rgc_epoch(ModelParams& model, TeacherState* teacher,
                      const std::vector<Sample>& samples, ScoreStore& store,
                      const TrainerConfig& cfg, int epoch, ScoreVariant variant,
                      RandomStream& batch_rng) {
  cfg.validate();
  const std::size_t n = samples.size();
  if (n < 2) {
    throw InvalidInputError("rgc_epoch: need at least 2 samples");
  }
  if (uses_teacher(variant) && teacher == nullptr) {
    throw InvalidInputError("rgc_epoch: variant requires an initialized teacher");
  }
  const int k = model.num_classes();
  const bool with_teacher = uses_teacher(variant);

  // (a) Score every sample against the frozen (student, teacher) snapshot.
  Vec tau_obs(n, 0.0), tau_ref(n, 0.0), conflict(n, 0.0), r_tau(n, 0.0);
  Vec abs_log_trace(n, 0.0);
  std::vector<Vec> snapshot_q(n);
  std::size_t teacher_agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = samples[i];
    const ForwardRecord fr = forward(model, s.x);
    const Vec target = one_hot(s.observed_label, k);
    tau_obs[i] = last_layer_trace(fr.p, target, fr.h);
    if (with_teacher) {
      snapshot_q[i] = teacher_target(*teacher, s.x);
      tau_ref[i] = last_layer_trace(fr.p, snapshot_q[i], fr.h);
      const Matrix g_obs = last_layer_gradient(fr, target);
      const Matrix g_ref = last_layer_gradient(fr, snapshot_q[i]);
      conflict[i] = geometric_conflict(g_obs, g_ref, cfg.eps).conflict;
      r_tau[i] = radial_score(tau_obs[i], tau_ref[i], cfg.eps);
      if (argmax(snapshot_q[i]) == s.observed_label) ++teacher_agree;
    } else {
      abs_log_trace[i] = std::log(tau_obs[i] + cfg.eps);
    }
    if (!std::isfinite(tau_obs[i]) || !std::isfinite(conflict[i]) ||
        !std::isfinite(r_tau[i])) {
      throw TrainingDivergedError("epoch " + std::to_string(epoch) + ", sample " +
                                  std::to_string(s.id) + ": non-finite score input");
    }
  }

  // (b) Standardize within the epoch and compose the raw score.
  Vec s_raw;
  switch (variant) {
    case ScoreVariant::FullRgc:
    case ScoreVariant::TeacherOnly:
      s_raw = fuse_scores(num::zscore(r_tau), num::zscore(conflict), cfg.fuse_beta);
      break;
    case ScoreVariant::TraceTeacher:
      s_raw = num::zscore(r_tau);
      break;
    case ScoreVariant::TraceOnly:
      s_raw = num::zscore(abs_log_trace);
      break;
    case ScoreVariant::PlainCe:
      s_raw.assign(n, 0.0);
      break;
  }

  // (c) Per-sample EMA of the score, once per epoch.
  Vec s_smoothed(n);
  std::size_t max_id = 0;
  for (const Sample& s : samples) max_id = std::max(max_id, static_cast<std::size_t>(s.id));
  store.ensure_size(max_id + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t id = static_cast<std::size_t>(samples[i].id);
    s_smoothed[i] = smooth_score(store.smoothed[id], s_raw[i], cfg.score_momentum);
    store.smoothed[id] = s_smoothed[i];
  }

  // (d) Trust weights over the whole epoch.
  Vec trust;
  std::optional<double> forced = cfg.forced_trust;
  if (variant == ScoreVariant::TeacherOnly && !forced) forced = 1.0;
  if (forced) {
    trust.assign(n, *forced);
  } else {
    trust = trust_weights(s_smoothed, cfg.trust_alpha);
  }

  // Reference-branch coefficient per sample.
  Vec ref_coeff(n, 0.0);
  if (with_teacher) {
    for (std::size_t i = 0; i < n; ++i) {
      if (variant == ScoreVariant::TeacherOnly) {
        ref_coeff[i] = cfg.fixed_reference_coeff.value_or(0.5 * cfg.reference_weight);
      } else if (cfg.fixed_reference_coeff) {
        ref_coeff[i] = *cfg.fixed_reference_coeff;
      } else {
        ref_coeff[i] = cfg.reference_weight * (1.0 - trust[i]);
      }
    }
  }

  // (e)+(f) Trust-weighted mini-batch SGD with the epoch-frozen weights
  // and snapshot teacher targets; teacher EMA after every step.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  batch_rng.shuffle(order);

  double loss_sum = 0.0;
  for (std::size_t start = 0; start < n; start += cfg.batch_size) {
    const std::size_t stop = std::min(n, start + cfg.batch_size);
    ModelGrad grad = make_zero_grad(model);
    const double inv_b = 1.0 / static_cast<double>(stop - start);
    for (std::size_t t = start; t < stop; ++t) {
      const std::size_t i = order[t];
      const Sample& s = samples[i];
      const ForwardRecord fr = forward(model, s.x);
      const Vec target = one_hot(s.observed_label, k);
      double loss = trust[i] * num::cross_entropy(fr.p, target);
      Vec dz(k, 0.0);
      for (int c = 0; c < k; ++c) {
        dz[static_cast<std::size_t>(c)] =
            trust[i] * (fr.p[static_cast<std::size_t>(c)] - target[static_cast<std::size_t>(c)]);
      }
      if (ref_coeff[i] > 0.0) {
        loss += ref_coeff[i] * num::cross_entropy(fr.p, snapshot_q[i]);
        for (int c = 0; c < k; ++c) {
          dz[static_cast<std::size_t>(c)] +=
              ref_coeff[i] *
              (fr.p[static_cast<std::size_t>(c)] - snapshot_q[i][static_cast<std::size_t>(c)]);
        }
      }
      if (!std::isfinite(loss)) {
        throw TrainingDivergedError("epoch " + std::to_string(epoch) + ", sample " +
                                    std::to_string(s.id) + ": non-finite loss");
      }
      loss_sum += loss;
      accumulate(grad, backward(model, fr, dz), inv_b);
    }
    apply_sgd(model, grad, cfg.learning_rate);
    if (teacher != nullptr) ema_update(*teacher, model);
  }

  EpochOutput out;
  out.log.epoch = epoch;
  out.log.mean_loss = loss_sum / static_cast<double>(n);
  if (with_teacher) {
    out.log.teacher_agreement = static_cast<double>(teacher_agree) / static_cast<double>(n);
  }
  double trust_clean = 0.0, trust_noisy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = samples[i];
    if (s.is_noisy) {
      ++out.log.noisy_count;
      trust_noisy += trust[i];
    } else {
      ++out.log.clean_count;
      trust_clean += trust[i];
    }
    ReliabilityRecord rec;
    rec.sample_id = s.id;
    rec.epoch = epoch;
    rec.tau_obs = tau_obs[i];
    rec.tau_ref = tau_ref[i];
    rec.conflict = conflict[i];
    rec.r_tau = r_tau[i];
    rec.s_raw = s_raw[i];
    rec.s_smoothed = s_smoothed[i];
    rec.trust_w = trust[i];
    rec.is_noisy = s.is_noisy;
    rec.is_hard_clean = s.is_hard_clean;
    out.records.push_back(rec);
  }
  if (out.log.clean_count > 0) out.log.mean_trust_clean = trust_clean / out.log.clean_count;
  if (out.log.noisy_count > 0) out.log.mean_trust_noisy = trust_noisy / out.log.noisy_count;
  return out;
}

RunResult run_experiment(const std::vector<Sample>& train,
                         const std::vector<Sample>& test,
                         const TrainerConfig& cfg, ScoreVariant variant) {
  cfg.validate();
  if (train.empty()) {
    throw InvalidInputError("run_experiment: empty training set");
  }
  const int dim = static_cast<int>(train.front().x.size());
  int k = 0;
  for (const Sample& s : train) {
    k = std::max({k, s.clean_label + 1, s.observed_label + 1});
  }
  for (const Sample& s : test) k = std::max(k, s.clean_label + 1);

  RandomStream init_rng(cfg.seed, "init");
  RandomStream batch_rng(cfg.seed, "batch-order");
  ModelParams model = make_mlp(dim, cfg.hidden_widths, k, init_rng);

  std::vector<Sample> working(train);

  RunResult result;
  result.warmup_losses = warmup(model, working, cfg, batch_rng, &result.epoch_logs);
  tag_hard_clean(working, result.warmup_losses, cfg.hard_clean_fraction);

  std::optional<TeacherState> teacher;
  if (uses_teacher(variant)) {
    teacher = TeacherState{model, cfg.ema_momentum, cfg.sharpen_temperature};
  }

  ScoreStore store;
  const std::size_t n = working.size();
  for (int e = 0; e < cfg.finetune_epochs; ++e) {
    const int epoch = cfg.warmup_epochs + e;
    if (variant == ScoreVariant::PlainCe) {
      const double mean_loss = ce_epoch(model, working, cfg, batch_rng, epoch);
      result.epoch_logs.push_back(make_ce_log(working, epoch, mean_loss));
      continue;
    }
    EpochOutput out = rgc_epoch(model, teacher ? &*teacher : nullptr, working, store,
                                cfg, epoch, variant, batch_rng);
    result.epoch_logs.push_back(out.log);
    result.reliability.push_back(std::move(out.records));
  }

  result.final_losses = per_sample_losses(model, working);
  result.final_scores.assign(n, 0.0);
  result.final_tau_obs.assign(n, 0.0);
  result.final_trust.assign(n, 1.0);
  if (!result.reliability.empty()) {
    const std::vector<ReliabilityRecord>& last = result.reliability.back();
    for (std::size_t i = 0; i < n; ++i) {
      result.final_scores[i] = last[i].s_smoothed;
      result.final_tau_obs[i] = last[i].tau_obs;
      result.final_trust[i] = last[i].trust_w;
    }
  }
  result.noisy_mask.resize(n);
  result.hard_clean_mask.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.noisy_mask[i] = working[i].is_noisy;
    result.hard_clean_mask[i] = working[i].is_hard_clean;
  }
  result.test_accuracy = test.empty() ? 0.0 : clean_accuracy(model, test);
  result.model = std::move(model);
  return result;
}

double clean_accuracy(const ModelParams& model, const std::vector<Sample>& samples) {
  if (samples.empty()) {
    throw InvalidInputError("clean_accuracy: empty sample set");
  }
  std::size_t correct = 0;
  for (const Sample& s : samples) {
    const ForwardRecord fr = forward(model, s.x);
    if (argmax(fr.p) == s.clean_label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace rgc
