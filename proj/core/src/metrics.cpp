#include "rgc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rgc/errors.hpp"

namespace rgc {

DetectionReport detection_at_threshold(const Vec& scores,
                                       const std::vector<bool>& noisy_mask,
                                       const std::vector<bool>& hard_clean_mask,
                                       double eta) {
  if (scores.size() != noisy_mask.size() || scores.size() != hard_clean_mask.size()) {
    throw InvalidInputError("detection_at_threshold: mask size mismatch");
  }
  std::size_t n_noisy = 0, n_hard = 0, flagged_noisy = 0, flagged_hard = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (noisy_mask[i]) {
      ++n_noisy;
      if (scores[i] > eta) ++flagged_noisy;
    }
    if (hard_clean_mask[i]) {
      ++n_hard;
      if (scores[i] > eta) ++flagged_hard;
    }
  }
  if (n_noisy == 0 || n_hard == 0) {
    throw UndefinedMetricError(
        "detection_at_threshold: need nonempty noisy and hard-clean sets");
  }
  DetectionReport rep;
  rep.threshold = eta;
  rep.noisy_recall = static_cast<double>(flagged_noisy) / static_cast<double>(n_noisy);
  rep.hc_fp = static_cast<double>(flagged_hard) / static_cast<double>(n_hard);
  rep.hcpr = 1.0 - rep.hc_fp;
  return rep;
}

double auroc(const Vec& scores, const std::vector<bool>& positive_mask) {
  if (scores.size() != positive_mask.size()) {
    throw InvalidInputError("auroc: mask size mismatch");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // average rank of the tied block, 1-based
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t t = i; t < j; ++t) {
      if (positive_mask[order[t]]) {
        rank_sum_pos += avg_rank;
        ++n_pos;
      } else {
        ++n_neg;
      }
    }
    i = j;
  }
  if (n_pos == 0 || n_neg == 0) {
    throw UndefinedMetricError("auroc: both classes must be present");
  }
  const double np = static_cast<double>(n_pos);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double auprc(const Vec& scores, const std::vector<bool>& positive_mask) {
  if (scores.size() != positive_mask.size()) {
    throw InvalidInputError("auprc: mask size mismatch");
  }
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (bool b : positive_mask) n_pos += b ? 1 : 0;
  if (n_pos == 0) {
    throw UndefinedMetricError("auprc: no positives present");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    for (std::size_t t = i; t < j; ++t) {
      if (positive_mask[order[t]]) ++tp; else ++fp;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

double quantile(Vec values, double q) {
  if (values.empty()) {
    throw InvalidInputError("quantile: empty input");
  }
  if (q < 0.0 || q > 1.0) {
    throw InvalidInputError("quantile: q must be in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

std::vector<SweepRow> threshold_sweep(const Vec& scores,
                                      const std::vector<bool>& noisy_mask,
                                      const std::vector<bool>& hard_clean_mask) {
  std::vector<SweepRow> rows;
  rows.reserve(101);
  for (int j = 0; j <= 100; ++j) {
    const double eta = quantile(scores, static_cast<double>(j) / 100.0);
    const DetectionReport rep =
        detection_at_threshold(scores, noisy_mask, hard_clean_mask, eta);
    rows.push_back({rep.threshold, rep.noisy_recall, rep.hc_fp, rep.hcpr});
  }
  return rows;
}

std::vector<int> matched_difficulty_indices(const Vec& loss,
                                            const std::vector<bool>& noisy_mask,
                                            const std::vector<bool>& hard_clean_mask) {
  if (loss.size() != noisy_mask.size() || loss.size() != hard_clean_mask.size()) {
    throw InvalidInputError("matched_difficulty_indices: size mismatch");
  }
  std::vector<int> pool;
  Vec pooled_losses;
  for (std::size_t i = 0; i < loss.size(); ++i) {
    if (noisy_mask[i] || hard_clean_mask[i]) {
      pool.push_back(static_cast<int>(i));
      pooled_losses.push_back(loss[i]);
    }
  }
  if (pool.empty()) return {};

  // Decile cut points of the pooled losses.
  Vec cuts(9);
  for (int d = 1; d <= 9; ++d) {
    cuts[d - 1] = quantile(pooled_losses, static_cast<double>(d) / 10.0);
  }
  auto bin_of = [&cuts](double v) {
    int b = 0;
    while (b < 9 && v > cuts[b]) ++b;
    return b;
  };

  std::vector<std::vector<int>> bin_noisy(10), bin_hard(10);
  for (std::size_t t = 0; t < pool.size(); ++t) {
    const int i = pool[t];
    const int b = bin_of(loss[static_cast<std::size_t>(i)]);
    (noisy_mask[static_cast<std::size_t>(i)] ? bin_noisy : bin_hard)[b].push_back(i);
  }
  std::vector<int> kept;
  for (int b = 0; b < 10; ++b) {
    const std::size_t take = std::min(bin_noisy[b].size(), bin_hard[b].size());
    if (take == 0) continue;  // decile occupied by one group only
    for (std::size_t t = 0; t < take; ++t) kept.push_back(bin_noisy[b][t]);
    for (std::size_t t = 0; t < take; ++t) kept.push_back(bin_hard[b][t]);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace rgc
