#pragma once

#include <vector>

#include "rgc/linalg.hpp"

namespace rgc {

/// Detection/preservation numbers at one threshold. Samples with score
/// strictly above the threshold are predicted unreliable. hcpr is
/// exactly 1 - hc_fp.
struct DetectionReport {
  double threshold = 0.0;
  double noisy_recall = 0.0;
  double hc_fp = 0.0;
  double hcpr = 0.0;
};

/// Requires at least one noisy and one hard-clean sample.
DetectionReport detection_at_threshold(const Vec& scores,
                                       const std::vector<bool>& noisy_mask,
                                       const std::vector<bool>& hard_clean_mask,
                                       double eta);

/// Rank-based (Mann-Whitney) AUROC; ties contribute 1/2. Requires both
/// classes present.
double auroc(const Vec& scores, const std::vector<bool>& positive_mask);

/// Area under the precision-recall curve in the step-interpolated
/// (average precision) convention: thresholds sweep the distinct scores
/// in descending order and each recall increment is weighted by the
/// precision at that threshold. Requires at least one positive.
double auprc(const Vec& scores, const std::vector<bool>& positive_mask);

/// Empirical quantile with linear interpolation between order statistics.
double quantile(Vec values, double q);

struct SweepRow {
  double eta = 0.0;
  double noisy_recall = 0.0;
  double hc_fp = 0.0;
  double hcpr = 0.0;
};

/// Detection metrics over the documented grid of 101 score quantiles
/// (q = 0.00, 0.01, ..., 1.00).
std::vector<SweepRow> threshold_sweep(const Vec& scores,
                                      const std::vector<bool>& noisy_mask,
                                      const std::vector<bool>& hard_clean_mask);

/// Matched-difficulty subset: pool the noisy and hard-clean samples,
/// split the pooled losses into ten quantile bins, keep the bins that
/// contain both groups, and inside each kept bin subsample the majority
/// group down to the minority count (lowest ids first) so the two
/// groups have matched loss distributions. On the returned subset the
/// loss itself is non-discriminative up to within-decile ordering.
/// Returns the sorted indices of the retained samples.
std::vector<int> matched_difficulty_indices(const Vec& loss,
                                            const std::vector<bool>& noisy_mask,
                                            const std::vector<bool>& hard_clean_mask);

}  // namespace rgc
