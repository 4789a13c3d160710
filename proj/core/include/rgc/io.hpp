#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rgc/metrics.hpp"
#include "rgc/reliability.hpp"
#include "rgc/trainer.hpp"

namespace rgc {

/// One aggregated line of the suite summary table.
struct SummaryRow {
  std::string variant;
  std::string seed;  // a seed number, or "mean" for aggregate rows
  double final_accuracy = 0.0;
  double auroc = 0.0;  // NaN when undefined (e.g. no noise)
  double hcpr = 0.0;   // NaN when undefined
};

/// Reliability dump: one row per sample per epoch, columns exactly
/// sample_id, epoch, tau_obs, tau_ref, conflict, r_tau, s_raw,
/// s_smoothed, trust_w, is_noisy, is_hard_clean.
void write_reliability_csv(const std::string& path,
                           const std::vector<std::vector<ReliabilityRecord>>& epochs);
std::vector<ReliabilityRecord> read_reliability_csv(const std::string& path);

/// Run log: one JSON object per line, one line per epoch.
void write_run_log(const std::string& path, const std::vector<EpochLog>& logs);

void write_threshold_sweep_csv(const std::string& path,
                               const std::vector<SweepRow>& rows);

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

/// Full-precision decimal rendering that round-trips doubles.
std::string format_double(double v);

}  // namespace rgc
