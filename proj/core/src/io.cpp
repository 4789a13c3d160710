#include "rgc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rgc/errors.hpp"

namespace rgc {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_reliability_csv(const std::string& path,
                           const std::vector<std::vector<ReliabilityRecord>>& epochs) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("write_reliability_csv: cannot open " + path);
  out << "sample_id,epoch,tau_obs,tau_ref,conflict,r_tau,s_raw,s_smoothed,"
         "trust_w,is_noisy,is_hard_clean\n";
  for (const auto& epoch_rows : epochs) {
    for (const ReliabilityRecord& r : epoch_rows) {
      out << r.sample_id << ',' << r.epoch << ',' << format_double(r.tau_obs) << ','
          << format_double(r.tau_ref) << ',' << format_double(r.conflict) << ','
          << format_double(r.r_tau) << ',' << format_double(r.s_raw) << ','
          << format_double(r.s_smoothed) << ',' << format_double(r.trust_w) << ','
          << (r.is_noisy ? 1 : 0) << ',' << (r.is_hard_clean ? 1 : 0) << '\n';
    }
  }
}

std::vector<ReliabilityRecord> read_reliability_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("read_reliability_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidInputError("read_reliability_csv: empty file " + path);
  }
  std::vector<ReliabilityRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    ReliabilityRecord r;
    auto next = [&ss, &field, &path]() -> std::string& {
      if (!std::getline(ss, field, ',')) {
        throw InvalidInputError("read_reliability_csv: short row in " + path);
      }
      return field;
    };
    r.sample_id = std::stoi(next());
    r.epoch = std::stoi(next());
    r.tau_obs = std::stod(next());
    r.tau_ref = std::stod(next());
    r.conflict = std::stod(next());
    r.r_tau = std::stod(next());
    r.s_raw = std::stod(next());
    r.s_smoothed = std::stod(next());
    r.trust_w = std::stod(next());
    r.is_noisy = std::stoi(next()) != 0;
    r.is_hard_clean = std::stoi(next()) != 0;
    rows.push_back(r);
  }
  return rows;
}

void write_run_log(const std::string& path, const std::vector<EpochLog>& logs) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("write_run_log: cannot open " + path);
  for (const EpochLog& log : logs) {
    nlohmann::json line = {{"epoch", log.epoch},
                           {"mean_loss", log.mean_loss},
                           {"mean_trust_clean", log.mean_trust_clean},
                           {"mean_trust_noisy", log.mean_trust_noisy},
                           {"clean_count", log.clean_count},
                           {"noisy_count", log.noisy_count}};
    if (log.teacher_agreement) {
      line["teacher_agreement"] = *log.teacher_agreement;
    } else {
      line["teacher_agreement"] = nullptr;
    }
    out << line.dump() << "\n";
  }
}

void write_threshold_sweep_csv(const std::string& path,
                               const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("write_threshold_sweep_csv: cannot open " + path);
  out << "eta,noisy_recall,hc_fp,hcpr\n";
  for (const SweepRow& r : rows) {
    out << format_double(r.eta) << ',' << format_double(r.noisy_recall) << ','
        << format_double(r.hc_fp) << ',' << format_double(r.hcpr) << '\n';
  }
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("write_summary_csv: cannot open " + path);
  out << "variant,seed,final_accuracy,auroc,hcpr\n";
  char buf[64];
  auto fixed6 = [&buf](double v) -> std::string {
    if (std::isnan(v)) return "nan";
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
  };
  for (const SummaryRow& r : rows) {
    out << r.variant << ',' << r.seed << ',' << fixed6(r.final_accuracy) << ','
        << fixed6(r.auroc) << ',' << fixed6(r.hcpr) << '\n';
  }
}

}  // namespace rgc
