#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rgc/dataset.hpp"
#include "rgc/trainer.hpp"

namespace rgc {

struct DatasetConfig {
  int num_classes = 4;
  int per_class = 500;
  int test_per_class = 250;
  int dim = 8;
  double separation = 6.0;

  bool operator==(const DatasetConfig&) const = default;
};

struct NoiseConfig {
  NoiseKind kind = NoiseKind::Symmetric;
  double rate = 0.0;
  std::map<int, int> class_map;

  bool operator==(const NoiseConfig&) const = default;
};

struct AblationConfig {
  std::vector<std::string> variants = {"rgc"};
  std::vector<double> beta_sweep;
  std::vector<double> alpha_sweep;

  bool operator==(const AblationConfig&) const = default;
};

/// Whole-experiment configuration. An empty config file yields the
/// defaults above (the trainer defaults carry the standard
/// hyperparameters: E_w=5, m=0.999, T=0.7, mu=0.9, alpha=0.6, beta=0.2).
struct ExperimentConfig {
  DatasetConfig dataset;
  NoiseConfig noise;
  TrainerConfig trainer;
  AblationConfig ablation;
  std::string output_dir = "runs";
  std::vector<std::uint64_t> seeds = {1};

  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses a JSON config file. Unknown keys are rejected by name;
/// constraint violations name the field and its bound. An empty file
/// parses as {}.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Canonical JSON serialization; parse_config_text(serialize_config(c))
/// compares equal to c.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace rgc
