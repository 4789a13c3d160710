#include "rgc/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rgc/errors.hpp"

namespace rgc {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& scope,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw InvalidConfigError("config: unknown key '" +
                               (scope.empty() ? key : scope + "." + key) + "'");
    }
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw InvalidConfigError(std::string("config: bad value for '") + key + "'");
    }
  }
}

void parse_dataset(const json& obj, DatasetConfig& cfg) {
  reject_unknown_keys(obj, "dataset",
                      {"classes", "per_class", "test_per_class", "dim", "separation"});
  read_field(obj, "classes", cfg.num_classes);
  read_field(obj, "per_class", cfg.per_class);
  read_field(obj, "test_per_class", cfg.test_per_class);
  read_field(obj, "dim", cfg.dim);
  read_field(obj, "separation", cfg.separation);
}

void parse_noise(const json& obj, NoiseConfig& cfg) {
  reject_unknown_keys(obj, "noise", {"kind", "rate", "class_map"});
  if (obj.contains("kind")) {
    cfg.kind = noise_kind_from_string(obj.at("kind").get<std::string>());
  }
  read_field(obj, "rate", cfg.rate);
  if (obj.contains("class_map")) {
    cfg.class_map.clear();
    for (const auto& [key, value] : obj.at("class_map").items()) {
      cfg.class_map[std::stoi(key)] = value.get<int>();
    }
  }
}

void parse_trainer(const json& obj, TrainerConfig& cfg) {
  reject_unknown_keys(
      obj, "trainer",
      {"warmup_epochs", "finetune_epochs", "learning_rate", "batch_size",
       "hidden_widths", "ema_momentum", "sharpen_temperature", "score_momentum",
       "trust_alpha", "fuse_beta", "reference_weight", "eps", "hard_clean_fraction"});
  read_field(obj, "warmup_epochs", cfg.warmup_epochs);
  read_field(obj, "finetune_epochs", cfg.finetune_epochs);
  read_field(obj, "learning_rate", cfg.learning_rate);
  read_field(obj, "batch_size", cfg.batch_size);
  read_field(obj, "hidden_widths", cfg.hidden_widths);
  read_field(obj, "ema_momentum", cfg.ema_momentum);
  read_field(obj, "sharpen_temperature", cfg.sharpen_temperature);
  read_field(obj, "score_momentum", cfg.score_momentum);
  read_field(obj, "trust_alpha", cfg.trust_alpha);
  read_field(obj, "fuse_beta", cfg.fuse_beta);
  read_field(obj, "reference_weight", cfg.reference_weight);
  read_field(obj, "eps", cfg.eps);
  read_field(obj, "hard_clean_fraction", cfg.hard_clean_fraction);
}

void parse_ablation(const json& obj, AblationConfig& cfg) {
  reject_unknown_keys(obj, "ablation", {"variants", "beta_sweep", "alpha_sweep"});
  read_field(obj, "variants", cfg.variants);
  read_field(obj, "beta_sweep", cfg.beta_sweep);
  read_field(obj, "alpha_sweep", cfg.alpha_sweep);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset.num_classes < 2) {
    throw InvalidConfigError("dataset.classes: must be >= 2");
  }
  if (dataset.dim < 2) throw InvalidConfigError("dataset.dim: must be >= 2");
  if (dataset.dim < dataset.num_classes) {
    throw InvalidConfigError("dataset.dim: must be >= dataset.classes");
  }
  if (dataset.per_class < 1) throw InvalidConfigError("dataset.per_class: must be >= 1");
  if (dataset.test_per_class < 1) {
    throw InvalidConfigError("dataset.test_per_class: must be >= 1");
  }
  if (dataset.separation <= 0.0) {
    throw InvalidConfigError("dataset.separation: must be > 0");
  }
  if (noise.rate < 0.0 || noise.rate >= 1.0) {
    throw InvalidConfigError("noise.rate: must be in [0, 1)");
  }
  trainer.validate();
  for (const std::string& v : ablation.variants) {
    variant_from_string(v);  // throws on unknown names
  }
  for (double b : ablation.beta_sweep) {
    if (b < 0.0 || b > 1.0) {
      throw InvalidConfigError("ablation.beta_sweep: values must be in [0, 1]");
    }
  }
  for (double a : ablation.alpha_sweep) {
    if (a <= 0.0) throw InvalidConfigError("ablation.alpha_sweep: values must be > 0");
  }
  if (seeds.empty()) throw InvalidConfigError("seeds: must list at least one seed");
  if (output_dir.empty()) throw InvalidConfigError("output_dir: must be nonempty");
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  std::string trimmed = text;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  if (trimmed.empty()) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InvalidConfigError(std::string("config: not valid JSON: ") + e.what());
    }
  }
  if (!doc.is_object()) {
    throw InvalidConfigError("config: top level must be a JSON object");
  }
  reject_unknown_keys(doc, "",
                      {"dataset", "noise", "trainer", "ablation", "output_dir", "seeds"});
  ExperimentConfig cfg;
  if (doc.contains("dataset")) parse_dataset(doc.at("dataset"), cfg.dataset);
  if (doc.contains("noise")) parse_noise(doc.at("noise"), cfg.noise);
  if (doc.contains("trainer")) parse_trainer(doc.at("trainer"), cfg.trainer);
  if (doc.contains("ablation")) parse_ablation(doc.at("ablation"), cfg.ablation);
  read_field(doc, "output_dir", cfg.output_dir);
  read_field(doc, "seeds", cfg.seeds);
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidConfigError("config: cannot open '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json class_map = json::object();
  for (const auto& [from, to] : cfg.noise.class_map) {
    class_map[std::to_string(from)] = to;
  }
  json doc = {
      {"dataset",
       {{"classes", cfg.dataset.num_classes},
        {"per_class", cfg.dataset.per_class},
        {"test_per_class", cfg.dataset.test_per_class},
        {"dim", cfg.dataset.dim},
        {"separation", cfg.dataset.separation}}},
      {"noise",
       {{"kind", to_string(cfg.noise.kind)},
        {"rate", cfg.noise.rate},
        {"class_map", class_map}}},
      {"trainer",
       {{"warmup_epochs", cfg.trainer.warmup_epochs},
        {"finetune_epochs", cfg.trainer.finetune_epochs},
        {"learning_rate", cfg.trainer.learning_rate},
        {"batch_size", cfg.trainer.batch_size},
        {"hidden_widths", cfg.trainer.hidden_widths},
        {"ema_momentum", cfg.trainer.ema_momentum},
        {"sharpen_temperature", cfg.trainer.sharpen_temperature},
        {"score_momentum", cfg.trainer.score_momentum},
        {"trust_alpha", cfg.trainer.trust_alpha},
        {"fuse_beta", cfg.trainer.fuse_beta},
        {"reference_weight", cfg.trainer.reference_weight},
        {"eps", cfg.trainer.eps},
        {"hard_clean_fraction", cfg.trainer.hard_clean_fraction}}},
      {"ablation",
       {{"variants", cfg.ablation.variants},
        {"beta_sweep", cfg.ablation.beta_sweep},
        {"alpha_sweep", cfg.ablation.alpha_sweep}}},
      {"output_dir", cfg.output_dir},
      {"seeds", cfg.seeds}};
  return doc.dump(2);
}

}  // namespace rgc
