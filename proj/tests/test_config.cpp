#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "rgc/config.hpp"
#include "rgc/errors.hpp"

using namespace rgc;

TEST_CASE("empty config yields the standard defaults") {
  const ExperimentConfig cfg = parse_config_text("");
  CHECK(cfg.trainer.warmup_epochs == 5);
  CHECK(cfg.trainer.finetune_epochs == 30);
  CHECK(cfg.trainer.ema_momentum == 0.999);
  CHECK(cfg.trainer.sharpen_temperature == 0.7);
  CHECK(cfg.trainer.score_momentum == 0.9);
  CHECK(cfg.trainer.trust_alpha == 0.6);
  CHECK(cfg.trainer.fuse_beta == 0.2);
  CHECK(cfg.trainer.hard_clean_fraction == 0.2);
  CHECK(cfg.dataset.num_classes == 4);
  CHECK(cfg.dataset.dim == 8);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1});

  const ExperimentConfig braces = parse_config_text("{}");
  CHECK(braces == cfg);
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"trrainer": {}})"),
                       "config: unknown key 'trrainer'", InvalidConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"trainer": {"fuse_betta": 0.2}})"),
                       "config: unknown key 'trainer.fuse_betta'", InvalidConfigError);
}

TEST_CASE("constraint violations name the field and bound") {
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"trainer": {"fuse_beta": 1.5}})"),
                       "trainer.fuse_beta: must be in [0, 1]", InvalidConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"noise": {"rate": 1.0}})"),
                       "noise.rate: must be in [0, 1)", InvalidConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"dataset": {"dim": 2, "classes": 4}})"),
                  InvalidConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"seeds": []})"), InvalidConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"ablation": {"variants": ["bogus"]}})"),
                  InvalidConfigError);
  CHECK_THROWS_AS(parse_config_text("not json"), InvalidConfigError);
}

TEST_CASE("serialize then parse round-trips to an equal config") {
  ExperimentConfig cfg;
  cfg.dataset.separation = 3.25;
  cfg.noise.kind = NoiseKind::Asymmetric;
  cfg.noise.rate = 0.4;
  cfg.noise.class_map = {{0, 1}, {2, 3}};
  cfg.trainer.fuse_beta = 0.5;
  cfg.trainer.learning_rate = 0.05;
  cfg.ablation.variants = {"rgc", "trace", "ce"};
  cfg.ablation.beta_sweep = {0.0, 0.2, 1.0};
  cfg.seeds = {3, 4, 5};
  cfg.output_dir = "elsewhere";

  const std::string text = serialize_config(cfg);
  const ExperimentConfig reparsed = parse_config_text(text);
  CHECK(reparsed == cfg);
  // And the canonical text itself is a fixed point.
  CHECK(serialize_config(reparsed) == text);
}

TEST_CASE("partial configs override only their keys") {
  const ExperimentConfig cfg = parse_config_text(
      R"({"trainer": {"fuse_beta": 0.8}, "noise": {"kind": "instance_dependent", "rate": 0.3}})");
  CHECK(cfg.trainer.fuse_beta == 0.8);
  CHECK(cfg.trainer.trust_alpha == 0.6);  // untouched default
  CHECK(cfg.noise.kind == NoiseKind::InstanceDependent);
  CHECK(cfg.noise.rate == 0.3);
}
