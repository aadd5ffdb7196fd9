#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rlgan/agent/trainer.hpp"
#include "rlgan/imitation/il.hpp"
#include "rlgan/translate/gan.hpp"

namespace rlgan::cli {

// Everything a subcommand may need. Keys in config files are the row names
// of the hyperparameter tables ("discount rate", "SGD momentum", ...) plus a
// few run-level keys; see schema_keys().
struct RunConfig {
  envs::EnvConfig env = envs::EnvConfig::breakout();
  std::uint64_t seed = 1;

  agent::A2CConfig a2c{};
  std::size_t eval_episodes = 30;

  translate::TranslatorConfig translator{};
  translate::GanTrainConfig gan{};
  std::uint64_t eval_every = 1000;
  std::size_t selection_episodes = 10;
  std::size_t frames_per_domain = 5000;

  imitation::GateState gate{};
  std::size_t trajectories = 5;
  std::uint64_t supervised_iterations = 500;
  std::size_t il_batch = 4;
  numerics::OptimizerConfig il_optimizer = imitation::il_optimizer();
};

std::vector<std::string> schema_keys();

// One "key = value" assignment; unknown keys and malformed values raise
// ConfigError.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// Flat text: "key = value" lines, '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

// File first, then overrides of the form "key=value" in order.
RunConfig load_run_config(const std::filesystem::path* file, const std::vector<std::string>& overrides);

}  // namespace rlgan::cli
