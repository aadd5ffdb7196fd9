#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rlgan/agent/policy.hpp"
#include "rlgan/envs/env.hpp"
#include "rlgan/envs/preprocess.hpp"

namespace rlgan::agent {

struct EvalReport {
  std::string checkpoint;
  std::size_t episodes = 0;
  std::vector<double> scores;
  double mean = 0;
  std::uint64_t frames = 0;  // sum of episode lengths in game ticks
};

// Rewrites raw frames in place before preprocessing (the translation hook).
// `states` holds the matching underlying game states.
using FrameTransform =
    std::function<void(std::vector<envs::Frame>& frames, const std::vector<const envs::GameState*>& states)>;

struct EvalOptions {
  std::size_t episodes = 30;
  ActMode mode = ActMode::deterministic;
  std::uint64_t seed = 0;
  envs::PreprocessConfig preprocess{};
  FrameTransform transform{};  // empty = identity
};

// Plays `episodes` episodes in lockstep, each on its own environment seeded
// from (seed, episode index), and scores them with the true env rewards.
EvalReport evaluate(const numerics::ArchSpec& arch, const NetworkParams& params, const envs::EnvConfig& env,
                    const EvalOptions& options);

double mean_of(const std::vector<double>& xs);

}  // namespace rlgan::agent
