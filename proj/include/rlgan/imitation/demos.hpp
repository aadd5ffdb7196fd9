#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rlgan/transfer/evaluate.hpp"

namespace rlgan::imitation {

// beta1 filters demonstrations, beta2 gates off-policy updates against the
// reference score R_T.
struct GateState {
  double beta1 = 0.75;
  double beta2 = 0.6;
  double reference = 0;  // R_T
  std::uint64_t op_interval = 100;

  void validate() const;
};

// Strict: score > beta1 * R_T. With R_T = 0 only positive scores pass.
bool admits(const GateState& gate, double score);
// update_index % op_interval == 0 and R-hat < beta2 * R_T; never when R_T <= 0.
bool offpolicy_due(const GateState& gate, std::uint64_t update_index, double running_mean);

struct Trajectory {
  numerics::Shape observation_shape;  // (stack, H, W)
  std::vector<std::uint8_t> observations;  // raw target observations, pixel * 255
  std::vector<int> actions;
  std::vector<double> rewards;
  double score = 0;
  bool stochastic = true;
  std::uint64_t frames = 0;  // game ticks

  std::size_t size() const noexcept { return actions.size(); }
  void validate() const;
};

// R_t = sum_{k >= t} gamma^{k - t} r_k.
std::vector<double> compute_returns(std::span<const double> rewards, double gamma);

struct DemoBuffer {
  numerics::Shape observation_shape;
  std::vector<std::uint8_t> observations;
  std::vector<int> actions;
  std::vector<float> returns;
  std::vector<double> source_scores;  // score of the trajectory each triple came from
  double reference = 0;  // R_T

  std::size_t size() const noexcept { return actions.size(); }
  bool empty() const noexcept { return actions.empty(); }
  std::size_t observation_size() const { return numerics::shape_size(observation_shape); }
  // (n, stack, H, W) float batch of the given triples.
  numerics::Tensor observation_batch(std::span<const std::size_t> index) const;
  void validate() const;
};

// Appends the trajectory's triples when the gate admits its score; returns
// the number of triples added.
std::size_t add_if_admitted(DemoBuffer& buffer, const Trajectory& trajectory, const GateState& gate, double gamma);

struct CollectOptions {
  std::size_t trajectories = 5;
  double gamma = 0.99;
  std::uint64_t seed = 0;
  envs::PreprocessConfig preprocess{};
};

struct CollectionResult {
  DemoBuffer buffer;
  std::vector<double> scores;  // every trajectory, kept or not
  std::size_t kept = 0;
  std::uint64_t frames = 0;  // game ticks spent collecting
  bool empty_warning = false;  // every trajectory was filtered out
};

// One stochastic episode acting on translated frames, recording the raw ones.
Trajectory play_trajectory(const numerics::ArchSpec& arch, const numerics::NetworkParams& params,
                           const transfer::Translator& translator, const envs::EnvConfig& env,
                           std::uint64_t seed, const envs::PreprocessConfig& preprocess = {});

// R_T: one deterministic episode through the translator.
double measure_reference_score(const numerics::ArchSpec& arch, const numerics::NetworkParams& params,
                               const transfer::Translator& translator, const envs::EnvConfig& env,
                               std::uint64_t seed, const envs::PreprocessConfig& preprocess = {});

CollectionResult collect_demonstrations(const numerics::ArchSpec& arch, const numerics::NetworkParams& params,
                                        const transfer::Translator& translator, const envs::EnvConfig& env,
                                        const GateState& gate, const CollectOptions& options);

}  // namespace rlgan::imitation
