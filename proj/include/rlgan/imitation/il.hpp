#pragma once

#include <functional>

#include "rlgan/agent/trainer.hpp"
#include "rlgan/imitation/demos.hpp"

namespace rlgan::imitation {

inline constexpr double kProbabilityClamp = 1e-7;

struct ILLosses {
  double policy = 0;  // -(1/|a|) sum_k [a_k ln p_k + (1 - a_k) ln(1 - p_k)], batch mean
  double value = 0;   // (R - V)^2, batch mean
  double total = 0;   // policy + value / 2
  double grad_norm = 0;
};

// Loss and gradients on (observations, demo actions, returns) without
// touching params.
ILLosses il_loss(const numerics::ArchSpec& arch, const numerics::NetworkParams& params,
                 const numerics::Tensor& observations, std::span<const int> actions,
                 std::span<const float> returns, numerics::Gradients* grads);

// Gradients are clipped to max_grad_norm (<= 0 disables), as in A2C: demo
// returns are unclipped and plain SGD on them diverges.
ILLosses il_update(const numerics::ArchSpec& arch, numerics::NetworkParams& params, const DemoBuffer& buffer,
                   std::span<const std::size_t> index, numerics::OptimizerState& optimizer,
                   double max_grad_norm = 0.5);

inline numerics::OptimizerConfig il_optimizer() { return numerics::OptimizerConfig::sgd_momentum(7e-4, 0.9); }

// Uniform batch indices into the buffer.
std::vector<std::size_t> sample_batch(const DemoBuffer& buffer, std::size_t batch, numerics::Rng& rng);

struct PretrainConfig {
  std::uint64_t iterations = 500;
  std::size_t batch = 4;
  numerics::OptimizerConfig optimizer = il_optimizer();
  double max_grad_norm = 0.5;
  std::uint64_t seed = 1;
};

// Supervised training on the buffer, starting from `params`.
numerics::NetworkParams pretrain(const numerics::ArchSpec& arch, numerics::NetworkParams params,
                                 const DemoBuffer& buffer, const PretrainConfig& config);

struct ILConfig {
  agent::A2CConfig a2c{};
  std::size_t batch = 4;
  numerics::OptimizerConfig optimizer = il_optimizer();
};

struct GateDecision {
  std::uint64_t update = 0;
  double running_mean = 0;
  bool performed = false;
};

struct ILRun {
  numerics::NetworkParams params;
  std::vector<agent::MetricsRecord> metrics;
  std::vector<GateDecision> decisions;  // one per op_interval boundary
  std::uint64_t frames = 0;
  std::uint64_t offpolicy_updates = 0;
  std::optional<std::uint64_t> frames_at_target;
};

// A2C from `params` (normally pretrained) with one off-policy il_update after
// update k whenever offpolicy_due(gate, k, R-hat).
ILRun train_il(const numerics::ArchSpec& arch, numerics::NetworkParams params, const envs::EnvConfig& env,
               const DemoBuffer& buffer, const GateState& gate, const ILConfig& config,
               const agent::A2CTrainer::MetricsSink& sink = {});

}  // namespace rlgan::imitation
