#pragma once

#include <cstdint>
#include <vector>

#include "rlgan/numerics/network.hpp"

namespace rlgan::agent {

using numerics::NetworkParams;
using numerics::Tensor;

// conv1..conv3 -> fc -> {pi, v}. The first three conv layers and the output
// layers are what the fine-tuning settings operate on.
inline constexpr const char* kConvLayers[] = {"conv1", "conv2", "conv3"};
inline constexpr const char* kOutputLayers[] = {"pi", "v"};

numerics::ArchSpec policy_arch(const numerics::Shape& observation_shape, std::size_t actions = 3);

// Orthogonal init: gain sqrt(2) in the trunk, 0.01 on the policy logits and 1
// on the value output. A non-orthogonal scheme is applied uniformly.
NetworkParams init_policy(const numerics::ArchSpec& arch, std::uint64_t seed,
                          const numerics::InitScheme& scheme = numerics::InitScheme::orthogonal());

struct PolicyOutput {
  std::vector<float> probs;
  float value = 0;
};

enum class ActMode { deterministic, stochastic };

// Batched no-grad forward over observations (N, C, H, W).
std::vector<PolicyOutput> policy_forward(const numerics::ArchSpec& arch, const NetworkParams& params,
                                         const Tensor& observations);

// Deterministic: argmax, ties to the lowest index. Stochastic: sample using a
// uniform draw u in [0, 1). Non-finite probabilities raise NumericalError.
int select_action(const PolicyOutput& out, ActMode mode, double u);

struct ActResult {
  int action = 0;
  PolicyOutput output;
};

ActResult act(const numerics::ArchSpec& arch, const NetworkParams& params, const Tensor& observation,
              ActMode mode, numerics::Rng& rng);

double entropy(const std::vector<float>& probs);

}  // namespace rlgan::agent
