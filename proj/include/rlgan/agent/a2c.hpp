#pragma once

#include "rlgan/agent/policy.hpp"
#include "rlgan/agent/returns.hpp"
#include "rlgan/numerics/optimizer.hpp"

namespace rlgan::agent {

struct A2CLossConfig {
  double entropy_weight = 0.01;
  double value_weight = 0.5;
  double max_grad_norm = 0.5;  // <= 0 disables clipping
};

struct A2CLosses {
  double policy = 0;
  double value = 0;  // mean (V_t^n - V(s_t))^2
  double entropy = 0;
  double total = 0;
  double grad_norm = 0;  // before clipping
};

// Loss and gradients without touching params. Targets come from
// nstep_returns; the advantage is a constant in the policy term.
A2CLosses a2c_loss(const numerics::ArchSpec& arch, const NetworkParams& params, const RolloutBatch& batch,
                   const std::vector<float>& targets, const A2CLossConfig& config, numerics::Gradients* grads);

A2CLosses a2c_update(const numerics::ArchSpec& arch, NetworkParams& params, const RolloutBatch& batch,
                     const std::vector<float>& targets, numerics::OptimizerState& optimizer,
                     const A2CLossConfig& config);

}  // namespace rlgan::agent
