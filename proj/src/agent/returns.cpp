#include "rlgan/agent/returns.hpp"

#include <cmath>
#include <string>

#include "rlgan/errors.hpp"

namespace rlgan::agent {

void RolloutBatch::validate() const {
  const std::size_t n = size();
  if (actions.size() != n || rewards.size() != n || terminals.size() != n || bootstrap.size() != workers)
    throw ShapeError("rollout batch is not rectangular (" + std::to_string(workers) + " x " +
                     std::to_string(steps) + ")");
  if (!observations.empty() && observations.dim(0) != n)
    throw ShapeError("rollout observations do not match workers x steps");
  for (float r : rewards)
    if (!std::isfinite(r)) throw NumericalError("rewards", "non-finite reward in rollout");
}

std::vector<float> nstep_returns(const RolloutBatch& batch, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("discount must lie in (0, 1]");
  batch.validate();
  std::vector<float> out(batch.size());
  for (std::size_t w = 0; w < batch.workers; ++w) {
    double acc = batch.bootstrap[w];
    for (std::size_t t = batch.steps; t-- > 0;) {
      const std::size_t i = w * batch.steps + t;
      if (batch.terminals[i]) acc = 0.0;
      acc = batch.rewards[i] + gamma * acc;
      out[i] = static_cast<float>(acc);
    }
  }
  return out;
}

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("discount must lie in (0, 1]");
  std::vector<double> out(rewards.size());
  double acc = 0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    acc = rewards[t] + gamma * acc;
    out[t] = acc;
  }
  return out;
}

}  // namespace rlgan::agent
