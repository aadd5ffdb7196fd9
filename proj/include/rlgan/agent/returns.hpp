#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rlgan/numerics/tensor.hpp"

namespace rlgan::agent {

// One synchronous rollout: `workers` environments stepped `steps` times.
// Per-step arrays are worker-major: index = w * steps + t.
struct RolloutBatch {
  std::size_t workers = 0;
  std::size_t steps = 0;
  numerics::Tensor observations;  // (workers * steps, C, H, W)
  std::vector<int> actions;
  std::vector<float> rewards;
  std::vector<std::uint8_t> terminals;  // episode ended after this step
  std::vector<float> bootstrap;         // V(s_{t+n}) per worker

  std::size_t size() const noexcept { return workers * steps; }
  void validate() const;
};

// V_t = r_t + gamma * V_{t+1}, seeded with the worker's bootstrap value; a
// terminal step neither bootstraps nor accumulates across the boundary.
std::vector<float> nstep_returns(const RolloutBatch& batch, double gamma);

// R_t = sum_{k >= t} gamma^(k - t) r_k over one trajectory.
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

}  // namespace rlgan::agent
