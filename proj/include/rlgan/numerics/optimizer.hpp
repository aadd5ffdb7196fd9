#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "rlgan/numerics/params.hpp"

namespace rlgan::numerics {

enum class OptimizerKind { rmsprop, sgd_momentum, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::rmsprop;
  double learning_rate = 7e-4;
  // rmsprop: squared-gradient decay; sgd_momentum: momentum; adam: beta1.
  double decay = 0.99;
  double beta2 = 0.999;  // adam only
  double epsilon = 1e-5;

  static OptimizerConfig rmsprop(double lr = 7e-4, double decay = 0.99, double eps = 1e-5) {
    return {OptimizerKind::rmsprop, lr, decay, 0.999, eps};
  }
  static OptimizerConfig sgd_momentum(double lr = 7e-4, double momentum = 0.9) {
    return {OptimizerKind::sgd_momentum, lr, momentum, 0.999, 0.0};
  }
  static OptimizerConfig adam(double lr = 1e-4, double beta1 = 0.9, double beta2 = 0.999,
                              double eps = 1e-8) {
    return {OptimizerKind::adam, lr, beta1, beta2, eps};
  }
};

// Per-tensor accumulators keyed by parameter name.
//   rmsprop:      first = running mean of squared gradients
//   sgd_momentum: first = velocity
//   adam:         first = m, second = v
struct OptimizerState {
  OptimizerConfig config;
  std::map<std::string, Tensor> first;
  std::map<std::string, Tensor> second;
  std::uint64_t steps = 0;
};

// Zero accumulators for every non-frozen tensor.
OptimizerState make_optimizer(const OptimizerConfig& config, const NetworkParams& params);

// Applies one update. Grad keys must name non-frozen params (ContractViolation
// otherwise); a grad without accumulator raises StateCorruptionError. Frozen
// tensors are never touched.
void optimizer_step(NetworkParams& params, const Gradients& grads, OptimizerState& state);

// Scales grads in place so their global L2 norm is at most max_norm. Returns
// the norm before clipping.
double clip_grad_norm(Gradients& grads, double max_norm);
double grad_norm(const Gradients& grads);

}  // namespace rlgan::numerics
