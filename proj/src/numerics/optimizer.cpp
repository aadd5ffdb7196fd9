#include "rlgan/numerics/optimizer.hpp"

#include <cmath>

#include "rlgan/errors.hpp"

namespace rlgan::numerics {

OptimizerState make_optimizer(const OptimizerConfig& config, const NetworkParams& params) {
  OptimizerState state;
  state.config = config;
  for (const auto& e : params) {
    if (e.frozen) continue;
    state.first.emplace(e.name, Tensor(e.tensor.shape()));
    if (config.kind == OptimizerKind::adam) state.second.emplace(e.name, Tensor(e.tensor.shape()));
  }
  return state;
}

namespace {

Tensor& accumulator(std::map<std::string, Tensor>& table, const std::string& name,
                    const Tensor& param) {
  auto it = table.find(name);
  if (it == table.end()) throw StateCorruptionError("missing optimizer accumulator for '" + name + "'");
  if (it->second.shape() != param.shape())
    throw StateCorruptionError("optimizer accumulator for '" + name + "' has shape " +
                               shape_string(it->second.shape()));
  return it->second;
}

}  // namespace

void optimizer_step(NetworkParams& params, const Gradients& grads, OptimizerState& state) {
  // Validate everything before mutating anything.
  for (const auto& [name, g] : grads) {
    if (!params.contains(name)) throw ContractViolation("gradient for unknown parameter '" + name + "'");
    if (params.frozen(name)) throw ContractViolation("gradient for frozen parameter '" + name + "'");
    const auto& p = params.get(name);
    if (g.shape() != p.shape()) throw ShapeError("gradient shape mismatch for '" + name + "'");
    accumulator(state.first, name, p);
    if (state.config.kind == OptimizerKind::adam) accumulator(state.second, name, p);
  }

  const auto& cfg = state.config;
  ++state.steps;
  const float lr = static_cast<float>(cfg.learning_rate);
  const float decay = static_cast<float>(cfg.decay);
  const float eps = static_cast<float>(cfg.epsilon);
  for (const auto& [name, g] : grads) {
    Tensor& p = params.get(name);
    Tensor& a = state.first.at(name);
    switch (cfg.kind) {
      case OptimizerKind::sgd_momentum:
        for (std::size_t i = 0; i < p.size(); ++i) {
          a[i] = decay * a[i] + g[i];
          p[i] -= lr * a[i];
        }
        break;
      case OptimizerKind::rmsprop:
        for (std::size_t i = 0; i < p.size(); ++i) {
          a[i] = decay * a[i] + (1.0f - decay) * g[i] * g[i];
          p[i] -= lr * g[i] / (std::sqrt(a[i]) + eps);
        }
        break;
      case OptimizerKind::adam: {
        Tensor& v = state.second.at(name);
        const float beta2 = static_cast<float>(cfg.beta2);
        const double t = static_cast<double>(state.steps);
        const float c1 = static_cast<float>(1.0 - std::pow(cfg.decay, t));
        const float c2 = static_cast<float>(1.0 - std::pow(cfg.beta2, t));
        for (std::size_t i = 0; i < p.size(); ++i) {
          a[i] = decay * a[i] + (1.0f - decay) * g[i];
          v[i] = beta2 * v[i] + (1.0f - beta2) * g[i] * g[i];
          p[i] -= lr * (a[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        }
        break;
      }
    }
  }
}

double grad_norm(const Gradients& grads) {
  double total = 0;
  for (const auto& [name, g] : grads)
    for (float v : g.storage()) total += double(v) * double(v);
  return std::sqrt(total);
}

double clip_grad_norm(Gradients& grads, double max_norm) {
  const double norm = grad_norm(grads);
  if (max_norm > 0 && norm > max_norm) {
    const float factor = static_cast<float>(max_norm / (norm + 1e-6));
    for (auto& [name, g] : grads)
      for (float& v : g.storage()) v *= factor;
  }
  return norm;
}

}  // namespace rlgan::numerics
