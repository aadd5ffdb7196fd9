#include "rlgan/agent/a2c.hpp"

#include <cmath>

#include "rlgan/errors.hpp"

namespace rlgan::agent {

using namespace numerics;

A2CLosses a2c_loss(const ArchSpec& arch, const NetworkParams& params, const RolloutBatch& batch,
                   const std::vector<float>& targets, const A2CLossConfig& config, Gradients* grads) {
  batch.validate();
  const std::size_t n = batch.size();
  if (targets.size() != n) throw ShapeError("targets do not match the rollout batch");

  Graph<float> g(grads != nullptr);
  auto out = forward(g, params, arch, g.constant(batch.observations));
  auto logits = out.heads.at(0);
  auto value = g.reshape(out.heads.at(1), {n});

  const Tensor& v = g.value(value);
  Tensor target({n}, targets);
  Tensor advantage({n});
  for (std::size_t i = 0; i < n; ++i) advantage[i] = targets[i] - v[i];

  auto logp = g.log_softmax(logits);
  auto p = g.softmax(logits);
  auto chosen = g.gather_rows(logp, batch.actions);
  auto policy = g.scale(g.mean(g.mul(chosen, g.constant(advantage))), -1.0f);
  auto ent = g.scale(g.mean(g.sum_rows(g.mul(p, logp))), -1.0f);
  auto value_loss = g.mean(g.square(g.sub(g.constant(target), value)));
  auto total = g.add(g.sub(policy, g.scale(ent, static_cast<float>(config.entropy_weight))),
                     g.scale(value_loss, static_cast<float>(config.value_weight)));

  A2CLosses l;
  l.policy = g.value(policy).item();
  l.entropy = g.value(ent).item();
  l.value = g.value(value_loss).item();
  l.total = g.value(total).item();
  if (!std::isfinite(l.total)) {
    for (const auto& e : params)
      if (!e.tensor.all_finite()) throw NumericalError(e.name, "non-finite A2C loss");
    throw NumericalError("loss", "non-finite A2C loss");
  }
  if (grads) {
    g.backward(total);
    *grads = g.param_grads(params);
    l.grad_norm = grad_norm(*grads);
  }
  return l;
}

A2CLosses a2c_update(const ArchSpec& arch, NetworkParams& params, const RolloutBatch& batch,
                     const std::vector<float>& targets, OptimizerState& optimizer, const A2CLossConfig& config) {
  Gradients grads;
  A2CLosses l = a2c_loss(arch, params, batch, targets, config, &grads);
  if (config.max_grad_norm > 0) clip_grad_norm(grads, config.max_grad_norm);
  optimizer_step(params, grads, optimizer);
  return l;
}

}  // namespace rlgan::agent
