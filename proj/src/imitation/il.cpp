#include "rlgan/imitation/il.hpp"

#include <cmath>

#include "rlgan/errors.hpp"

namespace rlgan::imitation {

using namespace numerics;

ILLosses il_loss(const ArchSpec& arch, const NetworkParams& params, const Tensor& observations,
                 std::span<const int> actions, std::span<const float> returns, Gradients* grads) {
  const std::size_t n = actions.size();
  if (n == 0 || returns.size() != n || observations.rank() == 0 || observations.dim(0) != n)
    throw ShapeError("il_loss: observations, actions and returns disagree");
  const std::size_t k = envs::kActionCount;

  Graph<float> g(grads != nullptr);
  auto out = forward(g, params, arch, g.constant(observations));
  auto value = g.reshape(out.heads.at(1), {n});
  auto p = g.clamp(g.softmax(out.heads.at(0)), float(kProbabilityClamp), float(1.0 - kProbabilityClamp));

  Tensor onehot({n, k}), offhot({n, k}, 1.0f);
  for (std::size_t i = 0; i < n; ++i) {
    if (actions[i] < 0 || std::size_t(actions[i]) >= k) throw ContractViolation("demo action out of range");
    onehot[i * k + actions[i]] = 1.0f;
    offhot[i * k + actions[i]] = 0.0f;
  }
  auto likelihood = g.add(g.mul(g.constant(onehot), g.log(p)),
                          g.mul(g.constant(offhot), g.log(g.add_scalar(g.scale(p, -1.0f), 1.0f))));
  auto policy = g.scale(g.sum(likelihood), -1.0f / float(n * k));
  auto value_loss = g.mean(g.square(g.sub(g.constant(Tensor({n}, std::vector<float>(returns.begin(), returns.end()))),
                                          value)));
  auto total = g.add(policy, g.scale(value_loss, 0.5f));

  ILLosses l;
  l.policy = g.value(policy).item();
  l.value = g.value(value_loss).item();
  l.total = g.value(total).item();
  if (!std::isfinite(l.total)) throw NumericalError("loss", "non-finite imitation loss");
  if (grads) {
    g.backward(total);
    *grads = g.param_grads(params);
    l.grad_norm = grad_norm(*grads);
  }
  return l;
}

ILLosses il_update(const ArchSpec& arch, NetworkParams& params, const DemoBuffer& buffer,
                   std::span<const std::size_t> index, OptimizerState& optimizer, double max_grad_norm) {
  std::vector<int> actions;
  std::vector<float> returns;
  for (auto i : index) {
    actions.push_back(buffer.actions.at(i));
    returns.push_back(buffer.returns.at(i));
  }
  Gradients grads;
  const auto l = il_loss(arch, params, buffer.observation_batch(index), actions, returns, &grads);
  if (max_grad_norm > 0) clip_grad_norm(grads, max_grad_norm);
  optimizer_step(params, grads, optimizer);
  return l;
}

std::vector<std::size_t> sample_batch(const DemoBuffer& buffer, std::size_t batch, Rng& rng) {
  if (buffer.empty()) throw ContractViolation("cannot sample from an empty demo buffer");
  std::uniform_int_distribution<std::size_t> pick(0, buffer.size() - 1);
  std::vector<std::size_t> index(batch);
  for (auto& i : index) i = pick(rng);
  return index;
}

NetworkParams pretrain(const ArchSpec& arch, NetworkParams params, const DemoBuffer& buffer,
                       const PretrainConfig& config) {
  if (buffer.empty()) throw ContractViolation("pretraining needs a nonempty demo buffer");
  if (config.batch == 0) throw ConfigError("pretraining batch must be positive");
  buffer.validate();
  auto opt = make_optimizer(config.optimizer, params);
  Rng rng(derive_seed(config.seed, 0x11));
  for (std::uint64_t it = 0; it < config.iterations; ++it)
    il_update(arch, params, buffer, sample_batch(buffer, config.batch, rng), opt, config.max_grad_norm);
  return params;
}

ILRun train_il(const ArchSpec& arch, NetworkParams params, const envs::EnvConfig& env, const DemoBuffer& buffer,
               const GateState& gate, const ILConfig& config, const agent::A2CTrainer::MetricsSink& sink) {
  gate.validate();
  if (buffer.empty()) throw ContractViolation("train_il needs a nonempty demo buffer");
  if (config.batch == 0) throw ConfigError("imitation batch must be positive");
  buffer.validate();

  agent::A2CTrainer trainer(arch, std::move(params), env, config.a2c);
  auto opt = make_optimizer(config.optimizer, trainer.params());
  Rng rng(derive_seed(config.a2c.seed, 0x12));
  ILRun run;
  trainer.set_post_update_hook([&](agent::A2CTrainer& t) {
    const std::uint64_t k = t.updates();
    if (k % gate.op_interval != 0) return;
    GateDecision d{k, t.running_mean(), offpolicy_due(gate, k, t.running_mean())};
    if (d.performed) {
      il_update(arch, t.params(), buffer, sample_batch(buffer, config.batch, rng), opt,
                config.a2c.loss.max_grad_norm);
      ++run.offpolicy_updates;
    }
    run.decisions.push_back(d);
  });
  if (sink) trainer.set_metrics_sink(sink);
  trainer.run();
  run.params = trainer.params();
  run.metrics = trainer.metrics();
  run.frames = trainer.frames();
  run.frames_at_target = trainer.frames_at_target();
  return run;
}

}  // namespace rlgan::imitation
