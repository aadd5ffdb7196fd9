#include "rlgan/imitation/demos.hpp"

#include <cmath>

#include "rlgan/agent/returns.hpp"
#include "rlgan/errors.hpp"

namespace rlgan::imitation {

using namespace numerics;

void GateState::validate() const {
  if (!(beta1 > 0 && beta1 <= 1)) throw ConfigError("beta1 must be in (0, 1]");
  if (!(beta2 > 0 && beta2 <= 1)) throw ConfigError("beta2 must be in (0, 1]");
  if (op_interval == 0) throw ConfigError("op_interval must be positive");
}

bool admits(const GateState& gate, double score) { return score > gate.beta1 * gate.reference; }

bool offpolicy_due(const GateState& gate, std::uint64_t update_index, double running_mean) {
  if (gate.reference <= 0) return false;
  return update_index % gate.op_interval == 0 && running_mean < gate.beta2 * gate.reference;
}

void Trajectory::validate() const {
  if (actions.empty()) throw ContractViolation("empty trajectory");
  if (rewards.size() != actions.size() || observations.size() != actions.size() * shape_size(observation_shape))
    throw ContractViolation("trajectory fields disagree in length");
}

std::vector<double> compute_returns(std::span<const double> rewards, double gamma) {
  return agent::discounted_returns(rewards, gamma);
}

Tensor DemoBuffer::observation_batch(std::span<const std::size_t> index) const {
  Shape shape{index.size()};
  shape.insert(shape.end(), observation_shape.begin(), observation_shape.end());
  Tensor out(shape);
  const std::size_t m = observation_size();
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= size()) throw ContractViolation("demo index out of range");
    const std::uint8_t* src = observations.data() + index[k] * m;
    float* dst = out.raw() + k * m;
    for (std::size_t i = 0; i < m; ++i) dst[i] = src[i] / 255.0f;
  }
  return out;
}

void DemoBuffer::validate() const {
  const std::size_t n = size();
  if (returns.size() != n || source_scores.size() != n || observations.size() != n * observation_size())
    throw ContractViolation("demo buffer fields disagree in length");
  for (int a : actions)
    if (a < 0 || a >= envs::kActionCount) throw ContractViolation("demo action out of range");
}

std::size_t add_if_admitted(DemoBuffer& buffer, const Trajectory& trajectory, const GateState& gate, double gamma) {
  trajectory.validate();
  if (!admits(gate, trajectory.score)) return 0;
  if (buffer.empty() && buffer.observation_shape.empty()) buffer.observation_shape = trajectory.observation_shape;
  if (buffer.observation_shape != trajectory.observation_shape)
    throw ContractViolation("trajectory observation shape differs from the demo buffer");
  const auto returns = compute_returns(trajectory.rewards, gamma);
  buffer.observations.insert(buffer.observations.end(), trajectory.observations.begin(),
                             trajectory.observations.end());
  buffer.actions.insert(buffer.actions.end(), trajectory.actions.begin(), trajectory.actions.end());
  for (double r : returns) buffer.returns.push_back(static_cast<float>(r));
  buffer.source_scores.insert(buffer.source_scores.end(), trajectory.size(), trajectory.score);
  return trajectory.size();
}

Trajectory play_trajectory(const ArchSpec& arch, const NetworkParams& params, const transfer::Translator& translator,
                           const envs::EnvConfig& env, std::uint64_t seed, const envs::PreprocessConfig& preprocess) {
  const auto transform = transfer::make_transform(translator);
  envs::Env e(env);
  Rng rng(derive_seed(seed, 1));
  envs::FrameStack raw(preprocess), seen(preprocess);

  std::vector<envs::Frame> frames{e.reset(derive_seed(seed, 0))};
  std::vector<const envs::GameState*> states{&e.state()};
  raw.reset(frames[0]);
  if (transform) transform(frames, states);
  seen.reset(frames[0]);

  Trajectory t;
  t.observation_shape = preprocess.observation_shape();
  const std::size_t m = shape_size(t.observation_shape);
  std::vector<float> plane(m);
  while (true) {
    raw.write(plane.data());
    for (float v : plane) t.observations.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0f)));
    const auto step = agent::act(arch, params, seen.observation(), agent::ActMode::stochastic, rng);
    const auto& tr = e.step(step.action);
    t.actions.push_back(step.action);
    t.rewards.push_back(tr.reward);
    t.score += tr.reward;
    t.frames += static_cast<std::uint64_t>(tr.ticks);
    if (tr.terminal) break;
    frames = {tr.frame};
    raw.push(frames[0]);
    if (transform) transform(frames, states);
    seen.push(frames[0]);
  }
  return t;
}

double measure_reference_score(const ArchSpec& arch, const NetworkParams& params,
                               const transfer::Translator& translator, const envs::EnvConfig& env,
                               std::uint64_t seed, const envs::PreprocessConfig& preprocess) {
  agent::EvalOptions o;
  o.episodes = 1;
  o.mode = agent::ActMode::deterministic;
  o.seed = seed;
  o.preprocess = preprocess;
  return transfer::eval_with_translation(arch, params, translator, env, o).mean;
}

CollectionResult collect_demonstrations(const ArchSpec& arch, const NetworkParams& params,
                                        const transfer::Translator& translator, const envs::EnvConfig& env,
                                        const GateState& gate, const CollectOptions& options) {
  gate.validate();
  if (options.trajectories == 0) throw ConfigError("collect_demonstrations needs at least one trajectory");
  CollectionResult r;
  r.buffer.observation_shape = options.preprocess.observation_shape();
  r.buffer.reference = gate.reference;
  for (std::size_t k = 0; k < options.trajectories; ++k) {
    const auto t = play_trajectory(arch, params, translator, env, derive_seed(options.seed, k), options.preprocess);
    r.scores.push_back(t.score);
    r.frames += t.frames;
    if (add_if_admitted(r.buffer, t, gate, options.gamma) > 0) ++r.kept;
  }
  r.empty_warning = r.buffer.empty();
  return r;
}

}  // namespace rlgan::imitation
