#include "rlgan/agent/evaluate.hpp"

#include <memory>

#include "rlgan/errors.hpp"

namespace rlgan::agent {

using namespace numerics;

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

EvalReport evaluate(const ArchSpec& arch, const NetworkParams& params, const envs::EnvConfig& env,
                    const EvalOptions& options) {
  if (options.episodes == 0) throw ContractViolation("evaluation needs at least one episode");
  env.validate();
  const std::size_t n = options.episodes;
  const Shape obs_shape = options.preprocess.observation_shape();
  const std::size_t obs_size = shape_size(obs_shape);

  struct Episode {
    std::unique_ptr<envs::Env> env;
    envs::FrameStack stack;
    Rng rng;
    bool done = false;
  };
  std::vector<Episode> eps;
  eps.reserve(n);
  std::vector<envs::Frame> frames;
  std::vector<const envs::GameState*> states;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    Episode e{std::make_unique<envs::Env>(env), envs::FrameStack(options.preprocess),
              Rng(derive_seed(options.seed, 0x100000 + i))};
    frames.push_back(e.env->reset(derive_seed(options.seed, i)));
    eps.push_back(std::move(e));
    states.push_back(&eps.back().env->state());
    active.push_back(i);
  }

  auto transform = [&](std::vector<envs::Frame>& fs, const std::vector<const envs::GameState*>& ss) {
    if (!options.transform) return;
    options.transform(fs, ss);
    for (const auto& f : fs)
      if (f.rank() != 3 || f.dim(0) != 3)
        throw ContractViolation("translated frame has shape " + shape_string(f.shape()) +
                                ", expected an RGB (3, H, W) frame");
  };
  transform(frames, states);
  for (std::size_t i = 0; i < n; ++i) eps[i].stack.reset(frames[i]);

  EvalReport report;
  report.episodes = n;
  report.scores.assign(n, 0.0);
  while (!active.empty()) {
    Shape batch_shape{active.size()};
    batch_shape.insert(batch_shape.end(), obs_shape.begin(), obs_shape.end());
    Tensor obs(batch_shape);
    for (std::size_t k = 0; k < active.size(); ++k) eps[active[k]].stack.write(obs.raw() + k * obs_size);
    const auto outputs = policy_forward(arch, params, obs);

    frames.clear();
    states.clear();
    std::vector<std::size_t> still;
    for (std::size_t k = 0; k < active.size(); ++k) {
      auto& e = eps[active[k]];
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(e.rng);
      const auto& t = e.env->step(select_action(outputs[k], options.mode, u));
      report.frames += static_cast<std::uint64_t>(t.ticks);
      if (t.terminal) {
        report.scores[active[k]] = e.env->episode_score();
        continue;
      }
      frames.push_back(t.frame);
      states.push_back(&e.env->state());
      still.push_back(active[k]);
    }
    transform(frames, states);
    for (std::size_t k = 0; k < still.size(); ++k) eps[still[k]].stack.push(frames[k]);
    active = std::move(still);
  }
  report.mean = mean_of(report.scores);
  return report;
}

}  // namespace rlgan::agent
