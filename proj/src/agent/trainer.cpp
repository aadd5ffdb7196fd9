#include "rlgan/agent/trainer.hpp"

#include <cmath>

#include "rlgan/errors.hpp"

namespace rlgan::agent {

using namespace numerics;

void A2CConfig::validate() const {
  if (workers == 0 || n_steps == 0) throw ConfigError("workers and step-returns must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("discount rate must lie in (0, 1]");
  if (log_every == 0) throw ConfigError("log interval must be positive");
}

A2CTrainer::A2CTrainer(ArchSpec arch, NetworkParams params, envs::EnvConfig env, A2CConfig config)
    : arch_(std::move(arch)), params_(std::move(params)), env_(env), config_(std::move(config)) {
  config_.validate();
  env_.validate();
  if (config_.reward_window == 0) config_.reward_window = config_.workers;
  if (arch_.input != config_.preprocess.observation_shape())
    throw ConfigError("policy input " + shape_string(arch_.input) + " does not match observation shape " +
                      shape_string(config_.preprocess.observation_shape()));
  optimizer_ = make_optimizer(config_.optimizer, params_);
  for (std::size_t w = 0; w < config_.workers; ++w) {
    workers_.push_back(Worker{std::make_unique<envs::Env>(env_), envs::FrameStack(config_.preprocess),
                              Rng(derive_seed(config_.seed, 0xA000 + w)), 0});
    reset_worker(w);
  }
  start_ = std::chrono::steady_clock::now();
}

void A2CTrainer::reset_worker(std::size_t w) {
  auto& wk = workers_[w];
  const auto seed = derive_seed(config_.seed, (std::uint64_t(w + 1) << 32) | wk.episode++);
  wk.stack.reset(wk.env->reset(seed));
}

double A2CTrainer::running_mean() const {
  if (recent_.empty()) return 0.0;
  double s = 0;
  for (double x : recent_) s += x;
  return s / double(recent_.size());
}

double A2CTrainer::running_std() const {
  if (recent_.empty()) return 0.0;
  const double m = running_mean();
  double s = 0;
  for (double x : recent_) s += (x - m) * (x - m);
  return std::sqrt(s / double(recent_.size()));
}

bool A2CTrainer::window_full() const { return recent_.size() >= config_.reward_window; }

bool A2CTrainer::finished() const { return stop_ || frames_ >= config_.max_frames; }

void A2CTrainer::record_metrics() {
  MetricsRecord m;
  m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  m.frames = frames_;
  m.updates = updates_;
  m.mean_reward = running_mean();
  m.std_reward = running_std();
  m.episodes = episodes_;
  metrics_.push_back(m);
  if (sink_) sink_(m);
}

bool A2CTrainer::step() {
  if (finished()) return false;
  const std::size_t W = config_.workers, n = config_.n_steps;
  const Shape obs_shape = config_.preprocess.observation_shape();
  const std::size_t obs_size = shape_size(obs_shape);

  RolloutBatch batch;
  batch.workers = W;
  batch.steps = n;
  Shape all{W * n};
  all.insert(all.end(), obs_shape.begin(), obs_shape.end());
  batch.observations = Tensor(all);
  batch.actions.assign(W * n, 0);
  batch.rewards.assign(W * n, 0.0f);
  batch.terminals.assign(W * n, 0);
  batch.bootstrap.assign(W, 0.0f);

  Shape acting{W};
  acting.insert(acting.end(), obs_shape.begin(), obs_shape.end());
  Tensor obs(acting);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t w = 0; w < W; ++w) {
      float* dst = batch.observations.raw() + (w * n + t) * obs_size;
      workers_[w].stack.write(dst);
      std::copy(dst, dst + obs_size, obs.raw() + w * obs_size);
    }
    const auto out = policy_forward(arch_, params_, obs);
    for (std::size_t w = 0; w < W; ++w) {
      auto& wk = workers_[w];
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(wk.rng);
      const int a = select_action(out[w], ActMode::stochastic, u);
      const auto& tr = wk.env->step(a);
      const std::size_t i = w * n + t;
      batch.actions[i] = a;
      batch.rewards[i] = static_cast<float>(tr.reward);
      batch.terminals[i] = tr.terminal;
      frames_ += static_cast<std::uint64_t>(tr.ticks);
      if (tr.terminal) {
        recent_.push_back(wk.env->episode_score());
        while (recent_.size() > config_.reward_window) recent_.pop_front();
        ++episodes_;
        reset_worker(w);
      } else {
        wk.stack.push(tr.frame);
      }
    }
  }
  for (std::size_t w = 0; w < W; ++w) workers_[w].stack.write(obs.raw() + w * obs_size);
  const auto tail = policy_forward(arch_, params_, obs);
  for (std::size_t w = 0; w < W; ++w) batch.bootstrap[w] = tail[w].value;

  const auto targets = nstep_returns(batch, config_.gamma);
  last_ = a2c_update(arch_, params_, batch, targets, optimizer_, config_.loss);
  ++updates_;

  if (hook_) hook_(*this);
  if (config_.stop_at_mean_reward && !frames_at_target_ && window_full() &&
      running_mean() >= *config_.stop_at_mean_reward) {
    frames_at_target_ = frames_;
    stop_ = true;
  }
  if (updates_ % config_.log_every == 0 || finished()) record_metrics();
  return !finished();
}

void A2CTrainer::run() {
  while (step()) {
  }
}

}  // namespace rlgan::agent
