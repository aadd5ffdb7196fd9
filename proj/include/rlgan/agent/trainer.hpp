#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "rlgan/agent/a2c.hpp"
#include "rlgan/envs/env.hpp"
#include "rlgan/envs/preprocess.hpp"

namespace rlgan::agent {

struct MetricsRecord {
  double wall_time_s = 0;
  std::uint64_t frames = 0;
  std::uint64_t updates = 0;
  double mean_reward = 0;
  double std_reward = 0;
  std::uint64_t episodes = 0;
};

struct A2CConfig {
  std::size_t workers = 8;
  std::size_t n_steps = 20;
  double gamma = 0.99;
  A2CLossConfig loss{};
  numerics::OptimizerConfig optimizer = numerics::OptimizerConfig::rmsprop();
  std::uint64_t max_frames = 2'000'000;  // game ticks across all workers
  std::uint64_t log_every = 100;  // updates between metrics records
  std::size_t reward_window = 0;  // completed episodes in the running mean; 0 = workers
  // Stop once the running mean over a full window reaches this score.
  std::optional<double> stop_at_mean_reward;
  std::uint64_t seed = 1;
  envs::PreprocessConfig preprocess{};

  void validate() const;
};

// Synchronous A2C: `workers` environments stepped in lockstep for n_steps,
// then one update at the barrier.
class A2CTrainer {
 public:
  using Hook = std::function<void(A2CTrainer&)>;
  using MetricsSink = std::function<void(const MetricsRecord&)>;

  A2CTrainer(numerics::ArchSpec arch, NetworkParams params, envs::EnvConfig env, A2CConfig config);

  // Runs after every on-policy update, with exclusive access to the params.
  void set_post_update_hook(Hook hook) { hook_ = std::move(hook); }
  void set_metrics_sink(MetricsSink sink) { sink_ = std::move(sink); }

  // One rollout plus update. False once the run is over.
  bool step();
  void run();
  void request_stop() { stop_ = true; }

  const numerics::ArchSpec& arch() const noexcept { return arch_; }
  NetworkParams& params() noexcept { return params_; }
  const NetworkParams& params() const noexcept { return params_; }
  const A2CConfig& config() const noexcept { return config_; }
  std::uint64_t frames() const noexcept { return frames_; }
  std::uint64_t updates() const noexcept { return updates_; }
  std::uint64_t episodes() const noexcept { return episodes_; }
  // Mean of the last `reward_window` completed episodes; 0 before any.
  double running_mean() const;
  double running_std() const;
  bool window_full() const;
  std::optional<std::uint64_t> frames_at_target() const noexcept { return frames_at_target_; }
  const A2CLosses& last_losses() const noexcept { return last_; }
  const std::vector<MetricsRecord>& metrics() const noexcept { return metrics_; }
  bool finished() const;

 private:
  struct Worker {
    std::unique_ptr<envs::Env> env;
    envs::FrameStack stack;
    numerics::Rng rng;
    std::uint64_t episode = 0;
  };

  void reset_worker(std::size_t w);
  void record_metrics();

  numerics::ArchSpec arch_;
  NetworkParams params_;
  envs::EnvConfig env_;
  A2CConfig config_;
  numerics::OptimizerState optimizer_;
  std::vector<Worker> workers_;
  std::deque<double> recent_;
  std::uint64_t frames_ = 0, updates_ = 0, episodes_ = 0;
  std::optional<std::uint64_t> frames_at_target_;
  A2CLosses last_{};
  std::vector<MetricsRecord> metrics_;
  Hook hook_;
  MetricsSink sink_;
  bool stop_ = false;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace rlgan::agent
