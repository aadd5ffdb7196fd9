#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>

#include "rlgan/envs/breakout.hpp"
#include "rlgan/envs/frame.hpp"
#include "rlgan/envs/road.hpp"

namespace rlgan::envs {

enum class GameKind { breakout, road };

inline constexpr int kActionCount = 3;  // noop, left, right

// What a frame looks like. For BreakoutLite only `variant` matters; for
// RoadLite only `level`.
struct VariantSkin {
  GameKind game = GameKind::breakout;
  BreakoutVariant variant = BreakoutVariant::source;
  int level = 1;

  static VariantSkin breakout(BreakoutVariant v) { return {GameKind::breakout, v, 1}; }
  static VariantSkin road(int level) { return {GameKind::road, BreakoutVariant::source, level}; }
  bool operator==(const VariantSkin&) const = default;
};

struct EnvConfig {
  GameKind game = GameKind::breakout;
  BreakoutVariant variant = BreakoutVariant::source;
  int level = 1;          // RoadLite dynamics level
  int render_level = 0;   // RoadLite look; 0 = same as `level`
  std::uint64_t max_steps = 10000;  // game ticks per episode
  int frame_skip = 4;               // ticks per agent step, action repeated

  static EnvConfig breakout(BreakoutVariant v = BreakoutVariant::source) {
    return {GameKind::breakout, v, 1, 0, 10000, 4};
  }
  static EnvConfig road(int level, int render_level = 0) {
    return {GameKind::road, BreakoutVariant::source, level, render_level, 10000, 4};
  }

  VariantSkin skin() const;
  // Same dynamics, rendered with another skin.
  EnvConfig with_skin(const VariantSkin& skin) const;
  void validate() const;
};

using GameState = std::variant<BreakoutState, RoadState>;

struct Transition {
  GameState state;
  Frame frame;  // after the last tick
  double reward = 0;  // summed over the ticks
  bool terminal = false;
  int ticks = 0;  // game frames elapsed, at most frame_skip
};

BreakoutVariant parse_variant(const std::string& text);
std::string to_string(BreakoutVariant v);
GameKind parse_game(const std::string& text);
std::string to_string(GameKind g);
std::string describe(const EnvConfig& config);

std::pair<GameState, Frame> reset(const EnvConfig& config, std::uint64_t seed);
Transition step(const EnvConfig& config, const GameState& state, int action);
Frame render_variant(const GameState& state, const VariantSkin& skin);
// Ground-truth translation: re-render the underlying state in the target skin.
Frame oracle_translate(const GameState& state, const VariantSkin& from, const VariantSkin& to);

// Mean score of a uniformly random policy over `episodes` episodes (B_rand).
double random_policy_score(const EnvConfig& config, std::size_t episodes, std::uint64_t seed);

// Stateful wrapper. The moving-square clock (global step) keeps running across
// resets of the same instance.
class Env {
 public:
  explicit Env(EnvConfig config);

  Frame reset(std::uint64_t seed);
  Transition& step(int action);

  const GameState& state() const noexcept { return state_; }
  const EnvConfig& config() const noexcept { return config_; }
  VariantSkin skin() const { return config_.skin(); }
  double episode_score() const;
  std::uint64_t episode_steps() const;

 private:
  EnvConfig config_;
  GameState state_;
  Transition last_;
  std::uint64_t global_step_ = 0;
  bool needs_reset_ = true;
};

}  // namespace rlgan::envs
