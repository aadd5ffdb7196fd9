#include "rlgan/envs/env.hpp"

#include <random>

#include "rlgan/errors.hpp"

namespace rlgan::envs {

BreakoutVariant parse_variant(const std::string& text) {
  if (text == "source") return BreakoutVariant::source;
  if (text == "const-rect") return BreakoutVariant::const_rect;
  if (text == "moving-square") return BreakoutVariant::moving_square;
  if (text == "green-lines") return BreakoutVariant::green_lines;
  if (text == "diagonals") return BreakoutVariant::diagonals;
  throw ConfigError("unknown BreakoutLite variant '" + text + "'");
}

std::string to_string(BreakoutVariant v) {
  switch (v) {
    case BreakoutVariant::source: return "source";
    case BreakoutVariant::const_rect: return "const-rect";
    case BreakoutVariant::moving_square: return "moving-square";
    case BreakoutVariant::green_lines: return "green-lines";
    case BreakoutVariant::diagonals: return "diagonals";
  }
  return "?";
}

GameKind parse_game(const std::string& text) {
  if (text == "breakout") return GameKind::breakout;
  if (text == "road") return GameKind::road;
  throw ConfigError("unknown game '" + text + "' (expected breakout or road)");
}

std::string to_string(GameKind g) { return g == GameKind::breakout ? "breakout" : "road"; }

std::string describe(const EnvConfig& c) {
  if (c.game == GameKind::breakout) return "breakout/" + to_string(c.variant);
  std::string s = "road/level" + std::to_string(c.level);
  if (c.render_level && c.render_level != c.level) s += "@skin" + std::to_string(c.render_level);
  return s;
}

VariantSkin EnvConfig::skin() const {
  if (game == GameKind::breakout) return VariantSkin::breakout(variant);
  return VariantSkin::road(render_level ? render_level : level);
}

EnvConfig EnvConfig::with_skin(const VariantSkin& s) const {
  if (s.game != game) throw ConfigError("skin is for a different game");
  EnvConfig out = *this;
  if (game == GameKind::breakout)
    out.variant = s.variant;
  else
    out.render_level = s.level;
  return out;
}

void EnvConfig::validate() const {
  if (max_steps == 0) throw ConfigError("max_steps must be positive");
  if (frame_skip < 1) throw ConfigError("frame_skip must be at least 1");
  if (game == GameKind::road) {
    road::level_params(level);
    if (render_level) road::level_params(render_level);
  } else if (static_cast<int>(variant) < 0 || static_cast<int>(variant) > 4) {
    throw ConfigError("unknown BreakoutLite variant id");
  }
}

Frame render_variant(const GameState& state, const VariantSkin& skin) {
  if (const auto* b = std::get_if<BreakoutState>(&state)) {
    if (skin.game != GameKind::breakout) throw ContractViolation("RoadLite skin on a BreakoutLite state");
    return breakout::render(*b, skin.variant);
  }
  if (skin.game != GameKind::road) throw ContractViolation("BreakoutLite skin on a RoadLite state");
  return road::render(std::get<RoadState>(state), skin.level);
}

Frame oracle_translate(const GameState& state, const VariantSkin& from, const VariantSkin& to) {
  if (from.game != to.game) throw ContractViolation("oracle translation across games");
  return render_variant(state, to);
}

std::pair<GameState, Frame> reset(const EnvConfig& config, std::uint64_t seed) {
  config.validate();
  GameState state;
  if (config.game == GameKind::breakout)
    state = breakout::initial_state(seed, 0);
  else
    state = road::initial_state(config.level, seed);
  Frame frame = render_variant(state, config.skin());
  return {std::move(state), std::move(frame)};
}

namespace {

double advance(const EnvConfig& config, GameState& state, int action, bool& terminal, int& ticks) {
  if (action < 0 || action >= kActionCount)
    throw ContractViolation("action " + std::to_string(action) + " outside [0, 3)");
  double reward = 0;
  terminal = false;
  for (ticks = 0; ticks < config.frame_skip && !terminal;) {
    ++ticks;
    if (auto* b = std::get_if<BreakoutState>(&state))
      reward += breakout::advance(*b, action, config.max_steps, terminal);
    else
      reward += road::advance(std::get<RoadState>(state), action, config.max_steps, terminal);
  }
  return reward;
}

}  // namespace

Transition step(const EnvConfig& config, const GameState& state, int action) {
  Transition t;
  t.state = state;
  t.reward = advance(config, t.state, action, t.terminal, t.ticks);
  t.frame = render_variant(t.state, config.skin());
  return t;
}

Env::Env(EnvConfig config) : config_(std::move(config)) { config_.validate(); }

Frame Env::reset(std::uint64_t seed) {
  if (config_.game == GameKind::breakout)
    state_ = breakout::initial_state(seed, global_step_);
  else
    state_ = road::initial_state(config_.level, seed);
  needs_reset_ = false;
  return render_variant(state_, config_.skin());
}

Transition& Env::step(int action) {
  if (needs_reset_) throw ContractViolation("step() before reset() or after a terminal step");
  last_.reward = advance(config_, state_, action, last_.terminal, last_.ticks);
  global_step_ += static_cast<std::uint64_t>(last_.ticks);
  last_.frame = render_variant(state_, config_.skin());
  last_.state = state_;
  if (last_.terminal) needs_reset_ = true;
  return last_;
}

double Env::episode_score() const {
  return std::visit([](const auto& s) { return s.score; }, state_);
}

std::uint64_t Env::episode_steps() const {
  return std::visit([](const auto& s) { return s.step; }, state_);
}

double random_policy_score(const EnvConfig& config, std::size_t episodes, std::uint64_t seed) {
  if (episodes == 0) throw ContractViolation("random_policy_score needs at least one episode");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, kActionCount - 1);
  Env env(config);
  double total = 0;
  for (std::size_t e = 0; e < episodes; ++e) {
    env.reset(seed + 1000 + e);
    while (!env.step(pick(rng)).terminal) {
    }
    total += env.episode_score();
  }
  return total / double(episodes);
}

}  // namespace rlgan::envs
