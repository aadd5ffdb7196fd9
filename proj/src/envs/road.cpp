#include "rlgan/envs/road.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "rlgan/envs/rng.hpp"
#include "rlgan/errors.hpp"

namespace rlgan::envs::road {

namespace {

constexpr std::array<LevelParams, 4> kLevels{{
    {22, 0.035, 0.25, 0.0, 1.0, 2000},
    {17, 0.045, 0.25, 0.0, 1.0, 2000},
    {12, 0.040, 0.25, 10.0, 240.0, 2000},
    {16, 0.050, 0.25, 16.0, 180.0, 2000},
}};

struct Palette {
  Rgb background, texture, road, edge, stripe;
};

constexpr std::array<Palette, 4> kPalettes{{
    {{34, 139, 34}, {24, 110, 24}, {96, 96, 96}, {255, 255, 255}, {230, 230, 230}},
    {{210, 180, 120}, {186, 150, 96}, {128, 112, 100}, {255, 255, 255}, {240, 240, 200}},
    {{30, 70, 160}, {70, 120, 210}, {78, 78, 90}, {250, 250, 120}, {200, 200, 200}},
    {{100, 70, 40}, {78, 52, 28}, {64, 64, 64}, {255, 200, 200}, {255, 255, 255}},
}};

// Lumas about 33, 211 and 185: the agent sees grayscale, and every road
// surface sits between 64 and 116.
constexpr Rgb kHostile{110, 0, 0};
constexpr Rgb kBonus{255, 230, 0};
constexpr Rgb kPlayer{110, 210, 255};

constexpr std::int64_t kSafeStart = 40;
constexpr std::int64_t kSpawnAhead = 80;
constexpr std::int64_t kMinGap = 8;
constexpr double kCenter = kFrameSize / 2.0;

void spawn(RoadState& s) {
  const auto& p = level_params(s.level);
  const std::int64_t horizon = s.distance + kSpawnAhead;
  while (s.spawned_to < horizon) {
    const std::int64_t pos = s.spawned_to;
    if (pos >= kSafeStart && uniform(s.rng) < p.density) {
      const double span = p.half_width - kCarWidth / 2.0;
      RoadObstacle o;
      o.track_pos = pos;
      o.offset = static_cast<float>((2.0 * uniform(s.rng) - 1.0) * span);
      o.bonus = uniform(s.rng) < p.bonus_fraction;
      s.obstacles.push_back(o);
      s.spawned_to += kMinGap;
    } else {
      ++s.spawned_to;
    }
  }
}

int screen_row(std::int64_t track_pos, std::int64_t distance) {
  return kPlayerRow - static_cast<int>(track_pos - distance);
}

}  // namespace

const LevelParams& level_params(int level) {
  if (level < 1 || level > 4) throw ConfigError("unknown RoadLite level " + std::to_string(level));
  return kLevels[static_cast<std::size_t>(level - 1)];
}

double curve(int level, std::int64_t track_pos) {
  const auto& p = level_params(level);
  if (p.curve_amplitude == 0.0) return 0.0;
  return p.curve_amplitude * std::sin(2.0 * std::numbers::pi * double(track_pos) / p.curve_period);
}

RoadState initial_state(int level, std::uint64_t seed) {
  level_params(level);
  RoadState s;
  s.level = level;
  s.rng = seed ^ 0x2545f4914f6cdd1dULL;
  next_u64(s.rng);
  s.player_x = static_cast<float>(curve(level, 0));
  spawn(s);
  return s;
}

double advance(RoadState& s, int action, std::uint64_t max_steps, bool& terminal) {
  terminal = false;
  const auto& p = level_params(s.level);
  if (action == 1) s.player_x -= kSteer;
  if (action == 2) s.player_x += kSteer;

  ++s.distance;
  double reward = kRowReward;
  spawn(s);
  std::erase_if(s.obstacles, [&](const RoadObstacle& o) { return o.track_pos < s.distance - 20; });

  const double rel = s.player_x - curve(s.level, s.distance);
  bool crashed = std::abs(rel) + kCarWidth / 2.0 > p.half_width;
  for (auto it = s.obstacles.begin(); it != s.obstacles.end() && !crashed;) {
    const bool rows = std::abs(it->track_pos - s.distance) < kCarHeight;
    const double ox = curve(s.level, it->track_pos) + it->offset;
    if (rows && std::abs(ox - s.player_x) < kCarWidth) {
      if (it->bonus) {
        reward += kBonusReward;
        it = s.obstacles.erase(it);
        continue;
      }
      crashed = true;
    }
    ++it;
  }

  ++s.step;
  s.score += reward;
  if (crashed || s.distance >= static_cast<std::int64_t>(p.track_length) || s.step >= max_steps)
    terminal = true;
  return reward;
}

Frame render(const RoadState& s, int skin_level) {
  const auto& skin = level_params(skin_level);
  const auto& own = level_params(s.level);
  const auto& pal = kPalettes[static_cast<std::size_t>(skin_level - 1)];
  const bool curvy = skin.curve_amplitude != 0.0;
  const double ratio = double(skin.half_width) / double(own.half_width);
  auto center_at = [&](std::int64_t track_pos) {
    return kCenter + (curvy ? curve(s.level, track_pos) : 0.0);
  };

  Canvas c;
  c.fill(pal.background);
  for (int r = 0; r < int(kFrameSize); ++r) {
    const std::int64_t pos = s.distance + (kPlayerRow - r);
    // Scrolling background texture, distinct per skin.
    switch (skin_level) {
      case 1:
        for (int x = 0; x < int(kFrameSize); x += 4)
          if (((pos * 7 + x * 3) % 23) == 0) c.rect(x, r, 2, 1, pal.texture);
        break;
      case 2:
        for (int x = 0; x < int(kFrameSize); ++x)
          if (((pos + x) % 10 + 10) % 10 < 2) c.pixel(x, r, pal.texture);
        break;
      case 3:
        if (((pos % 6) + 6) % 6 == 0) c.rect(0, r, kFrameSize, 1, pal.texture);
        break;
      default:
        for (int x = 0; x < int(kFrameSize); ++x)
          if ((((pos / 4) + (x / 4)) % 2 + 2) % 2 == 0) c.pixel(x, r, pal.texture);
        break;
    }
    const double center = center_at(pos);
    const long left = std::lround(center - skin.half_width);
    const long right = std::lround(center + skin.half_width);
    c.rect(left, r, right - left, 1, pal.road);
    c.pixel(left, r, pal.edge);
    c.pixel(right - 1, r, pal.edge);
    if (((pos % 8) + 8) % 8 < 4) c.pixel(std::lround(center) - 1, r, pal.stripe);
  }

  auto draw_car = [&](double x_center, int top, Rgb color) {
    c.rect(std::lround(x_center - kCarWidth / 2.0), top, kCarWidth, kCarHeight, color);
  };
  for (const auto& o : s.obstacles) {
    const int top = screen_row(o.track_pos, s.distance);
    if (top + kCarHeight <= 0 || top >= int(kFrameSize)) continue;
    draw_car(center_at(o.track_pos) + o.offset * ratio, top, o.bonus ? kBonus : kHostile);
  }
  const double rel = s.player_x - curve(s.level, s.distance);
  draw_car(center_at(s.distance) + rel * ratio, kPlayerRow, kPlayer);
  return c.release();
}

}  // namespace rlgan::envs::road
