#pragma once

#include <cstdint>
#include <vector>

#include "rlgan/envs/frame.hpp"

namespace rlgan::envs {

namespace road {

inline constexpr int kPlayerRow = 70;  // top row of the player's car
inline constexpr int kCarWidth = 4;
inline constexpr int kCarHeight = 6;
inline constexpr int kSteer = 2;
inline constexpr double kRowReward = 0.1;
inline constexpr double kBonusReward = 10.0;

struct LevelParams {
  int half_width;           // road half-width in pixels
  double density;           // obstacle spawn probability per row
  double bonus_fraction;    // fraction of spawned cars that are bonus cars
  double curve_amplitude;   // pixels; 0 = straight road
  double curve_period;      // rows
  std::uint64_t track_length;
};

const LevelParams& level_params(int level);

}  // namespace road

struct RoadObstacle {
  std::int64_t track_pos = 0;  // row coordinate along the track
  float offset = 0;            // lateral, relative to the road center
  bool bonus = false;
  bool operator==(const RoadObstacle&) const = default;
};

struct RoadState {
  int level = 1;
  float player_x = 0;  // lateral, relative to the screen center
  std::int64_t distance = 0;
  std::int64_t spawned_to = 0;  // obstacles exist for track positions < spawned_to
  std::vector<RoadObstacle> obstacles;
  std::uint64_t step = 0;
  std::uint64_t rng = 0;
  double score = 0;

  bool operator==(const RoadState&) const = default;
};

namespace road {

RoadState initial_state(int level, std::uint64_t seed);
double advance(RoadState& state, int action, std::uint64_t max_steps, bool& terminal);
// Road center (relative to the screen center) at a track position.
double curve(int level, std::int64_t track_pos);
// Renders `state` with the look of `skin_level`: palette, texture and road
// width come from the skin; lateral positions are rescaled to the skin's road
// width so objects keep their relative place on the road.
Frame render(const RoadState& state, int skin_level);

}  // namespace road
}  // namespace rlgan::envs
