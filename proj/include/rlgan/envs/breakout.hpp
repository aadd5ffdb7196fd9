#pragma once

#include <array>
#include <cstdint>

#include "rlgan/envs/frame.hpp"

namespace rlgan::envs {

enum class BreakoutVariant { source, const_rect, moving_square, green_lines, diagonals };

namespace breakout {

inline constexpr int kBrickRows = 6;
inline constexpr int kBrickCols = 12;
inline constexpr int kBrickWidth = 6;
inline constexpr int kBrickHeight = 3;
inline constexpr int kBrickTop = 18;
inline constexpr int kWallSide = 6;
inline constexpr int kWallTop = 8;
inline constexpr int kPaddleY = 76;
inline constexpr int kPaddleWidth = 12;
inline constexpr int kPaddleHeight = 2;
inline constexpr int kBallSize = 2;
inline constexpr int kLives = 3;
inline constexpr int kMovingSquarePeriod = 1000;

// Geometry of the skin decorations, exposed for locality tests.
struct Box {
  int x, y, w, h;
};
inline constexpr Box kConstRect{39, 54, kBrickWidth, kBrickHeight};
inline constexpr std::array<Box, 3> kSquareSpots{{{18, 46, 4, 4}, {40, 62, 4, 4}, {62, 50, 4, 4}}};
inline constexpr Box kDiagonalRegion{kWallSide, 38, 36, 84 - 38};

}  // namespace breakout

struct BreakoutState {
  float paddle_x = 0;  // left edge
  float ball_x = 0, ball_y = 0;
  float ball_vx = 0, ball_vy = 0;
  std::array<std::uint8_t, breakout::kBrickRows * breakout::kBrickCols> bricks{};
  int lives = breakout::kLives;
  std::uint64_t step = 0;         // within the episode
  std::uint64_t global_step = 0;  // across episodes of one environment instance
  std::uint64_t rng = 0;
  double score = 0;

  int bricks_left() const;
  bool operator==(const BreakoutState&) const = default;
};

namespace breakout {

BreakoutState initial_state(std::uint64_t seed, std::uint64_t global_step);
// Advances one tick. Returns the reward; sets `terminal`.
double advance(BreakoutState& state, int action, std::uint64_t max_steps, bool& terminal);
Frame render(const BreakoutState& state, BreakoutVariant variant);
// Moving-square location index for a global step.
int square_location(std::uint64_t global_step);

}  // namespace breakout
}  // namespace rlgan::envs
