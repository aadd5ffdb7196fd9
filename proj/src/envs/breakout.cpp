#include "rlgan/envs/breakout.hpp"

#include <algorithm>
#include <cmath>

#include "rlgan/envs/rng.hpp"

namespace rlgan::envs {

int BreakoutState::bricks_left() const {
  return static_cast<int>(std::count(bricks.begin(), bricks.end(), std::uint8_t{1}));
}

namespace breakout {

namespace {

constexpr int kRight = kFrameSize - kWallSide;
constexpr int kBrickBottom = kBrickTop + kBrickRows * kBrickHeight;
constexpr float kBallSpeedY = 2.0f;
constexpr float kPaddleSpeed = 3.0f;

constexpr Rgb kBackground{0, 0, 0};
constexpr Rgb kWall{142, 142, 142};
constexpr Rgb kPaddle{200, 72, 72};
constexpr std::array<Rgb, kBrickRows> kBrickColors{
    {{200, 72, 72}, {198, 108, 58}, {180, 122, 48}, {162, 162, 42}, {72, 160, 72}, {66, 72, 200}}};
constexpr Rgb kDecoration{200, 72, 72};
constexpr Rgb kGreen{0, 200, 0};
constexpr Rgb kDiagonal{120, 120, 120};

struct Line {
  int x, y, w;
};
constexpr std::array<Line, 4> kGreenLines{{{10, 44, 30}, {36, 52, 38}, {12, 60, 48}, {44, 68, 26}}};

void launch(BreakoutState& s) {
  s.ball_x = static_cast<float>(24.0 + 34.0 * uniform(s.rng));
  s.ball_y = static_cast<float>(kBrickBottom + 8);
  static constexpr std::array<float, 4> kSpeeds{-1.5f, -1.0f, 1.0f, 1.5f};
  s.ball_vx = kSpeeds[static_cast<std::size_t>(next_u64(s.rng) % kSpeeds.size())];
  s.ball_vy = kBallSpeedY;
}

// First live brick overlapping the ball box, scanning bottom row first.
int brick_hit(const BreakoutState& s, float x, float y) {
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const int x1 = x0 + kBallSize - 1, y1 = y0 + kBallSize - 1;
  if (y1 < kBrickTop || y0 >= kBrickBottom) return -1;
  const int r0 = std::max(0, (y0 - kBrickTop) / kBrickHeight);
  const int r1 = std::min(kBrickRows - 1, (y1 - kBrickTop) / kBrickHeight);
  const int c0 = std::max(0, (x0 - kWallSide) / kBrickWidth);
  const int c1 = std::min(kBrickCols - 1, (x1 - kWallSide) / kBrickWidth);
  for (int r = r1; r >= r0; --r)
    for (int c = c0; c <= c1; ++c)
      if (s.bricks[static_cast<std::size_t>(r * kBrickCols + c)]) return r * kBrickCols + c;
  return -1;
}

}  // namespace

int square_location(std::uint64_t global_step) {
  return static_cast<int>((global_step / kMovingSquarePeriod) % kSquareSpots.size());
}

BreakoutState initial_state(std::uint64_t seed, std::uint64_t global_step) {
  BreakoutState s;
  s.rng = seed ^ 0x5bd1e995a1b2c3d4ULL;
  next_u64(s.rng);
  s.bricks.fill(1);
  s.paddle_x = (kFrameSize - kPaddleWidth) / 2.0f;
  s.global_step = global_step;
  launch(s);
  return s;
}

double advance(BreakoutState& s, int action, std::uint64_t max_steps, bool& terminal) {
  terminal = false;
  double reward = 0;

  if (action == 1) s.paddle_x -= kPaddleSpeed;
  if (action == 2) s.paddle_x += kPaddleSpeed;
  s.paddle_x = std::clamp(s.paddle_x, float(kWallSide), float(kRight - kPaddleWidth));

  float nx = s.ball_x + s.ball_vx;
  float ny = s.ball_y + s.ball_vy;
  if (nx < kWallSide) {
    nx = 2.0f * kWallSide - nx;
    s.ball_vx = -s.ball_vx;
  } else if (nx + kBallSize > kRight) {
    nx = 2.0f * (kRight - kBallSize) - nx;
    s.ball_vx = -s.ball_vx;
  }
  if (ny < kWallTop) {
    ny = 2.0f * kWallTop - ny;
    s.ball_vy = -s.ball_vy;
  }

  if (const int hit = brick_hit(s, nx, ny); hit >= 0) {
    s.bricks[static_cast<std::size_t>(hit)] = 0;
    reward += 1.0;
    s.ball_vy = -s.ball_vy;
    ny = s.ball_y;
  }

  const bool crossing = s.ball_vy > 0 && s.ball_y + kBallSize <= kPaddleY && ny + kBallSize >= kPaddleY;
  if (crossing && nx + kBallSize > s.paddle_x && nx < s.paddle_x + kPaddleWidth) {
    ny = float(kPaddleY - kBallSize);
    s.ball_vy = -kBallSpeedY;
    const float offset = std::clamp(
        ((nx + kBallSize / 2.0f) - (s.paddle_x + kPaddleWidth / 2.0f)) / (kPaddleWidth / 2.0f + 1.0f),
        -1.0f, 1.0f);
    float vx = 2.0f * offset;
    if (std::abs(vx) < 0.5f) vx = (offset < 0 || (offset == 0 && s.ball_vx < 0)) ? -0.5f : 0.5f;
    s.ball_vx = vx;
  }

  s.ball_x = nx;
  s.ball_y = ny;
  if (s.ball_y >= kFrameSize) {
    --s.lives;
    if (s.lives <= 0)
      terminal = true;
    else
      launch(s);
  }

  ++s.step;
  ++s.global_step;
  s.score += reward;
  if (s.bricks_left() == 0 || s.step >= max_steps) terminal = true;
  return reward;
}

Frame render(const BreakoutState& s, BreakoutVariant variant) {
  Canvas c;
  c.fill(kBackground);

  switch (variant) {
    case BreakoutVariant::source:
      break;
    case BreakoutVariant::const_rect:
      c.rect(kConstRect.x, kConstRect.y, kConstRect.w, kConstRect.h, kDecoration);
      break;
    case BreakoutVariant::moving_square: {
      const auto& b = kSquareSpots[static_cast<std::size_t>(square_location(s.global_step))];
      c.rect(b.x, b.y, b.w, b.h, kDecoration);
      break;
    }
    case BreakoutVariant::green_lines:
      for (const auto& l : kGreenLines) c.rect(l.x, l.y, l.w, 1, kGreen);
      break;
    case BreakoutVariant::diagonals: {
      const auto& r = kDiagonalRegion;
      for (int y = r.y; y < r.y + r.h; ++y)
        for (int x = r.x; x < r.x + r.w; ++x)
          if ((x + y) % 8 == 0) c.pixel(x, y, kDiagonal);
      break;
    }
  }

  c.rect(0, 0, kFrameSize, kWallTop, kWall);
  c.rect(0, 0, kWallSide, kFrameSize, kWall);
  c.rect(kRight, 0, kWallSide, kFrameSize, kWall);
  for (int r = 0; r < kBrickRows; ++r)
    for (int col = 0; col < kBrickCols; ++col)
      if (s.bricks[static_cast<std::size_t>(r * kBrickCols + col)])
        c.rect(kWallSide + col * kBrickWidth, kBrickTop + r * kBrickHeight, kBrickWidth, kBrickHeight,
               kBrickColors[static_cast<std::size_t>(r)]);
  c.rect(static_cast<long>(std::floor(s.paddle_x)), kPaddleY, kPaddleWidth, kPaddleHeight, kPaddle);
  c.rect(static_cast<long>(std::floor(s.ball_x)), static_cast<long>(std::floor(s.ball_y)), kBallSize,
         kBallSize, kPaddle);
  return c.release();
}

}  // namespace breakout
}  // namespace rlgan::envs
