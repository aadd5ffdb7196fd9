#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "rlgan/envs/env.hpp"
#include "rlgan/envs/frame_dataset.hpp"
#include "rlgan/envs/preprocess.hpp"
#include "rlgan/errors.hpp"

using namespace rlgan;
using namespace rlgan::envs;

namespace {

const std::vector<BreakoutVariant> kAllVariants{BreakoutVariant::source, BreakoutVariant::const_rect,
                                                BreakoutVariant::moving_square, BreakoutVariant::green_lines,
                                                BreakoutVariant::diagonals};

std::vector<int> random_actions(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(0, kActionCount - 1);
  std::vector<int> a(n);
  for (auto& x : a) x = d(rng);
  return a;
}

float pixel(const Frame& f, int c, int y, int x) { return f[(std::size_t(c) * 84 + y) * 84 + x]; }

bool column_differs(const Frame& a, const Frame& b, int y, int x) {
  for (int c = 0; c < 3; ++c)
    if (pixel(a, c, y, x) != pixel(b, c, y, x)) return true;
  return false;
}

// Distance between the outermost road edge pixels on one row.
int road_width_on_row(const Frame& f, int row) {
  int first = -1, last = -1;
  for (int x = 0; x < 84; ++x) {
    // Edges are bright (all channels >= 200/255).
    const bool bright = pixel(f, 0, row, x) >= 200 / 255.f && pixel(f, 1, row, x) >= 200 / 255.f &&
                        pixel(f, 2, row, x) >= 120 / 255.f;
    if (bright) {
      if (first < 0) first = x;
      last = x;
    }
  }
  return last - first + 1;
}

}  // namespace

TEST_CASE("reset is deterministic per seed") {
  for (auto cfg : {EnvConfig::breakout(), EnvConfig::road(1), EnvConfig::road(3)}) {
    auto [s1, f1] = reset(cfg, 17);
    auto [s2, f2] = reset(cfg, 17);
    CHECK(f1 == f2);
    CHECK(s1 == s2);
  }
  auto [a, fa] = reset(EnvConfig::breakout(), 1);
  auto [b, fb] = reset(EnvConfig::breakout(), 2);
  CHECK_FALSE(a == b);
}

TEST_CASE("breakout source reset shows the full brick grid") {
  auto [state, frame] = reset(EnvConfig::breakout(), 3);
  const auto& bs = std::get<BreakoutState>(state);
  CHECK(bs.bricks_left() == breakout::kBrickRows * breakout::kBrickCols);
  for (int r = 0; r < breakout::kBrickRows; ++r)
    for (int c = 0; c < breakout::kBrickCols; ++c) {
      const int x = breakout::kWallSide + c * breakout::kBrickWidth + 2;
      const int y = breakout::kBrickTop + r * breakout::kBrickHeight + 1;
      const float lum = pixel(frame, 0, y, x) + pixel(frame, 1, y, x) + pixel(frame, 2, y, x);
      CHECK(lum > 0.0f);
    }
}

TEST_CASE("road level 3 is narrower than level 1") {
  CHECK(road::level_params(3).half_width < road::level_params(1).half_width);
  auto [s1, f1] = reset(EnvConfig::road(1), 5);
  auto [s3, f3] = reset(EnvConfig::road(3), 5);
  CHECK(road_width_on_row(f3, 10) < road_width_on_row(f1, 10));
}

TEST_CASE("unknown variant or level is a configuration error") {
  CHECK_THROWS_AS(parse_variant("striped"), ConfigError);
  CHECK_THROWS_AS(reset(EnvConfig::road(5), 1), ConfigError);
  CHECK(parse_variant("const-rect") == BreakoutVariant::const_rect);
  for (auto v : kAllVariants) CHECK(parse_variant(to_string(v)) == v);
}

TEST_CASE("out-of-range action is a contract violation") {
  Env env(EnvConfig::breakout());
  env.reset(1);
  CHECK_THROWS_AS(env.step(3), ContractViolation);
  CHECK_THROWS_AS(env.step(-1), ContractViolation);
}

TEST_CASE("breakout brick hit gives +1 and removes the brick") {
  BreakoutState s = breakout::initial_state(9, 0);
  // Ball just below the lowest brick row, moving up through column 5.
  s.ball_x = breakout::kWallSide + 5 * breakout::kBrickWidth + 2;
  s.ball_y = breakout::kBrickTop + breakout::kBrickRows * breakout::kBrickHeight + 1;
  s.ball_vx = 0;
  s.ball_vy = -2;
  bool terminal = false;
  const double r = breakout::advance(s, 0, 10000, terminal);
  CHECK(r == 1.0);
  CHECK(s.bricks_left() == 71);
  CHECK(s.bricks[(breakout::kBrickRows - 1) * breakout::kBrickCols + 5] == 0);
  CHECK(s.ball_vy > 0);
}

TEST_CASE("breakout loses lives and terminates") {
  Env env(EnvConfig::breakout());
  env.reset(4);
  bool done = false;
  int steps = 0;
  while (!done && steps < 10000) {
    done = env.step(0).terminal;
    ++steps;
  }
  CHECK(done);
  CHECK(std::get<BreakoutState>(env.state()).lives == 0);
  CHECK_THROWS_AS(env.step(0), ContractViolation);
}

TEST_CASE("road bonus car pays +10") {
  RoadState s = road::initial_state(1, 3);
  s.obstacles.clear();
  RoadObstacle bonus;
  bonus.track_pos = s.distance + 1;
  bonus.offset = s.player_x - static_cast<float>(road::curve(1, bonus.track_pos));
  bonus.bonus = true;
  s.obstacles.push_back(bonus);
  s.spawned_to = s.distance + 200;  // suppress spawning
  bool terminal = false;
  const double r = road::advance(s, 0, 10000, terminal);
  CHECK(r == doctest::Approx(road::kBonusReward + road::kRowReward));
  CHECK_FALSE(terminal);
  CHECK(s.obstacles.empty());
}

TEST_CASE("road hostile collision and roadside crash are terminal") {
  RoadState s = road::initial_state(2, 3);
  s.obstacles.clear();
  RoadObstacle car;
  car.track_pos = s.distance + 1;
  car.offset = s.player_x;
  s.obstacles.push_back(car);
  s.spawned_to = s.distance + 200;
  bool terminal = false;
  road::advance(s, 0, 10000, terminal);
  CHECK(terminal);

  RoadState t = road::initial_state(2, 3);
  t.obstacles.clear();
  t.spawned_to = t.distance + 200;
  terminal = false;
  int steps = 0;
  while (!terminal && steps < 100) {
    road::advance(t, 2, 10000, terminal);
    ++steps;
  }
  CHECK(terminal);
  CHECK(steps <= road::level_params(2).half_width / road::kSteer + 1);
}

TEST_CASE("moving square changes location every 1000 global steps") {
  CHECK(breakout::square_location(0) == 0);
  CHECK(breakout::square_location(999) == 0);
  CHECK(breakout::square_location(1000) == 1);
  CHECK(breakout::square_location(2500) == 2);
  CHECK(breakout::square_location(3000) == 0);

  BreakoutState s = breakout::initial_state(1, 999);
  const Frame a = breakout::render(s, BreakoutVariant::moving_square);
  s.global_step = 1000;
  const Frame b = breakout::render(s, BreakoutVariant::moving_square);
  const auto& p0 = breakout::kSquareSpots[0];
  const auto& p1 = breakout::kSquareSpots[1];
  CHECK(pixel(a, 0, p0.y + 1, p0.x + 1) > 0.5f);
  CHECK(pixel(b, 0, p0.y + 1, p0.x + 1) == 0.0f);
  CHECK(pixel(b, 0, p1.y + 1, p1.x + 1) > 0.5f);
}

TEST_CASE("global step keeps counting across resets of one env") {
  Env env(EnvConfig::breakout(BreakoutVariant::moving_square));
  env.reset(1);
  for (int i = 0; i < 10; ++i) env.step(0);
  env.reset(2);
  CHECK(std::get<BreakoutState>(env.state()).global_step == 10 * 4);
}

TEST_CASE("frame skip repeats the action and sums rewards") {
  auto cfg1 = EnvConfig::road(1);
  cfg1.frame_skip = 1;
  auto cfg4 = EnvConfig::road(1);
  Env one(cfg1), four(cfg4);
  one.reset(5);
  four.reset(5);
  double r = 0;
  for (int i = 0; i < 4; ++i) r += one.step(2).reward;
  const auto& t = four.step(2);
  CHECK(t.ticks == 4);
  CHECK(t.reward == doctest::Approx(r));
  CHECK(t.state == one.state());
  CHECK(t.frame == render_variant(one.state(), one.skin()));

  // A terminal tick ends the step early.
  auto crash = EnvConfig::road(1);
  crash.frame_skip = 1000;
  Env c(crash);
  c.reset(1);
  const auto& ct = c.step(2);
  CHECK(ct.terminal);
  CHECK(ct.ticks < 1000);
  auto bad = EnvConfig::breakout();
  bad.frame_skip = 0;
  CHECK_THROWS_AS(Env{bad}, ConfigError);
}

TEST_CASE("decorations are local") {
  auto [state, src] = reset(EnvConfig::breakout(), 11);
  auto in_box = [](const breakout::Box& b, int y, int x) {
    return x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h;
  };
  const Frame rect = render_variant(state, VariantSkin::breakout(BreakoutVariant::const_rect));
  const Frame diag = render_variant(state, VariantSkin::breakout(BreakoutVariant::diagonals));
  int rect_diffs = 0, diag_diffs = 0;
  for (int y = 0; y < 84; ++y)
    for (int x = 0; x < 84; ++x) {
      if (column_differs(src, rect, y, x)) {
        CHECK(in_box(breakout::kConstRect, y, x));
        ++rect_diffs;
      }
      if (column_differs(src, diag, y, x)) {
        CHECK(in_box(breakout::kDiagonalRegion, y, x));
        ++diag_diffs;
      }
    }
  // Ball may overlap a decoration; the decoration still changes most of its box.
  CHECK(rect_diffs > 0);
  CHECK(diag_diffs > 0);
}

TEST_CASE("every variant renders differently from source") {
  BreakoutState s = breakout::initial_state(5, 0);
  const Frame src = breakout::render(s, BreakoutVariant::source);
  for (auto v : kAllVariants) {
    if (v == BreakoutVariant::source) continue;
    CHECK_FALSE(breakout::render(s, v) == src);
  }
  RoadState r = road::initial_state(2, 5);
  for (int a = 1; a <= 4; ++a)
    for (int b = a + 1; b <= 4; ++b) CHECK_FALSE(road::render(r, a) == road::render(r, b));
}

TEST_CASE("skins do not change dynamics") {
  const auto actions = random_actions(3000, 7);
  auto run = [&](const EnvConfig& cfg) {
    Env env(cfg);
    env.reset(21);
    std::vector<std::tuple<double, bool, GameState>> out;
    std::uint64_t seed = 22;
    for (int a : actions) {
      const auto& t = env.step(a);
      out.emplace_back(t.reward, t.terminal, t.state);
      if (t.terminal) env.reset(seed++);
    }
    return out;
  };
  const auto ref = run(EnvConfig::breakout());
  for (auto v : kAllVariants) {
    CHECK(run(EnvConfig::breakout(v)) == ref);
  }
  const auto road_ref = run(EnvConfig::road(2));
  for (int skin = 1; skin <= 4; ++skin) CHECK(run(EnvConfig::road(2, skin)) == road_ref);
}

TEST_CASE("frames stay in [0,1], exact multiples of 1/255, constant shape") {
  for (auto cfg : {EnvConfig::breakout(BreakoutVariant::diagonals), EnvConfig::road(3), EnvConfig::road(4)}) {
    Env env(cfg);
    Frame f = env.reset(3);
    const auto actions = random_actions(300, 3);
    for (int a : actions) {
      CHECK(f.shape() == numerics::Shape{3, 84, 84});
      for (float v : f.data()) {
        REQUIRE(v >= 0.0f);
        REQUIRE(v <= 1.0f);
        REQUIRE(std::round(v * 255.0f) / 255.0f == v);
      }
      const auto& t = env.step(a);
      if (t.terminal) {
        f = env.reset(4);
      } else {
        f = t.frame;
      }
    }
  }
}

TEST_CASE("oracle translation") {
  auto [state, src] = reset(EnvConfig::breakout(BreakoutVariant::const_rect), 8);
  for (auto v : kAllVariants) {
    const auto skin = VariantSkin::breakout(v);
    CHECK(oracle_translate(state, skin, skin) == render_variant(state, skin));
    const Frame to_src = oracle_translate(state, skin, VariantSkin::breakout(BreakoutVariant::source));
    CHECK(to_src == breakout::render(std::get<BreakoutState>(state), BreakoutVariant::source));
    const Frame back = oracle_translate(state, VariantSkin::breakout(BreakoutVariant::source), skin);
    CHECK(back == render_variant(state, skin));
  }
  CHECK_THROWS_AS(oracle_translate(state, VariantSkin::breakout(BreakoutVariant::source), VariantSkin::road(1)),
                  ContractViolation);
}

TEST_CASE("road oracle keeps cars at proportional lateral positions") {
  RoadState s = road::initial_state(2, 1);
  s.obstacles.clear();
  RoadObstacle car;
  car.track_pos = s.distance + 30;
  car.offset = 10.0f;  // level-2 half-width 17
  s.obstacles.push_back(car);
  const Frame l1 = oracle_translate(s, VariantSkin::road(2), VariantSkin::road(1));
  const double expected_center = 42.0 + 10.0 * 22.0 / 17.0;
  const int top = road::kPlayerRow - 30;
  int first = -1, last = -1;
  for (int x = 0; x < 84; ++x)
    if (pixel(l1, 0, top + 1, x) == 110 / 255.f && pixel(l1, 1, top + 1, x) == 0.0f) {
      if (first < 0) first = x;
      last = x;
    }
  REQUIRE(first >= 0);
  CHECK(std::abs((first + last + 1) / 2.0 - expected_center) <= 1.0);
  CHECK(road_width_on_row(l1, 10) == road_width_on_row(render_variant(s, VariantSkin::road(1)), 10));
}

TEST_CASE("road cars stand out from every road in grayscale") {
  auto luma = [](const Frame& f, int y, int x) {
    return 0.299 * pixel(f, 0, y, x) + 0.587 * pixel(f, 1, y, x) + 0.114 * pixel(f, 2, y, x);
  };
  for (int level = 1; level <= 4; ++level)
    for (bool bonus : {false, true}) {
      RoadState s = road::initial_state(level, 3);
      s.obstacles.clear();
      RoadObstacle car;
      car.track_pos = s.distance + 30;
      car.bonus = bonus;
      s.obstacles.push_back(car);
      const Frame f = render_variant(s, VariantSkin::road(level));
      const int top = road::kPlayerRow - 30;
      // Centre of the obstacle, the player, and the open road beside the player.
      const int cx = static_cast<int>(std::lround(42.0 + road::curve(level, car.track_pos)));
      const int px = static_cast<int>(std::lround(42.0 + s.player_x));
      const double road_luma = luma(f, road::kPlayerRow + 2, px + road::kCarWidth);
      CAPTURE(level);
      CHECK(std::abs(luma(f, top + 2, cx) - road_luma) > 0.1);
      CHECK(std::abs(luma(f, road::kPlayerRow + 2, px) - road_luma) > 0.1);
    }
}

TEST_CASE("preprocess") {
  Canvas black;
  black.fill({0, 0, 0});
  Canvas white;
  white.fill({255, 255, 255});
  const Frame b = black.release();
  const Frame w = white.release();

  std::vector<Frame> blacks(4, b);
  const auto ob = preprocess(blacks);
  CHECK(ob.shape() == numerics::Shape{4, 84, 84});
  for (float v : ob.data()) REQUIRE(v == 0.0f);

  std::vector<Frame> whites(4, w);
  const auto ow = preprocess(whites);
  for (float v : ow.data()) REQUIRE(v == 1.0f);

  auto [state, frame] = reset(EnvConfig::breakout(), 2);
  std::vector<Frame> one{frame};
  const auto single = preprocess(one);
  const std::size_t plane = 84 * 84;
  for (std::size_t k = 1; k < 4; ++k)
    for (std::size_t i = 0; i < plane; ++i) REQUIRE(single[k * plane + i] == single[i]);

  // Newest frame last; padding repeats the oldest.
  std::vector<Frame> two{b, w};
  const auto o2 = preprocess(two);
  CHECK(o2[0] == 0.0f);
  CHECK(o2[2 * plane] == 0.0f);
  CHECK(o2[3 * plane] == 1.0f);

  PreprocessConfig small{4, 42, 42};
  CHECK(preprocess(one, small).shape() == numerics::Shape{4, 42, 42});

  // Pure red maps to 0.299 luminance, quantized.
  Canvas red;
  red.fill({255, 0, 0});
  std::vector<Frame> reds{red.release()};
  CHECK(preprocess(reds)[0] == std::round(0.299f * 255.0f) / 255.0f);
}

TEST_CASE("frame stack matches batch preprocess") {
  Env env(EnvConfig::breakout());
  std::vector<Frame> history{env.reset(6)};
  FrameStack stack;
  stack.reset(history.back());
  for (int i = 0; i < 10; ++i) {
    history.push_back(env.step(i % 3).frame);
    stack.push(history.back());
    const std::size_t from = history.size() > 4 ? history.size() - 4 : 0;
    std::vector<Frame> last(history.begin() + long(from), history.end());
    CHECK(stack.observation() == preprocess(last));
  }
}

TEST_CASE("random policy baseline on breakout source") {
  std::mt19937 rng(12345);
  std::uniform_int_distribution<int> d(0, kActionCount - 1);
  Env env(EnvConfig::breakout());
  double total = 0;
  const int episodes = 100;
  for (int e = 0; e < episodes; ++e) {
    env.reset(1000 + e);
    while (!env.step(d(rng)).terminal) {
    }
    total += env.episode_score();
  }
  const double b_rand = total / episodes;
  MESSAGE("B_rand = " << b_rand);
  CHECK(b_rand > 0.0);
  CHECK(b_rand < 10.0);
}

TEST_CASE("RLGF dataset round-trip and corruption") {
  const auto dir = std::filesystem::temp_directory_path() / "rlgan_envs_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "frames.rlgf";
  std::vector<Frame> frames;
  Env env(EnvConfig::road(3));
  frames.push_back(env.reset(1));
  for (int i = 0; i < 5; ++i) frames.push_back(env.step(0).frame);
  write_frames(path, frames);
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 4 + 1 + 2 + 2 + 6 * 3 * 84 * 84);
  CHECK(read_frames(path) == frames);

  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 10);
  CHECK_THROWS_AS(read_frames(path), CorruptCheckpointError);
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOPE0000";
  }
  CHECK_THROWS_AS(read_frames(path), CorruptCheckpointError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("random_policy_score agrees with a hand-rolled random rollout") {
  const auto config = EnvConfig::road(2);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(0, kActionCount - 1);
  Env env(config);
  double total = 0;
  for (int e = 0; e < 5; ++e) {
    env.reset(7 + 1000 + e);
    while (!env.step(d(rng)).terminal) {
    }
    total += env.episode_score();
  }
  CHECK(random_policy_score(config, 5, 7) == total / 5);
  CHECK_THROWS_AS(random_policy_score(config, 0, 7), ContractViolation);
}
