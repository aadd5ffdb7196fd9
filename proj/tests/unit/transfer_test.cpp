#include <doctest.h>

#include <map>
#include <random>

#include "rlgan/errors.hpp"
#include "rlgan/transfer/selection.hpp"

using namespace rlgan;
using namespace rlgan::transfer;

namespace {

agent::EvalOptions few_episodes(std::uint64_t seed) {
  agent::EvalOptions o;
  o.episodes = 3;
  o.seed = seed;
  return o;
}

std::vector<translate::TranslatorCheckpoint> checkpoints(std::initializer_list<std::uint64_t> iterations) {
  std::vector<translate::TranslatorCheckpoint> out;
  for (auto it : iterations) out.push_back({it, {}});
  return out;
}

// Scores looked up by iteration.
CheckpointEvaluator scripted(std::map<std::uint64_t, double> scores, std::vector<std::uint64_t>* calls = nullptr) {
  return [scores, calls](const translate::TranslatorCheckpoint& cp) {
    if (calls) calls->push_back(cp.iteration);
    agent::EvalReport r;
    r.mean = scores.at(cp.iteration);
    r.scores = {r.mean};
    r.episodes = 1;
    return r;
  };
}

}  // namespace

TEST_CASE("identity translation equals plain evaluation") {
  const auto arch = agent::policy_arch({4, 84, 84});
  const auto params = agent::init_policy(arch, 3);
  const auto env = envs::EnvConfig::breakout();
  const auto plain = agent::evaluate(arch, params, env, few_episodes(7));
  const auto via = eval_with_translation(arch, params, Translator::identity(), env, few_episodes(7));
  CHECK(via.scores == plain.scores);
  CHECK(via.frames == plain.frames);
  CHECK(via.mean == plain.mean);
}

TEST_CASE("a zero-initialized learned translator is exact on quantized frames") {
  const auto arch = agent::policy_arch({4, 84, 84});
  const auto params = agent::init_policy(arch, 4);
  translate::TranslatorConfig c;
  c.base_channels = 2;
  c.res_blocks = 1;
  c.init = numerics::InitScheme::constant(0.0);
  const auto pair = translate::make_translator(c, 1);
  const auto env = envs::EnvConfig::breakout();
  auto opt = few_episodes(2);
  opt.episodes = 2;
  const auto plain = agent::evaluate(arch, params, env, opt);
  const auto via = eval_with_translation(arch, params, Translator::learned(pair), env, opt);
  CHECK(via.scores == plain.scores);
  CHECK(via.frames == plain.frames);
}

TEST_CASE("oracle translation scores exactly like the source environment") {
  const auto arch = agent::policy_arch({4, 84, 84});
  const auto params = agent::init_policy(arch, 5);
  std::vector<std::pair<envs::EnvConfig, envs::EnvConfig>> cases;  // (target, source-looking twin)
  for (auto v : {envs::BreakoutVariant::const_rect, envs::BreakoutVariant::moving_square,
                 envs::BreakoutVariant::green_lines, envs::BreakoutVariant::diagonals})
    cases.emplace_back(envs::EnvConfig::breakout(v), envs::EnvConfig::breakout());
  cases.emplace_back(envs::EnvConfig::road(2), envs::EnvConfig::road(2, 1));
  for (const auto& [target, twin] : cases) {
    CAPTURE(envs::describe(target));
    const auto src = agent::evaluate(arch, params, twin, few_episodes(9));
    const auto via =
        eval_with_translation(arch, params, Translator::oracle(source_skin_of(target)), target, few_episodes(9));
    CHECK(via.scores == src.scores);
    CHECK(via.frames == src.frames);
    CHECK(via.frames >= via.episodes);
  }
}

TEST_CASE("learned translator without a pair is a contract violation") {
  Translator t;
  t.kind = Translator::Kind::learned;
  CHECK_THROWS_AS(make_transform(t), ContractViolation);
}

TEST_CASE("selection picks the earliest maximum") {
  const auto s = select_checkpoint(checkpoints({1000, 2000, 3000}),
                                   1000, scripted({{1000, 3}, {2000, 120}, {3000, 120}}));
  CHECK(s.best_iteration == 2000);
  REQUIRE(s.reports.size() == 3);
  CHECK(s.reports[0].checkpoint == "iter-1000");
  CHECK(s.reports[2].mean == 120);
}

TEST_CASE("a single checkpoint is selected trivially") {
  const auto s = select_checkpoint(checkpoints({500}), 0, scripted({{500, -1}}));
  CHECK(s.best_iteration == 500);
  CHECK(s.best.has_value());
}

TEST_CASE("only multiples of eval_every are evaluated") {
  std::vector<std::uint64_t> calls;
  const auto s = select_checkpoint(checkpoints({1000, 2000, 3000, 4000}), 2000,
                                   scripted({{1000, 99}, {2000, 1}, {3000, 99}, {4000, 2}}, &calls));
  CHECK(calls == std::vector<std::uint64_t>{2000, 4000});
  CHECK(s.best_iteration == 4000);
  CHECK_THROWS_AS(select_checkpoint(checkpoints({1000}), 3000, scripted({{1000, 1}})), ConfigError);
  CHECK_THROWS_AS(select_checkpoint({}, 1, scripted({})), ContractViolation);
}

TEST_CASE("streaming selection agrees with the batch form on random scores") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::uint64_t, double> scores;
    std::vector<translate::TranslatorCheckpoint> cps;
    const int n = 1 + int(rng() % 12);
    for (int i = 1; i <= n; ++i) {
      scores[std::uint64_t(i) * 100] = double(rng() % 4);
      cps.push_back({std::uint64_t(i) * 100, {}});
    }
    const auto s = select_checkpoint(cps, 100, scripted(scores));
    double best = -1;
    std::uint64_t expected = 0;
    for (const auto& [it, v] : scores)
      if (v > best) best = v, expected = it;
    CHECK(s.best_iteration == expected);
  }
}
