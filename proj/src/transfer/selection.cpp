#include "rlgan/transfer/selection.hpp"

#include "rlgan/errors.hpp"

namespace rlgan::transfer {

CheckpointSelector::CheckpointSelector(std::uint64_t eval_every, CheckpointEvaluator evaluator)
    : eval_every_(eval_every), evaluator_(std::move(evaluator)) {
  if (!evaluator_) throw ContractViolation("checkpoint selector needs an evaluator");
}

bool CheckpointSelector::offer(const translate::TranslatorCheckpoint& checkpoint) {
  if (eval_every_ != 0 && checkpoint.iteration % eval_every_ != 0) return false;
  auto report = evaluator_(checkpoint);
  if (report.checkpoint.empty()) report.checkpoint = "iter-" + std::to_string(checkpoint.iteration);
  if (!selection_.best || report.mean > best_mean_) {
    best_mean_ = report.mean;
    selection_.best_iteration = checkpoint.iteration;
    selection_.best = checkpoint.pair;
  }
  selection_.reports.push_back(std::move(report));
  return true;
}

Selection select_checkpoint(const std::vector<translate::TranslatorCheckpoint>& checkpoints,
                            std::uint64_t eval_every, const CheckpointEvaluator& evaluator) {
  if (checkpoints.empty()) throw ContractViolation("select_checkpoint needs at least one checkpoint");
  CheckpointSelector selector(eval_every, evaluator);
  for (const auto& cp : checkpoints) selector.offer(cp);
  if (!selector.selection().best)
    throw ConfigError("no checkpoint iteration is a multiple of eval_every " + std::to_string(eval_every));
  return selector.selection();
}

agent::EvalOptions selection_options(std::uint64_t seed) {
  agent::EvalOptions o;
  o.episodes = 10;
  o.mode = agent::ActMode::deterministic;
  o.seed = seed;
  return o;
}

CheckpointEvaluator translation_evaluator(const numerics::ArchSpec& arch, const numerics::NetworkParams& params,
                                          const envs::EnvConfig& env, agent::EvalOptions options) {
  return [arch, &params, env, options](const translate::TranslatorCheckpoint& cp) {
    auto r = eval_with_translation(arch, params, Translator::learned(cp.pair), env, options);
    r.checkpoint = "iter-" + std::to_string(cp.iteration);
    return r;
  };
}

}  // namespace rlgan::transfer
