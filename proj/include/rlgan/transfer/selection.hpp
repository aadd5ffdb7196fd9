#pragma once

#include <functional>
#include <optional>

#include "rlgan/transfer/evaluate.hpp"
#include "rlgan/translate/gan.hpp"

namespace rlgan::transfer {

using CheckpointEvaluator = std::function<agent::EvalReport(const translate::TranslatorCheckpoint&)>;

struct Selection {
  std::uint64_t best_iteration = 0;
  std::optional<translate::TranslatorPair> best;  // empty until something was evaluated
  std::vector<agent::EvalReport> reports;         // in checkpoint order
};

// Streaming form: offer checkpoints as training produces them. Only
// checkpoints whose iteration is a multiple of eval_every (every one when
// eval_every is 0) are scored; ties keep the earliest.
class CheckpointSelector {
 public:
  CheckpointSelector(std::uint64_t eval_every, CheckpointEvaluator evaluator);

  // True when the checkpoint was evaluated.
  bool offer(const translate::TranslatorCheckpoint& checkpoint);
  const Selection& selection() const noexcept { return selection_; }

 private:
  std::uint64_t eval_every_;
  CheckpointEvaluator evaluator_;
  Selection selection_;
  double best_mean_ = 0;
};

Selection select_checkpoint(const std::vector<translate::TranslatorCheckpoint>& checkpoints,
                            std::uint64_t eval_every, const CheckpointEvaluator& evaluator);

// Scores each due checkpoint with eval_with_translation; deterministic mode
// and 10 episodes unless `options` says otherwise.
CheckpointEvaluator translation_evaluator(const numerics::ArchSpec& arch, const numerics::NetworkParams& params,
                                          const envs::EnvConfig& env, agent::EvalOptions options);

agent::EvalOptions selection_options(std::uint64_t seed);

}  // namespace rlgan::transfer
