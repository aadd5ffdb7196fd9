#pragma once

#include "rlgan/agent/evaluate.hpp"
#include "rlgan/translate/translator.hpp"

namespace rlgan::transfer {

// How target frames reach a policy trained on the source task.
struct Translator {
  enum class Kind { identity, oracle, learned };

  Kind kind = Kind::identity;
  envs::VariantSkin source_skin{};                  // oracle: skin to re-render in
  const translate::TranslatorPair* pair = nullptr;  // learned: borrowed, G1 is applied

  static Translator identity() { return {}; }
  static Translator oracle(const envs::VariantSkin& source_skin) { return {Kind::oracle, source_skin, nullptr}; }
  static Translator learned(const translate::TranslatorPair& pair) { return {Kind::learned, {}, &pair}; }
};

// The skin the source policy was trained on: the plain BreakoutLite look, or
// the level-1 RoadLite look.
envs::VariantSkin source_skin_of(const envs::EnvConfig& target);

agent::FrameTransform make_transform(const Translator& translator);

// Each raw frame is translated, then preprocessed, then acted on; the score
// is the true environment reward. options.transform is replaced.
agent::EvalReport eval_with_translation(const numerics::ArchSpec& arch, const numerics::NetworkParams& params,
                                        const Translator& translator, const envs::EnvConfig& env,
                                        agent::EvalOptions options);

}  // namespace rlgan::transfer
