#include "rlgan/transfer/evaluate.hpp"

#include "rlgan/errors.hpp"

namespace rlgan::transfer {

envs::VariantSkin source_skin_of(const envs::EnvConfig& target) {
  if (target.game == envs::GameKind::breakout) return envs::VariantSkin::breakout(envs::BreakoutVariant::source);
  return envs::VariantSkin::road(1);
}

agent::FrameTransform make_transform(const Translator& translator) {
  switch (translator.kind) {
    case Translator::Kind::identity:
      return {};
    case Translator::Kind::oracle:
      return [skin = translator.source_skin](std::vector<envs::Frame>& frames,
                                             const std::vector<const envs::GameState*>& states) {
        for (std::size_t i = 0; i < frames.size(); ++i) frames[i] = envs::render_variant(*states[i], skin);
      };
    case Translator::Kind::learned:
      if (!translator.pair) throw ContractViolation("learned translator without a translator pair");
      return [pair = translator.pair](std::vector<envs::Frame>& frames, const std::vector<const envs::GameState*>&) {
        frames = translate::translate_batch(*pair, frames, translate::Direction::target_to_source);
      };
  }
  return {};
}

agent::EvalReport eval_with_translation(const numerics::ArchSpec& arch, const numerics::NetworkParams& params,
                                        const Translator& translator, const envs::EnvConfig& env,
                                        agent::EvalOptions options) {
  options.transform = make_transform(translator);
  return agent::evaluate(arch, params, env, options);
}

}  // namespace rlgan::transfer
