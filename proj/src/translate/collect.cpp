#include "rlgan/translate/collect.hpp"

#include "rlgan/errors.hpp"
#include "rlgan/numerics/init.hpp"

namespace rlgan::translate {

void FrameDataset::validate() const {
  if (frames.empty()) throw ContractViolation("frame dataset is empty");
  for (const auto& f : frames)
    if (f.shape() != frames.front().shape()) throw ContractViolation("frame dataset mixes frame shapes");
}

FrameDataset collect_frames(const envs::EnvConfig& env, std::size_t count, std::uint64_t seed, Domain domain) {
  if (count == 0) throw ConfigError("collect_frames needs count >= 1");
  FrameDataset ds{domain, {}, env, seed};
  ds.frames.reserve(count);
  envs::Env e(env);
  numerics::Rng rng(numerics::derive_seed(seed, 1));
  std::uniform_int_distribution<int> action(0, envs::kActionCount - 1);
  std::uint64_t episode = 0;
  ds.frames.push_back(e.reset(numerics::derive_seed(seed, 100 + episode++)));
  while (ds.frames.size() < count) {
    const auto& t = e.step(action(rng));
    if (t.terminal)
      ds.frames.push_back(e.reset(numerics::derive_seed(seed, 100 + episode++)));
    else
      ds.frames.push_back(t.frame);
  }
  return ds;
}

}  // namespace rlgan::translate
