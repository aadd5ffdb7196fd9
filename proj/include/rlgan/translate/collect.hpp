#pragma once

#include <string>
#include <vector>

#include "rlgan/envs/env.hpp"

namespace rlgan::translate {

enum class Domain { source, target };

struct FrameDataset {
  Domain domain = Domain::source;
  std::vector<envs::Frame> frames;
  envs::EnvConfig env{};
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return frames.size(); }
  void validate() const;
};

// Frames seen by a uniformly random policy over repeated episodes, starting
// with each reset frame, until `count` frames are gathered.
FrameDataset collect_frames(const envs::EnvConfig& env, std::size_t count, std::uint64_t seed,
                            Domain domain = Domain::source);

}  // namespace rlgan::translate
