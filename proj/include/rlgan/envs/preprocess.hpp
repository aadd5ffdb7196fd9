#pragma once

#include <deque>
#include <span>

#include "rlgan/envs/frame.hpp"

namespace rlgan::envs {

// Policy input: (stack, H, W) grayscale planes in [0, 1], newest plane last.
using Observation = numerics::Tensor;

struct PreprocessConfig {
  std::size_t stack = 4;
  std::size_t height = 84;
  std::size_t width = 84;

  numerics::Shape observation_shape() const { return {stack, height, width}; }
};

// Luminance 0.299/0.587/0.114 with nearest-neighbour resize, quantized to
// multiples of 1/255. Writes height*width values to `out`.
void grayscale_plane(const Frame& frame, std::size_t height, std::size_t width, float* out);

// Oldest frame first. Fewer frames than `stack` are padded by repeating the
// oldest one.
Observation preprocess(std::span<const Frame> history, const PreprocessConfig& config = {});

// Incremental frame stacker: keeps the last `stack` grayscale planes.
class FrameStack {
 public:
  explicit FrameStack(PreprocessConfig config = {});

  void reset(const Frame& first);
  void push(const Frame& frame);
  Observation observation() const;
  // Writes the observation into a preallocated buffer of observation size.
  void write(float* out) const;
  const PreprocessConfig& config() const noexcept { return config_; }

 private:
  PreprocessConfig config_;
  std::deque<std::vector<float>> planes_;
};

}  // namespace rlgan::envs
