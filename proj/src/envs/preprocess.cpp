#include "rlgan/envs/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "rlgan/errors.hpp"

namespace rlgan::envs {

void grayscale_plane(const Frame& frame, std::size_t height, std::size_t width, float* out) {
  if (frame.rank() != 3 || frame.dim(0) != 3)
    throw ContractViolation("preprocess expects an RGB (3, H, W) frame, got " +
                            numerics::shape_string(frame.shape()));
  const std::size_t fh = frame.dim(1), fw = frame.dim(2), plane = fh * fw;
  const float* r = frame.raw();
  const float* g = r + plane;
  const float* b = g + plane;
  for (std::size_t y = 0; y < height; ++y) {
    const std::size_t sy = y * fh / height;
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t i = sy * fw + x * fw / width;
      const double lum = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
      out[y * width + x] = static_cast<float>(std::clamp(std::round(lum * 255.0), 0.0, 255.0) / 255.0);
    }
  }
}

Observation preprocess(std::span<const Frame> history, const PreprocessConfig& config) {
  if (history.empty()) throw ContractViolation("preprocess needs at least one frame");
  FrameStack stack(config);
  stack.reset(history.front());
  for (std::size_t i = 1; i < history.size(); ++i) stack.push(history[i]);
  return stack.observation();
}

FrameStack::FrameStack(PreprocessConfig config) : config_(config) {
  if (config_.stack == 0 || config_.height == 0 || config_.width == 0)
    throw ConfigError("observation extents must be positive");
}

void FrameStack::reset(const Frame& first) {
  planes_.clear();
  std::vector<float> plane(config_.height * config_.width);
  grayscale_plane(first, config_.height, config_.width, plane.data());
  for (std::size_t i = 0; i < config_.stack; ++i) planes_.push_back(plane);
}

void FrameStack::push(const Frame& frame) {
  if (planes_.empty()) {
    reset(frame);
    return;
  }
  std::vector<float> plane = std::move(planes_.front());
  planes_.pop_front();
  grayscale_plane(frame, config_.height, config_.width, plane.data());
  planes_.push_back(std::move(plane));
}

void FrameStack::write(float* out) const {
  if (planes_.empty()) throw ContractViolation("FrameStack used before reset()");
  const std::size_t n = config_.height * config_.width;
  for (std::size_t i = 0; i < planes_.size(); ++i)
    std::copy(planes_[i].begin(), planes_[i].end(), out + i * n);
}

Observation FrameStack::observation() const {
  Observation obs(config_.observation_shape());
  write(obs.raw());
  return obs;
}

}  // namespace rlgan::envs
