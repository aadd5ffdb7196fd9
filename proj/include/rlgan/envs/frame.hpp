#pragma once

#include <cstdint>

#include "rlgan/numerics/tensor.hpp"

namespace rlgan::envs {

// RGB frame (3, H, W) with values in [0, 1]. Rendered frames hold exact
// multiples of 1/255 so they survive 8-bit storage losslessly.
using Frame = numerics::Tensor;

inline constexpr std::size_t kFrameSize = 84;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

// Clipped rectangle painter over a (3, H, W) frame.
class Canvas {
 public:
  explicit Canvas(std::size_t height = kFrameSize, std::size_t width = kFrameSize);

  void fill(Rgb color);
  void rect(long x, long y, long w, long h, Rgb color);
  void pixel(long x, long y, Rgb color);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  Frame release() { return std::move(frame_); }

 private:
  std::size_t height_, width_;
  Frame frame_;
};

}  // namespace rlgan::envs
