#include "rlgan/envs/frame.hpp"

#include <algorithm>

namespace rlgan::envs {

Canvas::Canvas(std::size_t height, std::size_t width)
    : height_(height), width_(width), frame_({3, height, width}) {}

void Canvas::fill(Rgb color) { rect(0, 0, long(width_), long(height_), color); }

void Canvas::rect(long x, long y, long w, long h, Rgb color) {
  const long x0 = std::max(0L, x), y0 = std::max(0L, y);
  const long x1 = std::min(long(width_), x + w), y1 = std::min(long(height_), y + h);
  if (x0 >= x1 || y0 >= y1) return;
  const float c[3] = {color.r / 255.0f, color.g / 255.0f, color.b / 255.0f};
  const std::size_t plane = height_ * width_;
  for (std::size_t ch = 0; ch < 3; ++ch)
    for (long yy = y0; yy < y1; ++yy) {
      float* row = frame_.raw() + ch * plane + std::size_t(yy) * width_;
      std::fill(row + x0, row + x1, c[ch]);
    }
}

void Canvas::pixel(long x, long y, Rgb color) { rect(x, y, 1, 1, color); }

}  // namespace rlgan::envs
