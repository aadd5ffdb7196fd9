#pragma once

#include <filesystem>
#include <vector>

#include "rlgan/envs/frame.hpp"

namespace rlgan::envs {

// "RLGF" frame-dataset file:
//   magic "RLGF" | version u32 LE | count u32 LE | channels u8 | height u16 LE
//   | width u16 LE | count * channels*height*width bytes (round(pixel * 255))
inline constexpr std::uint32_t kFrameDatasetVersion = 1;

void write_frames(const std::filesystem::path& path, const std::vector<Frame>& frames);
std::vector<Frame> read_frames(const std::filesystem::path& path);

}  // namespace rlgan::envs
