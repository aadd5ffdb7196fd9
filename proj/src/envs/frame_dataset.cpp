#include "rlgan/envs/frame_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "rlgan/errors.hpp"
#include "rlgan/le_io.hpp"

namespace rlgan::envs {

void write_frames(const std::filesystem::path& path, const std::vector<Frame>& frames) {
  if (frames.empty()) throw ContractViolation("frame dataset must not be empty");
  const auto shape = frames.front().shape();
  if (shape.size() != 3 || shape[0] > 255 || shape[1] > 65535 || shape[2] > 65535)
    throw ContractViolation("frames must be (C, H, W) with C < 256 and H, W < 65536");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write("RLGF", 4);
  le::put<std::uint32_t>(os, kFrameDatasetVersion);
  le::put<std::uint32_t>(os, static_cast<std::uint32_t>(frames.size()));
  le::put<std::uint8_t>(os, static_cast<std::uint8_t>(shape[0]));
  le::put<std::uint16_t>(os, static_cast<std::uint16_t>(shape[1]));
  le::put<std::uint16_t>(os, static_cast<std::uint16_t>(shape[2]));
  std::vector<unsigned char> bytes(frames.front().size());
  for (const auto& f : frames) {
    if (f.shape() != shape) throw ContractViolation("all frames in a dataset must share one shape");
    for (std::size_t i = 0; i < f.size(); ++i)
      bytes[i] = static_cast<unsigned char>(std::clamp(std::lround(f[i] * 255.0f), 0L, 255L));
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::vector<Frame> read_frames(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "RLGF", 4) != 0)
    throw CorruptCheckpointError("not an RLGF frame dataset: " + path.string());
  const auto version = le::get<std::uint32_t>(is, "RLGF header");
  if (version != kFrameDatasetVersion)
    throw CorruptCheckpointError("unsupported RLGF version " + std::to_string(version));
  const auto count = le::get<std::uint32_t>(is, "RLGF header");
  const auto c = le::get<std::uint8_t>(is, "RLGF header");
  const auto h = le::get<std::uint16_t>(is, "RLGF header");
  const auto w = le::get<std::uint16_t>(is, "RLGF header");
  if (count == 0 || c == 0 || h == 0 || w == 0) throw CorruptCheckpointError("empty RLGF dataset");
  std::vector<Frame> frames;
  frames.reserve(count);
  std::vector<unsigned char> bytes(std::size_t(c) * h * w);
  for (std::uint32_t k = 0; k < count; ++k) {
    if (!is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
      throw CorruptCheckpointError("RLGF dataset truncated at frame " + std::to_string(k));
    Frame f({c, h, w});
    for (std::size_t i = 0; i < bytes.size(); ++i) f[i] = bytes[i] / 255.0f;
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace rlgan::envs
