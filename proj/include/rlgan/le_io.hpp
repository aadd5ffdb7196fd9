#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "rlgan/errors.hpp"

namespace rlgan::le {

template <typename U>
void put(std::ostream& os, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

// `what` names the file kind in the truncation message.
template <typename U>
U get(std::istream& is, const char* what) {
  unsigned char bytes[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U)))
    throw CorruptCheckpointError(std::string(what) + " truncated");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(U(bytes[i]) << (8 * i));
  return value;
}

inline void put_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put(os, bits);
}

inline float get_f32(std::istream& is, const char* what) {
  const auto bits = get<std::uint32_t>(is, what);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

inline void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put(os, bits);
}

inline double get_f64(std::istream& is, const char* what) {
  const auto bits = get<std::uint64_t>(is, what);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace rlgan::le
