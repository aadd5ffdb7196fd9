#pragma once

#include <cstdint>
#include <random>

#include "rlgan/numerics/tensor.hpp"

namespace rlgan::numerics {

using Rng = std::mt19937_64;

struct InitScheme {
  enum class Kind { xavier, orthogonal, constant };
  Kind kind = Kind::xavier;
  // constant: the fill value; orthogonal: the gain.
  double value = 1.0;

  static InitScheme xavier() { return {Kind::xavier, 0.0}; }
  static InitScheme orthogonal(double gain = 1.0) { return {Kind::orthogonal, gain}; }
  static InitScheme constant(double c) { return {Kind::constant, c}; }
};

InitScheme parse_init_scheme(const std::string& text);
std::string to_string(const InitScheme& scheme);

// Weight tensor of any rank >= 2; the leading axis is treated as fan_out rows
// for orthogonal draws. Xavier draws are normal with variance
// 2 / (fan_in + fan_out).
template <typename T>
BasicTensor<T> init_weight(const Shape& shape, std::size_t fan_in, std::size_t fan_out,
                           const InitScheme& scheme, Rng& rng);

template <typename T>
BasicTensor<T> init_bias(const Shape& shape, const InitScheme& scheme);

// Mixes a base seed with a stream id (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace rlgan::numerics
