#pragma once

#include <string>
#include <vector>

#include "rlgan/envs/frame.hpp"
#include "rlgan/numerics/graph.hpp"
#include "rlgan/numerics/init.hpp"
#include "rlgan/numerics/params.hpp"

namespace rlgan::translate {

using numerics::NetworkParams;
using numerics::Tensor;

enum class SharingMode { shared_inner, independent };

SharingMode parse_sharing_mode(const std::string& text);
std::string to_string(SharingMode m);

struct TranslatorConfig {
  std::size_t base_channels = 8;
  std::size_t res_blocks = 2;
  numerics::InitScheme init = numerics::InitScheme::xavier();
  SharingMode sharing = SharingMode::independent;
  double leaky_slope = 0.2;
};

// G1: target -> source, G2: source -> target; D1 judges target frames, D2
// source frames. Tensors are named "g1/<layer>.w" etc. In shared-inner mode
// G2's innermost layers (enc3, the residual blocks, dec1) resolve to G1's
// tensors, so there is exactly one copy of them.
struct TranslatorPair {
  TranslatorConfig config;
  NetworkParams params;
};

enum class Direction { target_to_source, source_to_target };

TranslatorPair make_translator(const TranslatorConfig& config, std::uint64_t seed);

// Full tensor name used by generator `which` (1 or 2) for `layer_tensor`
// such as "enc3.w".
std::string generator_tensor(const TranslatorConfig& config, int which, const std::string& layer_tensor);
// Layer tensors of one generator / discriminator, without prefix.
std::vector<std::string> generator_tensors(const TranslatorConfig& config);
std::vector<std::string> discriminator_tensors();
// Layer tensors resolved to G1 storage in shared-inner mode.
std::vector<std::string> shared_tensors(const TranslatorConfig& config);

bool is_generator_param(const std::string& name);
bool is_discriminator_param(const std::string& name);

// x: (N, 3, H, W). Output = x + tanh(residual), unclamped.
template <typename T>
typename numerics::Graph<T>::Var generator_forward(numerics::Graph<T>& g, const numerics::BasicParams<T>& params,
                                                   const TranslatorConfig& config, int which,
                                                   typename numerics::Graph<T>::Var x);
// Score map (N, 1, H/4, W/4).
template <typename T>
typename numerics::Graph<T>::Var discriminator_forward(numerics::Graph<T>& g,
                                                       const numerics::BasicParams<T>& params,
                                                       const TranslatorConfig& config, int which,
                                                       typename numerics::Graph<T>::Var x);

// Output clamped to [0, 1]. Frames must be RGB (3, H, W) with H, W divisible
// by 4.
envs::Frame translate(const TranslatorPair& pair, const envs::Frame& frame, Direction direction);
std::vector<envs::Frame> translate_batch(const TranslatorPair& pair, const std::vector<envs::Frame>& frames,
                                         Direction direction);

}  // namespace rlgan::translate
