#pragma once

#include <string>

#include "rlgan/agent/policy.hpp"

namespace rlgan::agent {

enum class FinetuneSetting { from_scratch, full_ft, random_output, partial_ft, partial_random_ft };

FinetuneSetting parse_finetune_setting(const std::string& text);
std::string to_string(FinetuneSetting s);

//   from-scratch       all tensors freshly initialized
//   full-ft            copy of source, nothing frozen
//   random-output      copy of source, output layers re-initialized
//   partial-ft         copy of source, first three conv layers frozen
//   partial-random-ft  first three conv layers copied and frozen, rest fresh
// Architecture mismatch raises ConfigError.
NetworkParams apply_finetune_setting(const numerics::ArchSpec& arch, const NetworkParams& source,
                                     FinetuneSetting setting, std::uint64_t seed);

// Names of the tensors owned by the first three conv layers / output layers.
bool is_conv_tensor(const std::string& name);
bool is_output_tensor(const std::string& name);

}  // namespace rlgan::agent
