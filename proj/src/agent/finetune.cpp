#include "rlgan/agent/finetune.hpp"

#include "rlgan/errors.hpp"

namespace rlgan::agent {

namespace {

bool owned_by(const std::string& name, const std::string& layer) {
  return name == layer + ".w" || name == layer + ".b";
}

}  // namespace

FinetuneSetting parse_finetune_setting(const std::string& text) {
  if (text == "from-scratch") return FinetuneSetting::from_scratch;
  if (text == "full-ft") return FinetuneSetting::full_ft;
  if (text == "random-output") return FinetuneSetting::random_output;
  if (text == "partial-ft") return FinetuneSetting::partial_ft;
  if (text == "partial-random-ft") return FinetuneSetting::partial_random_ft;
  throw ConfigError("unknown fine-tuning setting '" + text + "'");
}

std::string to_string(FinetuneSetting s) {
  switch (s) {
    case FinetuneSetting::from_scratch: return "from-scratch";
    case FinetuneSetting::full_ft: return "full-ft";
    case FinetuneSetting::random_output: return "random-output";
    case FinetuneSetting::partial_ft: return "partial-ft";
    case FinetuneSetting::partial_random_ft: return "partial-random-ft";
  }
  return "?";
}

bool is_conv_tensor(const std::string& name) {
  for (const char* l : kConvLayers)
    if (owned_by(name, l)) return true;
  return false;
}

bool is_output_tensor(const std::string& name) {
  for (const char* l : kOutputLayers)
    if (owned_by(name, l)) return true;
  return false;
}

NetworkParams apply_finetune_setting(const numerics::ArchSpec& arch, const NetworkParams& source,
                                     FinetuneSetting setting, std::uint64_t seed) {
  NetworkParams fresh = init_policy(arch, seed);
  if (fresh.names() != source.names())
    throw ConfigError("source parameters do not match the policy architecture");
  for (const auto& e : fresh)
    if (e.tensor.shape() != source.get(e.name).shape())
      throw ConfigError("source tensor '" + e.name + "' has shape " +
                        numerics::shape_string(source.get(e.name).shape()) + ", architecture expects " +
                        numerics::shape_string(e.tensor.shape()));

  NetworkParams out;
  for (const auto& e : fresh) {
    const auto& src = source.get(e.name);
    bool copy = false, frozen = false;
    switch (setting) {
      case FinetuneSetting::from_scratch: break;
      case FinetuneSetting::full_ft: copy = true; break;
      case FinetuneSetting::random_output: copy = !is_output_tensor(e.name); break;
      case FinetuneSetting::partial_ft:
        copy = true;
        frozen = is_conv_tensor(e.name);
        break;
      case FinetuneSetting::partial_random_ft:
        copy = frozen = is_conv_tensor(e.name);
        break;
    }
    out.add(e.name, copy ? src : e.tensor, frozen);
  }
  return out;
}

}  // namespace rlgan::agent
