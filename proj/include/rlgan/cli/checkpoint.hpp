#pragma once

#include <cstdint>
#include <filesystem>

#include "rlgan/imitation/demos.hpp"
#include "rlgan/numerics/params.hpp"
#include "rlgan/translate/translator.hpp"

namespace rlgan::cli {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// What the trailing metadata block says the tensors are.
enum class CheckpointKind : std::uint8_t { params = 0, translator = 1, demos = 2 };

// "RLGN" container: header, tensors (name, dims, f32 payload), then a
// metadata block with per-tensor frozen flags and, for translators, the
// architecture including the sharing mode.
void save_checkpoint(const numerics::NetworkParams& params, const std::filesystem::path& path);
void save_checkpoint(const translate::TranslatorPair& pair, const std::filesystem::path& path);

CheckpointKind checkpoint_kind(const std::filesystem::path& path);
numerics::NetworkParams load_params(const std::filesystem::path& path);
translate::TranslatorPair load_translator(const std::filesystem::path& path);

// Same container with no tensors; the metadata block carries the triple
// count, observation shape and R_T, followed by packed (observation bytes,
// action u8, return f32) records and the per-triple source scores.
void save_demos(const imitation::DemoBuffer& buffer, const std::filesystem::path& path);
imitation::DemoBuffer load_demos(const std::filesystem::path& path);

}  // namespace rlgan::cli
