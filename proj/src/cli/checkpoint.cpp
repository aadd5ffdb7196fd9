#include "rlgan/cli/checkpoint.hpp"

#include <fstream>

#include "rlgan/errors.hpp"
#include "rlgan/le_io.hpp"

namespace rlgan::cli {

using numerics::NetworkParams;
using numerics::Tensor;

namespace {

constexpr const char* kWhat = "RLGN checkpoint";

struct Contents {
  CheckpointKind kind = CheckpointKind::params;
  NetworkParams params;
  translate::TranslatorConfig translator;
  imitation::DemoBuffer demos;
};

void write(const std::filesystem::path& path, const NetworkParams& params, CheckpointKind kind,
           const translate::TranslatorConfig* translator, const imitation::DemoBuffer* demos = nullptr) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write("RLGN", 4);
  le::put<std::uint32_t>(os, kCheckpointVersion);
  le::put<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& e : params) {
    if (e.name.size() > 65535) throw ContractViolation("tensor name too long: " + e.name);
    if (e.tensor.rank() > 255) throw ContractViolation("tensor rank too large: " + e.name);
    le::put<std::uint16_t>(os, static_cast<std::uint16_t>(e.name.size()));
    os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    le::put<std::uint8_t>(os, static_cast<std::uint8_t>(e.tensor.rank()));
    for (auto d : e.tensor.shape()) le::put<std::uint32_t>(os, static_cast<std::uint32_t>(d));
    for (float v : e.tensor.data()) le::put_f32(os, v);
  }
  os.write("META", 4);
  le::put<std::uint8_t>(os, static_cast<std::uint8_t>(kind));
  for (const auto& e : params) le::put<std::uint8_t>(os, e.frozen ? 1 : 0);
  if (translator) {
    le::put<std::uint8_t>(os, translator->sharing == translate::SharingMode::shared_inner ? 1 : 0);
    le::put<std::uint32_t>(os, static_cast<std::uint32_t>(translator->base_channels));
    le::put<std::uint32_t>(os, static_cast<std::uint32_t>(translator->res_blocks));
    le::put_f64(os, translator->leaky_slope);
  }
  if (demos) {
    le::put<std::uint32_t>(os, static_cast<std::uint32_t>(demos->size()));
    le::put<std::uint8_t>(os, static_cast<std::uint8_t>(demos->observation_shape.size()));
    for (auto d : demos->observation_shape) le::put<std::uint32_t>(os, static_cast<std::uint32_t>(d));
    le::put_f64(os, demos->reference);
    const std::size_t m = demos->observation_size();
    for (std::size_t i = 0; i < demos->size(); ++i) {
      os.write(reinterpret_cast<const char*>(demos->observations.data() + i * m), static_cast<std::streamsize>(m));
      le::put<std::uint8_t>(os, static_cast<std::uint8_t>(demos->actions[i]));
      le::put_f32(os, demos->returns[i]);
    }
    for (double s : demos->source_scores) le::put_f64(os, s);
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

Contents read(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "RLGN")
    throw CorruptCheckpointError("not an RLGN checkpoint: " + path.string());
  const auto version = le::get<std::uint32_t>(is, kWhat);
  if (version != kCheckpointVersion)
    throw CorruptCheckpointError("unsupported RLGN version " + std::to_string(version));
  const auto count = le::get<std::uint32_t>(is, kWhat);

  Contents c;
  std::vector<std::string> names;
  for (std::uint32_t k = 0; k < count; ++k) {
    std::string name(le::get<std::uint16_t>(is, kWhat), '\0');
    if (!is.read(name.data(), static_cast<std::streamsize>(name.size())))
      throw CorruptCheckpointError("RLGN checkpoint truncated in tensor name");
    numerics::Shape shape(le::get<std::uint8_t>(is, kWhat));
    for (auto& d : shape) d = le::get<std::uint32_t>(is, kWhat);
    Tensor t(shape);
    for (auto& v : t.data()) v = le::get_f32(is, kWhat);
    if (c.params.contains(name)) throw CorruptCheckpointError("duplicate tensor " + name);
    c.params.add(name, std::move(t));
    names.push_back(std::move(name));
  }
  if (!is.read(magic, 4) || std::string(magic, 4) != "META")
    throw CorruptCheckpointError("RLGN checkpoint is missing its metadata block");
  const auto kind = le::get<std::uint8_t>(is, kWhat);
  if (kind > 2) throw CorruptCheckpointError("unknown RLGN checkpoint kind " + std::to_string(kind));
  c.kind = static_cast<CheckpointKind>(kind);
  for (const auto& name : names) c.params.set_frozen(name, le::get<std::uint8_t>(is, kWhat) != 0);
  if (c.kind == CheckpointKind::translator) {
    c.translator.sharing = le::get<std::uint8_t>(is, kWhat) ? translate::SharingMode::shared_inner
                                                             : translate::SharingMode::independent;
    c.translator.base_channels = le::get<std::uint32_t>(is, kWhat);
    c.translator.res_blocks = le::get<std::uint32_t>(is, kWhat);
    c.translator.leaky_slope = le::get_f64(is, kWhat);
  }
  if (c.kind == CheckpointKind::demos) {
    auto& d = c.demos;
    const auto n = le::get<std::uint32_t>(is, kWhat);
    d.observation_shape.resize(le::get<std::uint8_t>(is, kWhat));
    for (auto& x : d.observation_shape) x = le::get<std::uint32_t>(is, kWhat);
    d.reference = le::get_f64(is, kWhat);
    const std::size_t m = d.observation_size();
    d.observations.resize(std::size_t(n) * m);
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!is.read(reinterpret_cast<char*>(d.observations.data() + i * m), static_cast<std::streamsize>(m)))
        throw CorruptCheckpointError("RLGN demo buffer truncated");
      d.actions.push_back(le::get<std::uint8_t>(is, kWhat));
      d.returns.push_back(le::get_f32(is, kWhat));
    }
    for (std::uint32_t i = 0; i < n; ++i) d.source_scores.push_back(le::get_f64(is, kWhat));
    try {
      d.validate();
    } catch (const ContractViolation& e) {
      throw CorruptCheckpointError(std::string("RLGN demo buffer: ") + e.what());
    }
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw CorruptCheckpointError("trailing bytes after RLGN checkpoint");
  return c;
}

}  // namespace

void save_checkpoint(const NetworkParams& params, const std::filesystem::path& path) {
  write(path, params, CheckpointKind::params, nullptr);
}

void save_checkpoint(const translate::TranslatorPair& pair, const std::filesystem::path& path) {
  write(path, pair.params, CheckpointKind::translator, &pair.config);
}

CheckpointKind checkpoint_kind(const std::filesystem::path& path) { return read(path).kind; }

NetworkParams load_params(const std::filesystem::path& path) {
  auto c = read(path);
  if (c.kind != CheckpointKind::params)
    throw ConfigError(path.string() + " does not hold network parameters");
  return std::move(c.params);
}

translate::TranslatorPair load_translator(const std::filesystem::path& path) {
  auto c = read(path);
  if (c.kind != CheckpointKind::translator)
    throw ConfigError(path.string() + " does not hold a translator");
  // Tensors must be exactly those of the recorded architecture.
  const auto expected = translate::make_translator(c.translator, 0).params;
  if (expected.names() != c.params.names())
    throw CorruptCheckpointError(path.string() + ": tensors do not match the recorded translator architecture");
  for (const auto& name : expected.names())
    if (expected.get(name).shape() != c.params.get(name).shape())
      throw CorruptCheckpointError(path.string() + ": tensor " + name + " has the wrong shape");
  return {c.translator, std::move(c.params)};
}

void save_demos(const imitation::DemoBuffer& buffer, const std::filesystem::path& path) {
  buffer.validate();
  write(path, NetworkParams{}, CheckpointKind::demos, nullptr, &buffer);
}

imitation::DemoBuffer load_demos(const std::filesystem::path& path) {
  auto c = read(path);
  if (c.kind != CheckpointKind::demos) throw ConfigError(path.string() + " does not hold a demo buffer");
  return std::move(c.demos);
}

}  // namespace rlgan::cli
