#include "rlgan/translate/translator.hpp"

#include <algorithm>

#include "rlgan/errors.hpp"

namespace rlgan::translate {

using namespace numerics;

namespace {

struct ConvDef {
  std::string name;
  std::size_t in, out, kernel, stride, pad;
  bool transpose;
};

std::vector<ConvDef> generator_layers(const TranslatorConfig& c) {
  const std::size_t b = c.base_channels;
  std::vector<ConvDef> l{{"enc1", 3, b, 3, 1, 1, false},
                         {"enc2", b, 2 * b, 4, 2, 1, false},
                         {"enc3", 2 * b, 4 * b, 4, 2, 1, false}};
  for (std::size_t r = 0; r < c.res_blocks; ++r) {
    l.push_back({"res" + std::to_string(r + 1) + "a", 4 * b, 4 * b, 3, 1, 1, false});
    l.push_back({"res" + std::to_string(r + 1) + "b", 4 * b, 4 * b, 3, 1, 1, false});
  }
  l.push_back({"dec1", 4 * b, 2 * b, 4, 2, 1, true});
  l.push_back({"dec2", 2 * b, b, 4, 2, 1, true});
  l.push_back({"out", b, 3, 3, 1, 1, false});
  return l;
}

std::vector<ConvDef> discriminator_layers(const TranslatorConfig& c) {
  const std::size_t b = c.base_channels;
  return {{"c1", 3, b, 4, 2, 1, false}, {"c2", b, 2 * b, 4, 2, 1, false}, {"c3", 2 * b, 1, 3, 1, 1, false}};
}

bool is_inner(const std::string& layer) {
  return layer == "enc3" || layer == "dec1" || layer.rfind("res", 0) == 0;
}

std::string layer_of(const std::string& layer_tensor) { return layer_tensor.substr(0, layer_tensor.find('.')); }

void add_layers(NetworkParams& p, const std::string& prefix, const std::vector<ConvDef>& layers,
                const InitScheme& init, Rng& rng, const TranslatorConfig& config, bool skip_shared) {
  for (const auto& l : layers) {
    if (skip_shared && config.sharing == SharingMode::shared_inner && is_inner(l.name)) continue;
    const std::size_t kk = l.kernel * l.kernel;
    // Drawn in forward-conv layout (out, in, k, k); transposed layers store
    // the same kernel as (in, out, k, k).
    Tensor f = init_weight<float>({l.out, l.in, l.kernel, l.kernel}, l.in * kk, l.out * kk, init, rng);
    Tensor w = f;
    if (l.transpose) {
      w = Tensor({l.in, l.out, l.kernel, l.kernel});
      for (std::size_t o = 0; o < l.out; ++o)
        for (std::size_t i = 0; i < l.in; ++i)
          for (std::size_t k = 0; k < kk; ++k) w[(i * l.out + o) * kk + k] = f[(o * l.in + i) * kk + k];
    }
    p.add(prefix + l.name + ".w", std::move(w));
    p.add(prefix + l.name + ".b", init_bias<float>({l.out}, init));
  }
}

template <typename T>
using V = typename Graph<T>::Var;

template <typename T>
V<T> conv(Graph<T>& g, const BasicParams<T>& p, const std::string& w, const std::string& b, const ConvDef& l,
          V<T> x) {
  const ConvGeometry geo{l.stride, l.pad};
  return l.transpose ? g.conv_transpose2d(x, g.param(p, w), g.param(p, b), geo)
                     : g.conv2d(x, g.param(p, w), g.param(p, b), geo);
}

void check_frame(const Tensor& f) {
  if (f.rank() != 3 || f.dim(0) != 3)
    throw ContractViolation("translator expects an RGB (3, H, W) frame, got " + shape_string(f.shape()));
  if (f.dim(1) % 4 || f.dim(2) % 4)
    throw ContractViolation("translator frame extents must be divisible by 4, got " + shape_string(f.shape()));
}

}  // namespace

SharingMode parse_sharing_mode(const std::string& text) {
  if (text == "shared-inner") return SharingMode::shared_inner;
  if (text == "independent") return SharingMode::independent;
  throw ConfigError("unknown sharing mode '" + text + "' (expected shared-inner or independent)");
}

std::string to_string(SharingMode m) { return m == SharingMode::shared_inner ? "shared-inner" : "independent"; }

std::string generator_tensor(const TranslatorConfig& config, int which, const std::string& layer_tensor) {
  if (which != 1 && which != 2) throw ContractViolation("generator index must be 1 or 2");
  if (which == 2 && config.sharing == SharingMode::shared_inner && is_inner(layer_of(layer_tensor)))
    return "g1/" + layer_tensor;
  return "g" + std::to_string(which) + "/" + layer_tensor;
}

std::vector<std::string> generator_tensors(const TranslatorConfig& config) {
  std::vector<std::string> out;
  for (const auto& l : generator_layers(config)) {
    out.push_back(l.name + ".w");
    out.push_back(l.name + ".b");
  }
  return out;
}

std::vector<std::string> discriminator_tensors() {
  std::vector<std::string> out;
  for (const auto& l : discriminator_layers({})) {
    out.push_back(l.name + ".w");
    out.push_back(l.name + ".b");
  }
  return out;
}

std::vector<std::string> shared_tensors(const TranslatorConfig& config) {
  std::vector<std::string> out;
  if (config.sharing != SharingMode::shared_inner) return out;
  for (const auto& t : generator_tensors(config))
    if (is_inner(layer_of(t))) out.push_back(t);
  return out;
}

bool is_generator_param(const std::string& name) { return name.rfind("g1/", 0) == 0 || name.rfind("g2/", 0) == 0; }
bool is_discriminator_param(const std::string& name) {
  return name.rfind("d1/", 0) == 0 || name.rfind("d2/", 0) == 0;
}

TranslatorPair make_translator(const TranslatorConfig& config, std::uint64_t seed) {
  if (config.base_channels == 0) throw ConfigError("translator base channels must be positive");
  TranslatorPair pair{config, {}};
  Rng rng(seed);
  add_layers(pair.params, "g1/", generator_layers(config), config.init, rng, config, false);
  add_layers(pair.params, "g2/", generator_layers(config), config.init, rng, config, true);
  add_layers(pair.params, "d1/", discriminator_layers(config), config.init, rng, config, false);
  add_layers(pair.params, "d2/", discriminator_layers(config), config.init, rng, config, false);
  return pair;
}

template <typename T>
V<T> generator_forward(Graph<T>& g, const BasicParams<T>& p, const TranslatorConfig& c, int which, V<T> x) {
  const auto layers = generator_layers(c);
  auto run = [&](const ConvDef& l, V<T> in) {
    return conv(g, p, generator_tensor(c, which, l.name + ".w"), generator_tensor(c, which, l.name + ".b"), l, in);
  };
  std::size_t i = 0;
  V<T> h = x;
  for (; i < 3; ++i) h = g.relu(run(layers[i], h));
  for (std::size_t r = 0; r < c.res_blocks; ++r, i += 2) {
    V<T> inner = g.relu(run(layers[i], h));
    h = g.add(h, run(layers[i + 1], inner));
  }
  h = g.relu(run(layers[i++], h));
  h = g.relu(run(layers[i++], h));
  return g.add(x, g.tanh(run(layers[i], h)));
}

template <typename T>
V<T> discriminator_forward(Graph<T>& g, const BasicParams<T>& p, const TranslatorConfig& c, int which, V<T> x) {
  if (which != 1 && which != 2) throw ContractViolation("discriminator index must be 1 or 2");
  const std::string prefix = "d" + std::to_string(which) + "/";
  const auto layers = discriminator_layers(c);
  V<T> h = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    h = conv(g, p, prefix + layers[i].name + ".w", prefix + layers[i].name + ".b", layers[i], h);
    if (i + 1 < layers.size()) h = g.leaky_relu(h, static_cast<T>(c.leaky_slope));
  }
  return h;
}

template V<float> generator_forward<float>(Graph<float>&, const BasicParams<float>&, const TranslatorConfig&, int,
                                           V<float>);
template V<double> generator_forward<double>(Graph<double>&, const BasicParams<double>&, const TranslatorConfig&,
                                             int, V<double>);
template V<float> discriminator_forward<float>(Graph<float>&, const BasicParams<float>&, const TranslatorConfig&,
                                               int, V<float>);
template V<double> discriminator_forward<double>(Graph<double>&, const BasicParams<double>&,
                                                 const TranslatorConfig&, int, V<double>);

std::vector<envs::Frame> translate_batch(const TranslatorPair& pair, const std::vector<envs::Frame>& frames,
                                         Direction direction) {
  if (frames.empty()) return {};
  const Shape fs = frames.front().shape();
  check_frame(frames.front());
  const std::size_t size = frames.front().size();
  Tensor batch({frames.size(), fs[0], fs[1], fs[2]});
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].shape() != fs) throw ContractViolation("translate_batch: frames differ in shape");
    std::copy(frames[i].raw(), frames[i].raw() + size, batch.raw() + i * size);
  }
  Graph<float> g(false);
  const int which = direction == Direction::target_to_source ? 1 : 2;
  const Tensor& y = g.value(generator_forward(g, pair.params, pair.config, which, g.constant(std::move(batch))));
  std::vector<envs::Frame> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    envs::Frame f(fs);
    for (std::size_t k = 0; k < size; ++k) f[k] = std::clamp(y[i * size + k], 0.0f, 1.0f);
    out.push_back(std::move(f));
  }
  return out;
}

envs::Frame translate(const TranslatorPair& pair, const envs::Frame& frame, Direction direction) {
  check_frame(frame);
  return translate_batch(pair, {frame}, direction).front();
}

}  // namespace rlgan::translate
