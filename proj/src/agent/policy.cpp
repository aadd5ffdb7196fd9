#include "rlgan/agent/policy.hpp"

#include <cmath>

#include "rlgan/errors.hpp"

namespace rlgan::agent {

using namespace numerics;

ArchSpec policy_arch(const Shape& observation_shape, std::size_t actions) {
  ArchSpec a;
  a.input = observation_shape;
  a.trunk = {
      ConvLayer{"conv1", 16, 8, 4, 0, Activation::relu},
      ConvLayer{"conv2", 32, 4, 2, 0, Activation::relu},
      ConvLayer{"conv3", 32, 3, 1, 0, Activation::relu},
      DenseLayer{"fc", 256, Activation::relu},
  };
  a.heads = {HeadSpec{"pi", {DenseLayer{"pi", actions, Activation::none}}},
             HeadSpec{"v", {DenseLayer{"v", 1, Activation::none}}}};
  return a;
}

NetworkParams init_policy(const ArchSpec& arch, std::uint64_t seed, const InitScheme& scheme) {
  if (scheme.kind != InitScheme::Kind::orthogonal) return build_network(arch, scheme, seed);
  NetworkParams p = build_network(arch, InitScheme::orthogonal(std::sqrt(2.0) * scheme.value), seed);
  auto rescale = [&](const std::string& name, double gain) {
    auto& w = p.get(name);
    const float f = static_cast<float>(gain / std::sqrt(2.0));
    for (float& x : w.data()) x *= f;
  };
  rescale("pi.w", 0.01 * scheme.value);
  rescale("v.w", scheme.value);
  return p;
}

std::vector<PolicyOutput> policy_forward(const ArchSpec& arch, const NetworkParams& params,
                                         const Tensor& observations) {
  Graph<float> g(false);
  auto x = g.constant(observations);
  auto out = forward(g, params, arch, x);
  const Tensor probs = g.value(g.softmax(out.heads.at(0)));
  const Tensor& values = g.value(out.heads.at(1));
  const std::size_t n = probs.dim(0), k = probs.dim(1);
  std::vector<PolicyOutput> result(n);
  for (std::size_t i = 0; i < n; ++i) {
    result[i].probs.assign(probs.raw() + i * k, probs.raw() + (i + 1) * k);
    result[i].value = values[i];
  }
  return result;
}

int select_action(const PolicyOutput& out, ActMode mode, double u) {
  for (float p : out.probs)
    if (!std::isfinite(p)) throw NumericalError("pi", "non-finite action probability");
  if (!std::isfinite(out.value)) throw NumericalError("v", "non-finite state value");
  const int k = static_cast<int>(out.probs.size());
  if (mode == ActMode::deterministic) {
    int best = 0;
    for (int a = 1; a < k; ++a)
      if (out.probs[a] > out.probs[best]) best = a;
    return best;
  }
  double acc = 0;
  for (int a = 0; a < k; ++a) {
    acc += out.probs[a];
    if (u < acc) return a;
  }
  // Rounding left u beyond the cumulative sum: last action with mass.
  for (int a = k - 1; a >= 0; --a)
    if (out.probs[a] > 0) return a;
  return k - 1;
}

ActResult act(const ArchSpec& arch, const NetworkParams& params, const Tensor& observation, ActMode mode,
              Rng& rng) {
  Shape batched{1};
  batched.insert(batched.end(), observation.shape().begin(), observation.shape().end());
  ActResult r;
  r.output = policy_forward(arch, params, observation.reshaped(batched)).front();
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  r.action = select_action(r.output, mode, u);
  return r;
}

double entropy(const std::vector<float>& probs) {
  double h = 0;
  for (float p : probs)
    if (p > 0) h -= p * std::log(double(p));
  return h;
}

}  // namespace rlgan::agent
