#pragma once

#include <string>
#include <variant>
#include <vector>

#include "rlgan/numerics/graph.hpp"
#include "rlgan/numerics/init.hpp"
#include "rlgan/numerics/params.hpp"

namespace rlgan::numerics {

enum class Activation { none, relu, leaky_relu, tanh, sigmoid };

struct DenseLayer {
  std::string name;
  std::size_t units = 0;
  Activation activation = Activation::none;
};

struct ConvLayer {
  std::string name;
  std::size_t channels = 0;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t pad = 0;
  Activation activation = Activation::none;
};

using Layer = std::variant<DenseLayer, ConvLayer>;

struct HeadSpec {
  std::string name;
  std::vector<Layer> layers;
};

// A sequential trunk followed by zero or more parallel heads. Each layer owns
// "<name>.w" and "<name>.b".
struct ArchSpec {
  Shape input;  // per-sample shape, e.g. {4, 84, 84}
  std::vector<Layer> trunk;
  std::vector<HeadSpec> heads;
  double leaky_slope = 0.2;
};

// Per-sample output shapes: trunk output then each head.
std::vector<Shape> output_shapes(const ArchSpec& spec);

NetworkParams build_network(const ArchSpec& spec, const InitScheme& init, std::uint64_t seed);

template <typename T>
struct NetworkOutputs {
  typename Graph<T>::Var trunk;
  std::vector<typename Graph<T>::Var> heads;
};

// x is a batch: (N, spec.input...).
template <typename T>
NetworkOutputs<T> forward(Graph<T>& graph, const BasicParams<T>& params, const ArchSpec& spec,
                          typename Graph<T>::Var x);

template <typename T>
typename Graph<T>::Var apply_activation(Graph<T>& graph, typename Graph<T>::Var x, Activation a,
                                        double leaky_slope);

// Loss applied to the first head (or the trunk when there are no heads).
struct SquaredErrorHead {
  Tensor target;  // same shape as the network output
};
struct SoftmaxCrossEntropyHead {
  std::vector<int> labels;
};
using LossHead = std::variant<SquaredErrorHead, SoftmaxCrossEntropyHead>;

template <typename T>
struct LossAndGrads {
  T loss = 0;
  BasicGradients<T> grads;
};

// Throws NumericalError naming the first non-finite tensor (inputs, params,
// then "loss") when the loss is not finite.
template <typename T>
LossAndGrads<T> forward_backward(const BasicParams<T>& params, const ArchSpec& spec,
                                 const BasicTensor<T>& input, const LossHead& head);

}  // namespace rlgan::numerics
