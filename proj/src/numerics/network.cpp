#include "rlgan/numerics/network.hpp"

#include <cmath>

#include "rlgan/errors.hpp"

namespace rlgan::numerics {

namespace {

const std::string& layer_name(const Layer& layer) {
  return std::visit([](const auto& l) -> const std::string& { return l.name; }, layer);
}

// Shape after `layer` and the weight/bias shapes it owns.
struct LayerShapes {
  Shape out, weight, bias;
  std::size_t fan_in = 0, fan_out = 0;
};

LayerShapes layer_shapes(const Layer& layer, const Shape& in) {
  LayerShapes s;
  if (const auto* d = std::get_if<DenseLayer>(&layer)) {
    if (d->units == 0) throw ShapeError("dense layer '" + d->name + "' has zero units");
    const std::size_t features = shape_size(in);
    s.out = {d->units};
    s.weight = {d->units, features};
    s.bias = {d->units};
    s.fan_in = features;
    s.fan_out = d->units;
    return s;
  }
  const auto& c = std::get<ConvLayer>(layer);
  if (in.size() != 3)
    throw ShapeError("conv layer '" + c.name + "' needs (C, H, W) input, got " + shape_string(in));
  if (c.channels == 0 || c.kernel == 0) throw ShapeError("conv layer '" + c.name + "' is empty");
  const ConvGeometry g{c.stride, c.pad};
  s.out = {c.channels, conv_out_extent(in[1], c.kernel, g), conv_out_extent(in[2], c.kernel, g)};
  s.weight = {c.channels, in[0], c.kernel, c.kernel};
  s.bias = {c.channels};
  s.fan_in = in[0] * c.kernel * c.kernel;
  s.fan_out = c.channels * c.kernel * c.kernel;
  return s;
}

template <typename F>
void walk(const ArchSpec& spec, F&& visit) {
  Shape shape = spec.input;
  for (const auto& layer : spec.trunk) {
    auto s = layer_shapes(layer, shape);
    visit(layer, s);
    shape = s.out;
  }
  for (const auto& head : spec.heads) {
    Shape h = shape;
    for (const auto& layer : head.layers) {
      auto s = layer_shapes(layer, h);
      visit(layer, s);
      h = s.out;
    }
  }
}

}  // namespace

std::vector<Shape> output_shapes(const ArchSpec& spec) {
  if (spec.input.empty()) throw ShapeError("architecture has no input shape");
  std::vector<Shape> out;
  Shape shape = spec.input;
  for (const auto& layer : spec.trunk) shape = layer_shapes(layer, shape).out;
  out.push_back(shape);
  for (const auto& head : spec.heads) {
    Shape h = shape;
    for (const auto& layer : head.layers) h = layer_shapes(layer, h).out;
    out.push_back(h);
  }
  return out;
}

NetworkParams build_network(const ArchSpec& spec, const InitScheme& init, std::uint64_t seed) {
  output_shapes(spec);
  NetworkParams params;
  Rng rng(seed);
  walk(spec, [&](const Layer& layer, const LayerShapes& s) {
    const auto& name = layer_name(layer);
    params.add(name + ".w", init_weight<float>(s.weight, s.fan_in, s.fan_out, init, rng));
    params.add(name + ".b", init_bias<float>(s.bias, init));
  });
  return params;
}

template <typename T>
typename Graph<T>::Var apply_activation(Graph<T>& graph, typename Graph<T>::Var x, Activation a,
                                        double leaky_slope) {
  switch (a) {
    case Activation::none: return x;
    case Activation::relu: return graph.relu(x);
    case Activation::leaky_relu: return graph.leaky_relu(x, static_cast<T>(leaky_slope));
    case Activation::tanh: return graph.tanh(x);
    case Activation::sigmoid: return graph.sigmoid(x);
  }
  return x;
}

template <typename T>
NetworkOutputs<T> forward(Graph<T>& graph, const BasicParams<T>& params, const ArchSpec& spec,
                          typename Graph<T>::Var x) {
  const auto& in = graph.value(x).shape();
  if (in.size() != spec.input.size() + 1 || !std::equal(spec.input.begin(), spec.input.end(), in.begin() + 1))
    throw ShapeError("network expects (N, " + shape_string(spec.input) + "), got " + shape_string(in));

  auto apply = [&](const Layer& layer, typename Graph<T>::Var h) {
    const auto& name = layer_name(layer);
    auto w = graph.param(params, name + ".w");
    auto b = graph.param(params, name + ".b");
    if (const auto* d = std::get_if<DenseLayer>(&layer))
      return apply_activation(graph, graph.dense(h, w, b), d->activation, spec.leaky_slope);
    const auto& c = std::get<ConvLayer>(layer);
    return apply_activation(graph, graph.conv2d(h, w, b, {c.stride, c.pad}), c.activation,
                            spec.leaky_slope);
  };

  NetworkOutputs<T> out;
  auto h = x;
  for (const auto& layer : spec.trunk) h = apply(layer, h);
  out.trunk = h;
  for (const auto& head : spec.heads) {
    auto y = h;
    for (const auto& layer : head.layers) y = apply(layer, y);
    out.heads.push_back(y);
  }
  return out;
}

template <typename T>
LossAndGrads<T> forward_backward(const BasicParams<T>& params, const ArchSpec& spec,
                                 const BasicTensor<T>& input, const LossHead& head) {
  Graph<T> graph;
  auto x = graph.constant(input);
  auto outputs = forward(graph, params, spec, x);
  auto y = outputs.heads.empty() ? outputs.trunk : outputs.heads.front();

  typename Graph<T>::Var loss;
  if (const auto* se = std::get_if<SquaredErrorHead>(&head)) {
    const auto target = graph.constant(se->target.template cast<T>().reshaped(graph.value(y).shape()));
    loss = graph.mean(graph.square(graph.sub(y, target)));
  } else {
    const auto& labels = std::get<SoftmaxCrossEntropyHead>(head).labels;
    auto flat = graph.reshape(y, {graph.value(y).dim(0), graph.value(y).size() / graph.value(y).dim(0)});
    loss = graph.scale(graph.mean(graph.gather_rows(graph.log_softmax(flat), labels)), T(-1));
  }

  const T value = graph.value(loss).item();
  if (!std::isfinite(value)) {
    if (!input.all_finite()) throw NumericalError("input", "non-finite loss");
    for (const auto& e : params)
      if (!e.tensor.all_finite()) throw NumericalError(e.name, "non-finite loss");
    throw NumericalError("loss", "non-finite loss");
  }
  graph.backward(loss);
  return {value, graph.param_grads(params)};
}

template typename Graph<float>::Var apply_activation<float>(Graph<float>&, Graph<float>::Var,
                                                            Activation, double);
template typename Graph<double>::Var apply_activation<double>(Graph<double>&, Graph<double>::Var,
                                                              Activation, double);
template NetworkOutputs<float> forward<float>(Graph<float>&, const BasicParams<float>&,
                                              const ArchSpec&, Graph<float>::Var);
template NetworkOutputs<double> forward<double>(Graph<double>&, const BasicParams<double>&,
                                                const ArchSpec&, Graph<double>::Var);
template LossAndGrads<float> forward_backward<float>(const BasicParams<float>&, const ArchSpec&,
                                                     const BasicTensor<float>&, const LossHead&);
template LossAndGrads<double> forward_backward<double>(const BasicParams<double>&, const ArchSpec&,
                                                       const BasicTensor<double>&, const LossHead&);

}  // namespace rlgan::numerics
