#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rlgan/numerics/params.hpp"
#include "rlgan/numerics/tensor.hpp"

namespace rlgan::numerics {

struct ConvGeometry {
  std::size_t stride = 1;
  std::size_t pad = 0;
};

// Output extent of a strided convolution / its transpose along one axis.
std::size_t conv_out_extent(std::size_t in, std::size_t kernel, ConvGeometry g);
std::size_t conv_transpose_out_extent(std::size_t in, std::size_t kernel, ConvGeometry g);

// Reverse-mode tape over a fixed operator set.
//
// Nodes are appended in evaluation order, so the reverse of insertion order
// is a valid topological order for backward(). Parameter leaves reference the
// owning BasicParams without copying; the params must outlive the graph and
// stay unmodified until backward() has run. Repeated param() calls for the
// same tensor return the same node, so gradients of shared tensors accumulate.
template <typename T>
class Graph {
 public:
  struct Var {
    std::size_t id = std::numeric_limits<std::size_t>::max();
  };

  // With tracking off no backward closures or saved activations are kept.
  explicit Graph(bool track_gradients = true) : track_(track_gradients) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(BasicTensor<T> value);
  Var variable(BasicTensor<T> value);
  Var param(const BasicParams<T>& params, const std::string& name);

  // x: (N, ...) flattened to (N, in); w: (out, in); b: (out).
  Var dense(Var x, Var w, Var b);
  // x: (N, C, H, W); w: (O, C, k, k); b: (O).
  Var conv2d(Var x, Var w, Var b, ConvGeometry g);
  // x: (N, C, H, W); w: (C, O, k, k); b: (O).
  Var conv_transpose2d(Var x, Var w, Var b, ConvGeometry g);

  Var relu(Var x);
  Var leaky_relu(Var x, T slope);
  Var tanh(Var x);
  Var sigmoid(Var x);
  // Along the last axis.
  Var softmax(Var x);
  Var log_softmax(Var x);

  Var log(Var x);
  Var square(Var x);
  Var abs(Var x);
  // Gradient passes only where lo <= x <= hi.
  Var clamp(Var x, T lo, T hi);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var x, T factor);
  Var add_scalar(Var x, T offset);

  Var sum(Var x);
  Var mean(Var x);
  // (N, K) -> (N), reducing the last axis.
  Var sum_rows(Var x);
  // (N, K) -> (N) picking x[n, index[n]].
  Var gather_rows(Var x, std::span<const int> index);
  Var reshape(Var x, Shape shape);
  Var detach(Var x);

  void backward(Var loss);

  const BasicTensor<T>& value(Var v) const;
  // Zero tensor when no gradient reached the node.
  BasicTensor<T> grad(Var v) const;
  bool requires_grad(Var v) const { return node(v).requires_grad; }

  // Gradients of every non-frozen tensor of `params` (zero when unused).
  BasicGradients<T> param_grads(const BasicParams<T>& params) const;

  std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    BasicTensor<T> value;
    const BasicTensor<T>* external = nullptr;
    BasicTensor<T> grad;
    bool requires_grad = false;
    std::function<void()> backward;
  };

  Node& node(Var v);
  const Node& node(Var v) const;
  const BasicTensor<T>& val(std::size_t id) const;
  BasicTensor<T>& grad_ref(std::size_t id);
  Var push(BasicTensor<T> value, bool requires_grad);
  bool any_grad(std::initializer_list<Var> vars) const;
  template <typename F, typename G>
  Var unary(Var x, F&& forward, G&& derivative);

  bool track_;
  std::vector<Node> nodes_;
  std::map<std::pair<const void*, std::string>, std::size_t> params_;
};

extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace rlgan::numerics
