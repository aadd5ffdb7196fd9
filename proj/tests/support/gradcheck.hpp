#pragma once

// Central finite-difference oracle for Graph operators. Test-only: it uses
// nothing but forward evaluation, so it is independent of every backward rule.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rlgan/numerics/graph.hpp"

namespace rlgan::testing {

template <typename T>
using OpBuilder = std::function<typename numerics::Graph<T>::Var(
    numerics::Graph<T>&, const std::vector<typename numerics::Graph<T>::Var>&)>;

template <typename T>
struct GradCase {
  std::string op;
  std::vector<numerics::BasicTensor<T>> inputs;
  OpBuilder<T> build;
};

struct GradCheckResult {
  double max_rel_error = 0;
  std::size_t checked = 0;
};

// |a - n| / max(|a|, |n|, 1).
inline double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1.0});
}

// Projects the op output onto fixed random weights; the projection is summed
// in double so float rounding only enters through the op itself.
template <typename T>
GradCheckResult grad_check(const GradCase<T>& c, double step, std::uint64_t seed) {
  using G = numerics::Graph<T>;
  std::vector<numerics::BasicTensor<T>> inputs = c.inputs;

  numerics::BasicTensor<T> proj;
  auto evaluate = [&](const std::vector<numerics::BasicTensor<T>>& xs) {
    G g(false);
    std::vector<typename G::Var> vars;
    for (const auto& x : xs) vars.push_back(g.constant(x));
    const auto& y = g.value(c.build(g, vars));
    double total = 0;
    for (std::size_t i = 0; i < y.size(); ++i) total += double(y[i]) * double(proj[i]);
    return total;
  };

  G graph;
  std::vector<typename G::Var> vars;
  for (const auto& x : inputs) vars.push_back(graph.variable(x));
  auto out = c.build(graph, vars);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  proj = numerics::BasicTensor<T>(graph.value(out).shape());
  for (auto& v : proj.storage()) v = static_cast<T>(u(rng));
  auto loss = graph.sum(graph.mul(out, graph.constant(proj)));
  graph.backward(loss);

  GradCheckResult result;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto analytic = graph.grad(vars[k]);
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const T saved = inputs[k][i];
      inputs[k][i] = static_cast<T>(saved + step);
      const double plus = evaluate(inputs);
      inputs[k][i] = static_cast<T>(saved - step);
      const double minus = evaluate(inputs);
      inputs[k][i] = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      result.max_rel_error = std::max(result.max_rel_error, rel_error(analytic[i], numeric));
      ++result.checked;
    }
  }
  return result;
}

// Random operator cases. Inputs of piecewise ops keep a margin from their
// kinks so central differences never straddle one.
template <typename T>
class GradCaseFactory {
 public:
  using Tensor = numerics::BasicTensor<T>;
  using G = numerics::Graph<T>;
  using Vars = std::vector<typename G::Var>;

  GradCaseFactory(std::uint64_t seed, double kink_margin) : rng_(seed), margin_(kink_margin) {}

  static std::vector<std::string> operators() {
    return {"dense", "conv2d", "conv2d_strided", "conv_transpose2d", "relu", "leaky_relu",
            "tanh", "sigmoid", "softmax", "log_softmax", "log", "square", "abs", "clamp",
            "add", "sub", "mul", "scale", "add_scalar", "sum", "mean", "sum_rows",
            "gather_rows", "reshape"};
  }

  GradCase<T> make(const std::string& op) {
    if (op == "dense") {
      const auto n = dim(1, 3), in = dim(1, 5), out = dim(1, 4);
      return {op, {uniform({n, in}), uniform({out, in}), uniform({out})},
              [](G& g, const Vars& v) { return g.dense(v[0], v[1], v[2]); }};
    }
    if (op == "conv2d" || op == "conv2d_strided") {
      const bool strided = op == "conv2d_strided";
      const auto n = dim(1, 2), c = dim(1, 3), o = dim(1, 3), k = dim(1, 3);
      const auto pad = dim(0, 1), stride = strided ? dim(2, 3) : 1;
      const auto h = k + dim(1, 4), w = k + dim(1, 4);
      return {op, {uniform({n, c, h, w}), uniform({o, c, k, k}), uniform({o})},
              [stride, pad](G& g, const Vars& v) {
                return g.conv2d(v[0], v[1], v[2], {stride, pad});
              }};
    }
    if (op == "conv_transpose2d") {
      const auto n = dim(1, 2), c = dim(1, 3), o = dim(1, 3);
      const auto stride = dim(1, 2), k = stride + dim(0, 2), pad = dim(0, (k - 1) / 2);
      const auto h = dim(2, 4), w = dim(2, 4);
      return {op, {uniform({n, c, h, w}), uniform({c, o, k, k}), uniform({o})},
              [stride, pad](G& g, const Vars& v) {
                return g.conv_transpose2d(v[0], v[1], v[2], {stride, pad});
              }};
    }
    if (op == "relu") return unary(op, away_from({0.0}), [](G& g, auto x) { return g.relu(x); });
    if (op == "leaky_relu")
      return unary(op, away_from({0.0}), [](G& g, auto x) { return g.leaky_relu(x, T(0.2)); });
    if (op == "tanh") return unary(op, uniform(shape()), [](G& g, auto x) { return g.tanh(x); });
    if (op == "sigmoid")
      return unary(op, uniform(shape()), [](G& g, auto x) { return g.sigmoid(x); });
    if (op == "softmax")
      return unary(op, uniform({dim(1, 3), dim(2, 5)}), [](G& g, auto x) { return g.softmax(x); });
    if (op == "log_softmax")
      return unary(op, uniform({dim(1, 3), dim(2, 5)}), [](G& g, auto x) { return g.log_softmax(x); });
    if (op == "log") return unary(op, uniform(shape(), 0.5, 2.0), [](G& g, auto x) { return g.log(x); });
    if (op == "square") return unary(op, uniform(shape()), [](G& g, auto x) { return g.square(x); });
    if (op == "abs") return unary(op, away_from({0.0}), [](G& g, auto x) { return g.abs(x); });
    if (op == "clamp")
      return unary(op, away_from({-0.5, 0.5}), [](G& g, auto x) { return g.clamp(x, T(-0.5), T(0.5)); });
    if (op == "add" || op == "sub" || op == "mul") {
      const auto s = shape();
      return {op, {uniform(s), uniform(s)}, [op](G& g, const Vars& v) {
                if (op == "add") return g.add(v[0], v[1]);
                if (op == "sub") return g.sub(v[0], v[1]);
                return g.mul(v[0], v[1]);
              }};
    }
    if (op == "scale") return unary(op, uniform(shape()), [](G& g, auto x) { return g.scale(x, T(-1.7)); });
    if (op == "add_scalar")
      return unary(op, uniform(shape()), [](G& g, auto x) { return g.add_scalar(x, T(0.3)); });
    if (op == "sum") return unary(op, uniform(shape()), [](G& g, auto x) { return g.sum(x); });
    if (op == "mean") return unary(op, uniform(shape()), [](G& g, auto x) { return g.mean(x); });
    if (op == "sum_rows")
      return unary(op, uniform({dim(1, 4), dim(1, 5)}), [](G& g, auto x) { return g.sum_rows(x); });
    if (op == "gather_rows") {
      const auto n = dim(1, 4), k = dim(1, 5);
      std::vector<int> idx(n);
      for (auto& i : idx) i = static_cast<int>(dim(0, k - 1));
      return {op, {uniform({n, k})},
              [idx](G& g, const Vars& v) { return g.gather_rows(v[0], idx); }};
    }
    if (op == "reshape") {
      const auto a = dim(1, 3), b = dim(1, 4);
      return unary(op, uniform({a, b, 2}), [a, b](G& g, auto x) { return g.reshape(x, {2 * b, a}); });
    }
    throw std::invalid_argument("unknown operator " + op);
  }

 private:
  template <typename F>
  GradCase<T> unary(const std::string& op, Tensor x, F f) {
    return {op, {std::move(x)}, [f](G& g, const Vars& v) { return f(g, v[0]); }};
  }

  std::size_t dim(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  numerics::Shape shape() { return {dim(1, 3), dim(1, 4), dim(1, 3)}; }

  Tensor uniform(numerics::Shape s, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(s));
    std::uniform_real_distribution<double> u(lo, hi);
    for (auto& v : t.storage()) v = static_cast<T>(u(rng_));
    return t;
  }

  Tensor away_from(std::vector<double> kinks) {
    Tensor t(shape());
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : t.storage()) {
      double x;
      do {
        x = u(rng_);
      } while (std::any_of(kinks.begin(), kinks.end(),
                           [&](double k) { return std::abs(x - k) < margin_; }));
      v = static_cast<T>(x);
    }
    return t;
  }

  std::mt19937_64 rng_;
  double margin_;
};

}  // namespace rlgan::testing
