#include "rlgan/numerics/graph.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <malloc.h>

#include <Eigen/Core>

#include "rlgan/errors.hpp"

namespace rlgan::numerics {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

struct PatchGrid {
  std::size_t channels, height, width;  // image side
  std::size_t kernel, stride, pad;
  std::size_t out_h, out_w;             // patch grid
  std::size_t rows() const { return channels * kernel * kernel; }
  std::size_t cols() const { return out_h * out_w; }
};

// col(c*k*k + ky*k + kx, oy*out_w + ox) = img(c, oy*s - p + ky, ox*s - p + kx)
// `ld` is the row stride of col, so several samples can share one matrix.
template <typename T>
void im2col(const T* img, const PatchGrid& g, T* col, std::size_t ld) {
  const auto k = g.kernel;
  if (g.pad == 0) {
    const std::size_t st = g.stride;
    for (std::size_t c = 0; c < g.channels; ++c) {
      const T* plane = img + c * g.height * g.width;
      for (std::size_t ky = 0; ky < k; ++ky)
        for (std::size_t kx = 0; kx < k; ++kx) {
          T* row = col + ((c * k + ky) * k + kx) * ld;
          for (std::size_t oy = 0; oy < g.out_h; ++oy) {
            const T* src = plane + (oy * st + ky) * g.width + kx;
            T* dst = row + oy * g.out_w;
            for (std::size_t ox = 0; ox < g.out_w; ++ox) dst[ox] = src[ox * st];
          }
        }
    }
    return;
  }
  for (std::size_t c = 0; c < g.channels; ++c) {
    const T* plane = img + c * g.height * g.width;
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        T* row = col + ((c * k + ky) * k + kx) * ld;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const long iy = static_cast<long>(oy * g.stride + ky) - static_cast<long>(g.pad);
          T* dst = row + oy * g.out_w;
          if (iy < 0 || iy >= static_cast<long>(g.height)) {
            std::fill(dst, dst + g.out_w, T(0));
            continue;
          }
          const T* src = plane + iy * g.width;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const long ix = static_cast<long>(ox * g.stride + kx) - static_cast<long>(g.pad);
            dst[ox] = (ix < 0 || ix >= static_cast<long>(g.width)) ? T(0) : src[ix];
          }
        }
      }
    }
  }
}

// Adjoint of im2col: accumulates patches back into img.
template <typename T>
void col2im(const T* col, const PatchGrid& g, T* img, std::size_t ld) {
  const auto k = g.kernel;
  if (g.pad == 0) {
    const std::size_t st = g.stride;
    for (std::size_t c = 0; c < g.channels; ++c) {
      T* plane = img + c * g.height * g.width;
      for (std::size_t ky = 0; ky < k; ++ky)
        for (std::size_t kx = 0; kx < k; ++kx) {
          const T* row = col + ((c * k + ky) * k + kx) * ld;
          for (std::size_t oy = 0; oy < g.out_h; ++oy) {
            T* dst = plane + (oy * st + ky) * g.width + kx;
            const T* src = row + oy * g.out_w;
            for (std::size_t ox = 0; ox < g.out_w; ++ox) dst[ox * st] += src[ox];
          }
        }
    }
    return;
  }
  for (std::size_t c = 0; c < g.channels; ++c) {
    T* plane = img + c * g.height * g.width;
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        const T* row = col + ((c * k + ky) * k + kx) * ld;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const long iy = static_cast<long>(oy * g.stride + ky) - static_cast<long>(g.pad);
          if (iy < 0 || iy >= static_cast<long>(g.height)) continue;
          const T* src = row + oy * g.out_w;
          T* dst = plane + iy * g.width;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const long ix = static_cast<long>(ox * g.stride + kx) - static_cast<long>(g.pad);
            if (ix >= 0 && ix < static_cast<long>(g.width)) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

// (n, ch, len) <-> (ch, n * len)
template <typename T>
void to_channel_major(const T* src, std::size_t n, std::size_t ch, std::size_t len, T* dst) {
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t c = 0; c < ch; ++c)
      std::copy(src + (s * ch + c) * len, src + (s * ch + c + 1) * len, dst + (c * n + s) * len);
}

template <typename T>
void add_from_channel_major(const T* src, std::size_t n, std::size_t ch, std::size_t len, T* dst) {
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t c = 0; c < ch; ++c) {
      const T* a = src + (c * n + s) * len;
      T* d = dst + (s * ch + c) * len;
      for (std::size_t i = 0; i < len; ++i) d[i] += a[i];
    }
}

// Per-thread reusable buffers for convolution temporaries.
template <typename T>
T* scratch(int slot, std::size_t size) {
  thread_local std::vector<T> buffers[3];
  auto& b = buffers[slot];
  if (b.size() < size) b.resize(size);
  return b.data();
}

// Samples per GEMM chunk: keeps the column matrix near 2M entries.
std::size_t chunk_samples(std::size_t per_sample, std::size_t n) {
  return std::clamp<std::size_t>((std::size_t(1) << 21) / std::max<std::size_t>(per_sample, 1), 1, n);
}

// Activations of a training step are freed and reallocated every step; keep
// them on the heap instead of round-tripping through mmap.
const bool kAllocatorTuned = [] {
  mallopt(M_MMAP_THRESHOLD, 32 * 1024 * 1024);
  mallopt(M_TRIM_THRESHOLD, 512 * 1024 * 1024);
  return true;
}();

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace

std::size_t conv_out_extent(std::size_t in, std::size_t kernel, ConvGeometry g) {
  if (g.stride == 0) throw ShapeError("convolution stride must be positive");
  if (in + 2 * g.pad < kernel)
    throw ShapeError("kernel " + std::to_string(kernel) + " larger than padded input " +
                     std::to_string(in + 2 * g.pad));
  return (in + 2 * g.pad - kernel) / g.stride + 1;
}

std::size_t conv_transpose_out_extent(std::size_t in, std::size_t kernel, ConvGeometry g) {
  if (g.stride == 0) throw ShapeError("convolution stride must be positive");
  const long out = static_cast<long>((in - 1) * g.stride + kernel) - 2 * static_cast<long>(g.pad);
  if (out <= 0) throw ShapeError("transposed convolution output is empty");
  return static_cast<std::size_t>(out);
}

template <typename T>
typename Graph<T>::Node& Graph<T>::node(Var v) {
  if (v.id >= nodes_.size()) throw ContractViolation("invalid graph variable");
  return nodes_[v.id];
}

template <typename T>
const typename Graph<T>::Node& Graph<T>::node(Var v) const {
  if (v.id >= nodes_.size()) throw ContractViolation("invalid graph variable");
  return nodes_[v.id];
}

template <typename T>
const BasicTensor<T>& Graph<T>::val(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.external ? *n.external : n.value;
}

template <typename T>
BasicTensor<T>& Graph<T>::grad_ref(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = BasicTensor<T>(val(id).shape());
  return n.grad;
}

template <typename T>
typename Graph<T>::Var Graph<T>::push(BasicTensor<T> value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), nullptr, {}, requires_grad && track_, {}});
  return Var{nodes_.size() - 1};
}

template <typename T>
bool Graph<T>::any_grad(std::initializer_list<Var> vars) const {
  if (!track_) return false;
  for (Var v : vars)
    if (node(v).requires_grad) return true;
  return false;
}

template <typename T>
const BasicTensor<T>& Graph<T>::value(Var v) const {
  node(v);
  return val(v.id);
}

template <typename T>
BasicTensor<T> Graph<T>::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.empty()) return BasicTensor<T>(val(v.id).shape());
  return n.grad;
}

template <typename T>
typename Graph<T>::Var Graph<T>::constant(BasicTensor<T> value) {
  return push(std::move(value), false);
}

template <typename T>
typename Graph<T>::Var Graph<T>::variable(BasicTensor<T> value) {
  return push(std::move(value), true);
}

template <typename T>
typename Graph<T>::Var Graph<T>::param(const BasicParams<T>& params, const std::string& name) {
  auto key = std::make_pair(static_cast<const void*>(&params), name);
  if (auto it = params_.find(key); it != params_.end()) return Var{it->second};
  const auto& tensor = params.get(name);
  nodes_.push_back(Node{{}, &tensor, {}, track_ && !params.frozen(name), {}});
  params_.emplace(std::move(key), nodes_.size() - 1);
  return Var{nodes_.size() - 1};
}

template <typename T>
BasicGradients<T> Graph<T>::param_grads(const BasicParams<T>& params) const {
  BasicGradients<T> out;
  for (const auto& e : params) {
    if (e.frozen) continue;
    auto it = params_.find(std::make_pair(static_cast<const void*>(&params), e.name));
    if (it == params_.end() || nodes_[it->second].grad.empty())
      out.emplace(e.name, BasicTensor<T>(e.tensor.shape()));
    else
      out.emplace(e.name, nodes_[it->second].grad);
  }
  return out;
}

template <typename T>
void Graph<T>::backward(Var loss) {
  if (!track_) throw ContractViolation("backward() on a graph without gradient tracking");
  Node& l = node(loss);
  if (val(loss.id).size() != 1) throw ShapeError("backward() needs a scalar loss");
  if (!l.requires_grad) return;
  grad_ref(loss.id).fill(T(1));
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.requires_grad && n.backward && !n.grad.empty()) n.backward();
  }
}

// ---------------------------------------------------------------- linear ops

template <typename T>
typename Graph<T>::Var Graph<T>::dense(Var x, Var w, Var b) {
  const auto& X = value(x);
  const auto& W = value(w);
  const auto& B = value(b);
  require(X.rank() >= 1 && W.rank() == 2 && B.rank() == 1, "dense: bad operand ranks");
  const std::size_t n = X.dim(0);
  const std::size_t in = X.size() / n;
  const std::size_t out = W.dim(0);
  require(W.dim(1) == in, "dense: input features " + std::to_string(in) + " vs weight " +
                              shape_string(W.shape()));
  require(B.dim(0) == out, "dense: bias size mismatch");

  BasicTensor<T> Y({n, out});
  MapMat<T> y(Y.raw(), n, out);
  y.noalias() = ConstMapMat<T>(X.raw(), n, in) * ConstMapMat<T>(W.raw(), out, in).transpose();
  y.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(B.raw(), out);

  const bool rg = any_grad({x, w, b});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, x, w, b, n, in, out] {
      ConstMapMat<T> dy(nodes_[v.id].grad.raw(), n, out);
      if (nodes_[x.id].requires_grad) {
        MapMat<T> dx(grad_ref(x.id).raw(), n, in);
        dx.noalias() += dy * ConstMapMat<T>(val(w.id).raw(), out, in);
      }
      if (nodes_[w.id].requires_grad) {
        MapMat<T> dw(grad_ref(w.id).raw(), out, in);
        dw.noalias() += dy.transpose() * ConstMapMat<T>(val(x.id).raw(), n, in);
      }
      if (nodes_[b.id].requires_grad) {
        // Plain loops: Eigen's vectorized reductions peel by address alignment,
        // which would make results depend on where buffers happen to land.
        T* db = grad_ref(b.id).raw();
        const T* g = nodes_[v.id].grad.raw();
        for (std::size_t s = 0; s < n; ++s)
          for (std::size_t j = 0; j < out; ++j) db[j] += g[s * out + j];
      }
    };
  }
  return v;
}

template <typename T>
typename Graph<T>::Var Graph<T>::conv2d(Var x, Var w, Var b, ConvGeometry geo) {
  const auto& X = value(x);
  const auto& W = value(w);
  const auto& B = value(b);
  require(X.rank() == 4 && W.rank() == 4 && B.rank() == 1, "conv2d: bad operand ranks");
  const std::size_t n = X.dim(0), c = X.dim(1), h = X.dim(2), wd = X.dim(3);
  const std::size_t o = W.dim(0), k = W.dim(2);
  require(W.dim(1) == c, "conv2d: input has " + std::to_string(c) + " channels, weight " +
                             shape_string(W.shape()));
  require(W.dim(3) == k, "conv2d: kernel must be square");
  require(B.dim(0) == o, "conv2d: bias size mismatch");
  const PatchGrid g{c, h, wd, k, geo.stride, geo.pad, conv_out_extent(h, k, geo),
                    conv_out_extent(wd, k, geo)};
  const std::size_t rows = g.rows(), cols = g.cols();

  const std::size_t in_size = c * h * wd;
  const std::size_t chunk = chunk_samples(rows * cols, n);

  BasicTensor<T> Y({n, o, g.out_h, g.out_w});
  ConstMapMat<T> wm(W.raw(), o, rows);
  for (std::size_t s0 = 0; s0 < n; s0 += chunk) {
    const std::size_t m = std::min(chunk, n - s0), ld = m * cols;
    T* col = scratch<T>(0, rows * ld);
    T* ybig = scratch<T>(1, o * ld);
    for (std::size_t s = 0; s < m; ++s) im2col(X.raw() + (s0 + s) * in_size, g, col + s * cols, ld);
    MapMat<T>(ybig, o, ld).noalias() = wm * ConstMapMat<T>(col, rows, ld);
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t ch = 0; ch < o; ++ch) {
        const T* src = ybig + ch * ld + s * cols;
        T* dst = Y.raw() + ((s0 + s) * o + ch) * cols;
        for (std::size_t i = 0; i < cols; ++i) dst[i] = src[i] + B[ch];
      }
  }

  const bool rg = any_grad({x, w, b});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, x, w, b, g, n, o, chunk] {
      const std::size_t rows = g.rows(), cols = g.cols();
      const std::size_t in_size = g.channels * g.height * g.width;
      const bool gx = nodes_[x.id].requires_grad;
      const bool gw = nodes_[w.id].requires_grad;
      const bool gb = nodes_[b.id].requires_grad;
      const T* dy_all = nodes_[v.id].grad.raw();
      const T* xs = val(x.id).raw();
      ConstMapMat<T> wm(val(w.id).raw(), o, rows);
      for (std::size_t s0 = 0; s0 < n; s0 += chunk) {
        const std::size_t m = std::min(chunk, n - s0), ld = m * cols;
        T* dybig = scratch<T>(1, o * ld);
        to_channel_major(dy_all + s0 * o * cols, m, o, cols, dybig);
        ConstMapMat<T> dy(dybig, o, ld);
        if (gb) {
          T* db = grad_ref(b.id).raw();
          for (std::size_t ch = 0; ch < o; ++ch) {
            T acc = 0;
            for (std::size_t i = 0; i < ld; ++i) acc += dybig[ch * ld + i];
            db[ch] += acc;
          }
        }
        if (gw) {
          T* col = scratch<T>(0, rows * ld);
          for (std::size_t s = 0; s < m; ++s) im2col(xs + (s0 + s) * in_size, g, col + s * cols, ld);
          MapMat<T> dw(grad_ref(w.id).raw(), o, rows);
          dw.noalias() += dy * ConstMapMat<T>(col, rows, ld).transpose();
        }
        if (gx) {
          T* dcol = scratch<T>(2, rows * ld);
          MapMat<T>(dcol, rows, ld).noalias() = wm.transpose() * dy;
          T* dx = grad_ref(x.id).raw();
          for (std::size_t s = 0; s < m; ++s) col2im(dcol + s * cols, g, dx + (s0 + s) * in_size, ld);
        }
      }
    };
  }
  return v;
}

template <typename T>
typename Graph<T>::Var Graph<T>::conv_transpose2d(Var x, Var w, Var b, ConvGeometry geo) {
  const auto& X = value(x);
  const auto& W = value(w);
  const auto& B = value(b);
  require(X.rank() == 4 && W.rank() == 4 && B.rank() == 1, "conv_transpose2d: bad operand ranks");
  const std::size_t n = X.dim(0), c = X.dim(1), h = X.dim(2), wd = X.dim(3);
  const std::size_t o = W.dim(1), k = W.dim(2);
  require(W.dim(0) == c, "conv_transpose2d: input has " + std::to_string(c) +
                             " channels, weight " + shape_string(W.shape()));
  require(W.dim(3) == k, "conv_transpose2d: kernel must be square");
  require(B.dim(0) == o, "conv_transpose2d: bias size mismatch");
  const std::size_t oh = conv_transpose_out_extent(h, k, geo);
  const std::size_t ow = conv_transpose_out_extent(wd, k, geo);
  // The output image is the "input" side of an ordinary patch grid of size h x wd.
  const PatchGrid g{o, oh, ow, k, geo.stride, geo.pad, h, wd};
  require(conv_out_extent(oh, k, geo) == h && conv_out_extent(ow, k, geo) == wd,
          "conv_transpose2d: geometry is not invertible");
  const std::size_t rows = g.rows(), cols = g.cols();

  const std::size_t out_size = o * oh * ow;
  const std::size_t chunk = chunk_samples(rows * cols, n);

  BasicTensor<T> Y({n, o, oh, ow});
  ConstMapMat<T> wm(W.raw(), c, rows);
  for (std::size_t s0 = 0; s0 < n; s0 += chunk) {
    const std::size_t m = std::min(chunk, n - s0), ld = m * cols;
    T* xbig = scratch<T>(1, c * ld);
    T* col = scratch<T>(0, rows * ld);
    to_channel_major(X.raw() + s0 * c * cols, m, c, cols, xbig);
    MapMat<T>(col, rows, ld).noalias() = wm.transpose() * ConstMapMat<T>(xbig, c, ld);
    for (std::size_t s = 0; s < m; ++s) {
      T* ys = Y.raw() + (s0 + s) * out_size;
      col2im(col + s * cols, g, ys, ld);
      for (std::size_t ch = 0; ch < o; ++ch) {
        T* plane = ys + ch * oh * ow;
        for (std::size_t i = 0; i < oh * ow; ++i) plane[i] += B[ch];
      }
    }
  }

  const bool rg = any_grad({x, w, b});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, x, w, b, g, n, c, chunk] {
      const std::size_t rows = g.rows(), cols = g.cols();
      const std::size_t out_size = g.channels * g.height * g.width;
      const T* dy_all = nodes_[v.id].grad.raw();
      const bool gx = nodes_[x.id].requires_grad;
      const bool gw = nodes_[w.id].requires_grad;
      const bool gb = nodes_[b.id].requires_grad;
      if (gb) {
        T* db = grad_ref(b.id).raw();
        for (std::size_t s = 0; s < n; ++s)
          for (std::size_t ch = 0; ch < g.channels; ++ch) {
            const T* dy = dy_all + s * out_size + ch * g.height * g.width;
            T acc = 0;
            for (std::size_t i = 0; i < g.height * g.width; ++i) acc += dy[i];
            db[ch] += acc;
          }
      }
      if (!gx && !gw) return;
      ConstMapMat<T> wm(val(w.id).raw(), c, rows);
      for (std::size_t s0 = 0; s0 < n; s0 += chunk) {
        const std::size_t m = std::min(chunk, n - s0), ld = m * cols;
        T* dcol = scratch<T>(0, rows * ld);
        for (std::size_t s = 0; s < m; ++s) im2col(dy_all + (s0 + s) * out_size, g, dcol + s * cols, ld);
        ConstMapMat<T> dc(dcol, rows, ld);
        if (gx) {
          T* dxbig = scratch<T>(2, c * ld);
          MapMat<T>(dxbig, c, ld).noalias() = wm * dc;
          add_from_channel_major(dxbig, m, c, cols, grad_ref(x.id).raw() + s0 * c * cols);
        }
        if (gw) {
          T* xbig = scratch<T>(1, c * ld);
          to_channel_major(val(x.id).raw() + s0 * c * cols, m, c, cols, xbig);
          MapMat<T> dw(grad_ref(w.id).raw(), c, rows);
          dw.noalias() += ConstMapMat<T>(xbig, c, ld) * dc.transpose();
        }
      }
    };
  }
  return v;
}

// ----------------------------------------------------------- elementwise ops

template <typename T>
template <typename F, typename G>
typename Graph<T>::Var Graph<T>::unary(Var x, F&& forward, G&& derivative) {
  const auto& X = value(x);
  BasicTensor<T> Y(X.shape());
  for (std::size_t i = 0; i < X.size(); ++i) Y[i] = forward(X[i]);
  const bool rg = any_grad({x});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, x, derivative] {
      const auto& xs = val(x.id);
      const auto& ys = nodes_[v.id].value;
      const auto& dy = nodes_[v.id].grad;
      auto& dx = grad_ref(x.id);
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * derivative(xs[i], ys[i]);
    };
  }
  return v;
}

template <typename T>
typename Graph<T>::Var Graph<T>::relu(Var x) {
  return unary(
      x, [](T a) { return a > T(0) ? a : T(0); },
      [](T a, T) { return a > T(0) ? T(1) : T(0); });
}

template <typename T>
typename Graph<T>::Var Graph<T>::leaky_relu(Var x, T slope) {
  return unary(
      x, [slope](T a) { return a > T(0) ? a : slope * a; },
      [slope](T a, T) { return a > T(0) ? T(1) : slope; });
}

template <typename T>
typename Graph<T>::Var Graph<T>::tanh(Var x) {
  return unary(
      x, [](T a) { return std::tanh(a); }, [](T, T y) { return T(1) - y * y; });
}

template <typename T>
typename Graph<T>::Var Graph<T>::sigmoid(Var x) {
  return unary(
      x, [](T a) { return T(1) / (T(1) + std::exp(-a)); }, [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
typename Graph<T>::Var Graph<T>::log(Var x) {
  return unary(
      x, [](T a) { return std::log(a); }, [](T a, T) { return T(1) / a; });
}

template <typename T>
typename Graph<T>::Var Graph<T>::square(Var x) {
  return unary(
      x, [](T a) { return a * a; }, [](T a, T) { return T(2) * a; });
}

template <typename T>
typename Graph<T>::Var Graph<T>::abs(Var x) {
  return unary(
      x, [](T a) { return std::abs(a); },
      [](T a, T) { return a > T(0) ? T(1) : (a < T(0) ? T(-1) : T(0)); });
}

template <typename T>
typename Graph<T>::Var Graph<T>::clamp(Var x, T lo, T hi) {
  return unary(
      x, [lo, hi](T a) { return std::clamp(a, lo, hi); },
      [lo, hi](T a, T) { return (a >= lo && a <= hi) ? T(1) : T(0); });
}

template <typename T>
typename Graph<T>::Var Graph<T>::scale(Var x, T factor) {
  return unary(
      x, [factor](T a) { return a * factor; }, [factor](T, T) { return factor; });
}

template <typename T>
typename Graph<T>::Var Graph<T>::add_scalar(Var x, T offset) {
  return unary(
      x, [offset](T a) { return a + offset; }, [](T, T) { return T(1); });
}

template <typename T>
typename Graph<T>::Var Graph<T>::add(Var a, Var b) {
  const auto& A = value(a);
  const auto& B = value(b);
  require(A.shape() == B.shape(), "add: shapes " + shape_string(A.shape()) + " and " +
                                      shape_string(B.shape()));
  BasicTensor<T> Y(A.shape());
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] = A[i] + B[i];
  const bool rg = any_grad({a, b});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, a, b] {
      const auto& dy = nodes_[v.id].grad;
      for (Var in : {a, b}) {
        if (!nodes_[in.id].requires_grad) continue;
        auto& d = grad_ref(in.id);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i];
      }
    };
  }
  return v;
}

template <typename T>
typename Graph<T>::Var Graph<T>::sub(Var a, Var b) {
  const auto& A = value(a);
  const auto& B = value(b);
  require(A.shape() == B.shape(), "sub: shapes " + shape_string(A.shape()) + " and " +
                                      shape_string(B.shape()));
  BasicTensor<T> Y(A.shape());
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] = A[i] - B[i];
  const bool rg = any_grad({a, b});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, a, b] {
      const auto& dy = nodes_[v.id].grad;
      if (nodes_[a.id].requires_grad) {
        auto& d = grad_ref(a.id);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i];
      }
      if (nodes_[b.id].requires_grad) {
        auto& d = grad_ref(b.id);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= dy[i];
      }
    };
  }
  return v;
}

template <typename T>
typename Graph<T>::Var Graph<T>::mul(Var a, Var b) {
  const auto& A = value(a);
  const auto& B = value(b);
  require(A.shape() == B.shape(), "mul: shapes " + shape_string(A.shape()) + " and " +
                                      shape_string(B.shape()));
  BasicTensor<T> Y(A.shape());
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] = A[i] * B[i];
  const bool rg = any_grad({a, b});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, a, b] {
      const auto& dy = nodes_[v.id].grad;
      if (nodes_[a.id].requires_grad) {
        const auto& bv = val(b.id);
        auto& d = grad_ref(a.id);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i] * bv[i];
      }
      if (nodes_[b.id].requires_grad) {
        const auto& av = val(a.id);
        auto& d = grad_ref(b.id);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i] * av[i];
      }
    };
  }
  return v;
}

// --------------------------------------------------------- softmax family

template <typename T>
typename Graph<T>::Var Graph<T>::softmax(Var x) {
  const auto& X = value(x);
  const std::size_t k = X.shape().back();
  const std::size_t rows = X.size() / k;
  BasicTensor<T> Y(X.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xs = X.raw() + r * k;
    T* ys = Y.raw() + r * k;
    const T m = *std::max_element(xs, xs + k);
    T total = 0;
    for (std::size_t i = 0; i < k; ++i) total += (ys[i] = std::exp(xs[i] - m));
    for (std::size_t i = 0; i < k; ++i) ys[i] /= total;
  }
  const bool rg = any_grad({x});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, x, k, rows] {
      const auto& y = nodes_[v.id].value;
      const auto& dy = nodes_[v.id].grad;
      auto& dx = grad_ref(x.id);
      for (std::size_t r = 0; r < rows; ++r) {
        T dot = 0;
        for (std::size_t i = 0; i < k; ++i) dot += dy[r * k + i] * y[r * k + i];
        for (std::size_t i = 0; i < k; ++i) dx[r * k + i] += y[r * k + i] * (dy[r * k + i] - dot);
      }
    };
  }
  return v;
}

template <typename T>
typename Graph<T>::Var Graph<T>::log_softmax(Var x) {
  const auto& X = value(x);
  const std::size_t k = X.shape().back();
  const std::size_t rows = X.size() / k;
  BasicTensor<T> Y(X.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xs = X.raw() + r * k;
    T* ys = Y.raw() + r * k;
    const T m = *std::max_element(xs, xs + k);
    T total = 0;
    for (std::size_t i = 0; i < k; ++i) total += std::exp(xs[i] - m);
    const T lse = m + std::log(total);
    for (std::size_t i = 0; i < k; ++i) ys[i] = xs[i] - lse;
  }
  const bool rg = any_grad({x});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, x, k, rows] {
      const auto& y = nodes_[v.id].value;
      const auto& dy = nodes_[v.id].grad;
      auto& dx = grad_ref(x.id);
      for (std::size_t r = 0; r < rows; ++r) {
        T total = 0;
        for (std::size_t i = 0; i < k; ++i) total += dy[r * k + i];
        for (std::size_t i = 0; i < k; ++i)
          dx[r * k + i] += dy[r * k + i] - std::exp(y[r * k + i]) * total;
      }
    };
  }
  return v;
}

// ---------------------------------------------------------------- reductions

template <typename T>
typename Graph<T>::Var Graph<T>::sum(Var x) {
  const auto& X = value(x);
  T total = 0;
  for (std::size_t i = 0; i < X.size(); ++i) total += X[i];
  const bool rg = any_grad({x});
  Var v = push(BasicTensor<T>::scalar(total), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, x] {
      const T g = nodes_[v.id].grad[0];
      auto& dx = grad_ref(x.id);
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g;
    };
  }
  return v;
}

template <typename T>
typename Graph<T>::Var Graph<T>::mean(Var x) {
  const std::size_t n = value(x).size();
  return scale(sum(x), T(1) / static_cast<T>(n));
}

template <typename T>
typename Graph<T>::Var Graph<T>::sum_rows(Var x) {
  const auto& X = value(x);
  require(X.rank() >= 2, "sum_rows: needs rank >= 2");
  const std::size_t k = X.shape().back();
  const std::size_t rows = X.size() / k;
  Shape out_shape(X.shape().begin(), X.shape().end() - 1);
  BasicTensor<T> Y(out_shape);
  for (std::size_t r = 0; r < rows; ++r) {
    T total = 0;
    for (std::size_t i = 0; i < k; ++i) total += X[r * k + i];
    Y[r] = total;
  }
  const bool rg = any_grad({x});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, x, k, rows] {
      const auto& dy = nodes_[v.id].grad;
      auto& dx = grad_ref(x.id);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t i = 0; i < k; ++i) dx[r * k + i] += dy[r];
    };
  }
  return v;
}

template <typename T>
typename Graph<T>::Var Graph<T>::gather_rows(Var x, std::span<const int> index) {
  const auto& X = value(x);
  require(X.rank() == 2, "gather_rows: needs (N, K)");
  const std::size_t n = X.dim(0), k = X.dim(1);
  require(index.size() == n, "gather_rows: index length mismatch");
  std::vector<int> idx(index.begin(), index.end());
  BasicTensor<T> Y({n});
  for (std::size_t r = 0; r < n; ++r) {
    if (idx[r] < 0 || static_cast<std::size_t>(idx[r]) >= k)
      throw ContractViolation("gather_rows: index " + std::to_string(idx[r]) + " out of range");
    Y[r] = X[r * k + idx[r]];
  }
  const bool rg = any_grad({x});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, x, k, idx = std::move(idx)] {
      const auto& dy = nodes_[v.id].grad;
      auto& dx = grad_ref(x.id);
      for (std::size_t r = 0; r < idx.size(); ++r) dx[r * k + idx[r]] += dy[r];
    };
  }
  return v;
}

template <typename T>
typename Graph<T>::Var Graph<T>::reshape(Var x, Shape shape) {
  BasicTensor<T> Y = value(x).reshaped(std::move(shape));
  const bool rg = any_grad({x});
  Var v = push(std::move(Y), rg);
  if (rg) {
    nodes_[v.id].backward = [this, v, x] {
      const auto& dy = nodes_[v.id].grad;
      auto& dx = grad_ref(x.id);
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
    };
  }
  return v;
}

template <typename T>
typename Graph<T>::Var Graph<T>::detach(Var x) {
  return constant(value(x));
}

template class Graph<float>;
template class Graph<double>;

}  // namespace rlgan::numerics
