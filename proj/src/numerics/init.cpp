#include "rlgan/numerics/init.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "rlgan/errors.hpp"

namespace rlgan::numerics {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

InitScheme parse_init_scheme(const std::string& text) {
  if (text == "xavier") return InitScheme::xavier();
  if (text == "orthogonal") return InitScheme::orthogonal();
  const std::string prefix = "constant(";
  if (text.rfind(prefix, 0) == 0 && text.back() == ')') {
    try {
      return InitScheme::constant(std::stod(text.substr(prefix.size(), text.size() - prefix.size() - 1)));
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("unknown init scheme '" + text + "'");
}

std::string to_string(const InitScheme& scheme) {
  switch (scheme.kind) {
    case InitScheme::Kind::xavier: return "xavier";
    case InitScheme::Kind::orthogonal: return "orthogonal";
    case InitScheme::Kind::constant: return "constant(" + std::to_string(scheme.value) + ")";
  }
  return "?";
}

template <typename T>
BasicTensor<T> init_weight(const Shape& shape, std::size_t fan_in, std::size_t fan_out,
                           const InitScheme& scheme, Rng& rng) {
  BasicTensor<T> w(shape);
  switch (scheme.kind) {
    case InitScheme::Kind::constant:
      w.fill(static_cast<T>(scheme.value));
      break;
    case InitScheme::Kind::xavier: {
      std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / double(fan_in + fan_out)));
      for (auto& v : w.storage()) v = static_cast<T>(normal(rng));
      break;
    }
    case InitScheme::Kind::orthogonal: {
      const auto rows = static_cast<Eigen::Index>(shape.at(0));
      const auto cols = static_cast<Eigen::Index>(w.size() / shape.at(0));
      const bool wide = rows < cols;
      const Eigen::Index tall_rows = wide ? cols : rows;
      const Eigen::Index tall_cols = wide ? rows : cols;
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::MatrixXd a(tall_rows, tall_cols);
      for (Eigen::Index i = 0; i < tall_rows; ++i)
        for (Eigen::Index j = 0; j < tall_cols; ++j) a(i, j) = normal(rng);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
      Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(tall_rows, tall_cols);
      const Eigen::MatrixXd r = qr.matrixQR();
      for (Eigen::Index j = 0; j < tall_cols; ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
      if (wide) q.transposeInPlace();
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
          w[static_cast<std::size_t>(i * cols + j)] = static_cast<T>(scheme.value * q(i, j));
      break;
    }
  }
  return w;
}

template <typename T>
BasicTensor<T> init_bias(const Shape& shape, const InitScheme& scheme) {
  return BasicTensor<T>(shape, scheme.kind == InitScheme::Kind::constant
                                   ? static_cast<T>(scheme.value)
                                   : T(0));
}

template BasicTensor<float> init_weight<float>(const Shape&, std::size_t, std::size_t,
                                               const InitScheme&, Rng&);
template BasicTensor<double> init_weight<double>(const Shape&, std::size_t, std::size_t,
                                                 const InitScheme&, Rng&);
template BasicTensor<float> init_bias<float>(const Shape&, const InitScheme&);
template BasicTensor<double> init_bias<double>(const Shape&, const InitScheme&);

}  // namespace rlgan::numerics
