#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlgan/numerics/tensor.hpp"

namespace rlgan::numerics {

// Gradients keyed by parameter name.
template <typename T>
using BasicGradients = std::map<std::string, BasicTensor<T>>;
using Gradients = BasicGradients<float>;

// Insertion-ordered named tensors with a per-tensor frozen flag.
template <typename T>
class BasicParams {
 public:
  struct Entry {
    std::string name;
    BasicTensor<T> tensor;
    bool frozen = false;
  };

  void add(std::string name, BasicTensor<T> tensor, bool frozen = false);
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const BasicTensor<T>& get(const std::string& name) const;
  BasicTensor<T>& get(const std::string& name);
  // Replaces the payload; shape must match.
  void set(const std::string& name, BasicTensor<T> tensor);

  bool frozen(const std::string& name) const;
  void set_frozen(const std::string& name, bool frozen);

  std::vector<std::string> names() const;
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t parameter_count() const;

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // Same names, frozen flags and bitwise payloads.
  bool operator==(const BasicParams& other) const;

  template <typename U>
  BasicParams<U> cast() const {
    BasicParams<U> out;
    for (const auto& e : entries_) out.add(e.name, e.tensor.template cast<U>(), e.frozen);
    return out;
  }

 private:
  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

using NetworkParams = BasicParams<float>;

extern template class BasicParams<float>;
extern template class BasicParams<double>;

}  // namespace rlgan::numerics
