#include "rlgan/numerics/params.hpp"

#include "rlgan/errors.hpp"

namespace rlgan::numerics {

template <typename T>
void BasicParams<T>::add(std::string name, BasicTensor<T> tensor, bool frozen) {
  if (index_.count(name)) throw ConfigError("duplicate parameter name '" + name + "'");
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), std::move(tensor), frozen});
}

template <typename T>
typename BasicParams<T>::Entry& BasicParams<T>::entry(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return entries_[it->second];
}

template <typename T>
const typename BasicParams<T>::Entry& BasicParams<T>::entry(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return entries_[it->second];
}

template <typename T>
const BasicTensor<T>& BasicParams<T>::get(const std::string& name) const {
  return entry(name).tensor;
}

template <typename T>
BasicTensor<T>& BasicParams<T>::get(const std::string& name) {
  return entry(name).tensor;
}

template <typename T>
void BasicParams<T>::set(const std::string& name, BasicTensor<T> tensor) {
  auto& e = entry(name);
  if (e.tensor.shape() != tensor.shape())
    throw ShapeError("parameter '" + name + "' has shape " + shape_string(e.tensor.shape()) +
                     ", got " + shape_string(tensor.shape()));
  e.tensor = std::move(tensor);
}

template <typename T>
bool BasicParams<T>::frozen(const std::string& name) const {
  return entry(name).frozen;
}

template <typename T>
void BasicParams<T>::set_frozen(const std::string& name, bool frozen) {
  entry(name).frozen = frozen;
}

template <typename T>
std::vector<std::string> BasicParams<T>::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

template <typename T>
std::size_t BasicParams<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.size();
  return n;
}

template <typename T>
bool BasicParams<T>::operator==(const BasicParams& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name || a.frozen != b.frozen || !(a.tensor == b.tensor)) return false;
  }
  return true;
}

template class BasicParams<float>;
template class BasicParams<double>;

}  // namespace rlgan::numerics
