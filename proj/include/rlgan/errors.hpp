#pragma once

#include <stdexcept>
#include <string>

namespace rlgan {

// Tensor shapes do not chain (layer specs, op operands).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A loss or activation became NaN/Inf. Carries the offending tensor name.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string tensor, const std::string& what)
      : std::runtime_error(what + " (tensor '" + tensor + "')"),
        tensor_(std::move(tensor)) {}

  const std::string& tensor() const noexcept { return tensor_; }

 private:
  std::string tensor_;
};

class StateCorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller broke a precondition (action out of range, wrong frame shape, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CorruptCheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rlgan
