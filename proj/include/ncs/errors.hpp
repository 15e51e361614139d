#pragma once

#include <stdexcept>
#include <string>

namespace ncs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction parameters or configuration. `key()` names the
/// offending configuration entry when one is known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::string key = {})
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Malformed argument to an operation (non-finite vector, bad index, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A metric was requested on data that cannot support it.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace ncs
