#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bayrn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulator produced a non-finite state.
class NumericBlowUp : public Error {
 public:
  explicit NumericBlowUp(const std::string& where)
      : Error("numeric blow-up: " + where) {}
};

/// A domain distribution parameter set lies outside its search box.
class OutOfBox : public Error {
 public:
  explicit OutOfBox(const std::string& what) : Error("out-of-box: " + what) {}
};

/// Kernel matrix could not be factorized even at maximum jitter.
class IllConditioned : public Error {
 public:
  explicit IllConditioned(const std::string& what)
      : Error("ill-conditioned: " + what) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& what, std::size_t expected,
                    std::size_t got)
      : Error("dimension mismatch: " + what + " (expected " +
              std::to_string(expected) + ", got " + std::to_string(got) +
              ")") {}
};

/// Schema violation in a config file. `key_path` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& reason)
      : Error(key_path + ": " + reason), key_path_(std::move(key_path)) {}

  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace bayrn
