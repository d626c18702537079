#pragma once

#include <stdexcept>
#include <string>

namespace darkstates {

/// Bad argument: wrong sizes, out-of-range indices, malformed sets.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but not physical (e.g. a decay matrix that is not PSD).
class PhysicsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A routine was asked to work outside the regime it is valid for.
class UnsupportedRegime : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Integration or factorization failed numerically.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A preparation protocol no longer reproduces its target state.
class ProtocolRegression : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Scenario configuration problem; carries the offending key and line when known.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& key, int line, const std::string& what)
      : InvalidArgument(format(key, line, what)), key_(key), line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string msg = "config";
    if (line > 0) msg += " line " + std::to_string(line);
    if (!key.empty()) msg += " key '" + key + "'";
    return msg + ": " + what;
  }

  std::string key_;
  int line_;
};

}  // namespace darkstates
