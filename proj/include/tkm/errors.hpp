#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tkm {

/// Quadrature or root finding failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The neighbor graph cannot be used by the dynamics (an isolated node).
class GraphBuildError : public std::runtime_error {
 public:
  GraphBuildError(std::size_t node, const std::string& what)
      : std::runtime_error(what), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// A time integrator produced a non-finite value.
class IntegrationDiverged : public std::runtime_error {
 public:
  IntegrationDiverged(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class UnsupportedRender : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or unknown configuration entry; `key()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace tkm
