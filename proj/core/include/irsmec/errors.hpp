#pragma once

#include <stdexcept>
#include <string>

namespace irsmec {

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  /// Short machine-readable tag, e.g. "config", "dimension".
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Invalid or inconsistent scenario parameter; `field()` names the key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error("config", field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Dimension mismatch between channel blocks, detectors or phase vectors.
class DimensionError : public Error {
 public:
  DimensionError(std::string block, const std::string& message)
      : Error("dimension", block + ": " + message), block_(std::move(block)) {}
  const std::string& block() const noexcept { return block_; }

 private:
  std::string block_;
};

}  // namespace irsmec
