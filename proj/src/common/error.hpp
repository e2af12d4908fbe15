#pragma once

#include <stdexcept>
#include <string>

namespace vqmorl {

enum class ErrorCode {
  InvalidArgument = 1,
  InvalidGate,
  EncodingRange,
  Config,
  Io,
  State,
  Training,
  Architecture,
};

/// Base class for every error raised by the library. The C API maps `code()`
/// onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::Config, what) {}
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& what) : Error(ErrorCode::Training, what) {}
};

}  // namespace vqmorl
