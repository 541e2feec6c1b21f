#pragma once

#include <stdexcept>
#include <string>

namespace spadev {

enum class ErrorCode {
  kRange = 1,
  kConfig,
  kBadMagic,
  kTruncated,
  kDimensionOverflow,
  kIo,
  kSolve,
  kInvalidArgument,
};

/// Base exception for every failure raised by the library. The code maps
/// one-to-one onto the C API status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorCode::kRange, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::kConfig, what) {}
};

class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& what) : Error(code, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

class SolveError : public Error {
 public:
  explicit SolveError(const std::string& what) : Error(ErrorCode::kSolve, what) {}
};

}  // namespace spadev
