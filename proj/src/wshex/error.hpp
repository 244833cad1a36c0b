#pragma once

#include <stdexcept>
#include <string>

namespace wshex {

enum class ErrorCode {
  InvalidArgument,
  DuplicateStatementId,
  ParseError,
  RangeError,
  UnknownShape,
  MalformedLine,
  OversizeLine,
  UnsupportedSnak,
  EngineLimit,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wshex
