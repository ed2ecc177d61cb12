#pragma once

#include <stdexcept>
#include <string>

namespace cmfd {

enum class ErrorCode {
  io,
  format,
  unsupported_format,
  empty_input,
  parameter,
  insufficient_input,
  encoding,
  undefined_density,
  undefined_correlation,
  undefined_survival,
  spec,
  input,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::format: return "format";
    case ErrorCode::unsupported_format: return "unsupported-format";
    case ErrorCode::empty_input: return "empty-input";
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::insufficient_input: return "insufficient-input";
    case ErrorCode::encoding: return "encoding";
    case ErrorCode::undefined_density: return "undefined-density";
    case ErrorCode::undefined_correlation: return "undefined-correlation";
    case ErrorCode::undefined_survival: return "undefined-survival";
    case ErrorCode::spec: return "spec";
    case ErrorCode::input: return "input";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + " error: " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the error-kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace cmfd
