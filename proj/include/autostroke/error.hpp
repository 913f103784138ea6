#pragma once

#include <stdexcept>
#include <string>

namespace autostroke {

enum class ErrorCode {
  io,
  decode,
  dimension_mismatch,
  invalid_argument,
  invalid_exemplar,
  no_region,
  empty_output,
  labels_absent,
  cancelled,
  protocol,
  history_boundary,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::decode: return "decode";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::invalid_exemplar: return "invalid_exemplar";
    case ErrorCode::no_region: return "no_region";
    case ErrorCode::empty_output: return "empty_output";
    case ErrorCode::labels_absent: return "labels_absent";
    case ErrorCode::cancelled: return "cancelled";
    case ErrorCode::protocol: return "protocol";
    case ErrorCode::history_boundary: return "history_boundary";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace autostroke
