#pragma once

#include <stdexcept>
#include <string>

namespace usreg {

/// Error categories surfaced by the toolkit. The CLI maps each to a
/// distinct process exit code.
enum class ErrorCode {
  io_error = 1,
  malformed_header,
  size_mismatch,
  unsupported_dtype,
  invalid_data,
  degenerate_histogram,
  dimension_mismatch,
  empty_roi,
  invalid_spec,
  invalid_argument,
  non_finite_cost,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace usreg
