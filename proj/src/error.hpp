#pragma once

#include <stdexcept>
#include <string>

namespace convexsdp {

enum class ErrorCode {
  invalid_argument = 1,
  out_of_range,
  undefined_stencil,
  hessian_undefined,
  shape_mismatch,
  io,
  parse,
  solver,
};

// Single exception type for the core; the C layer maps `code()` onto its
// status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace convexsdp
