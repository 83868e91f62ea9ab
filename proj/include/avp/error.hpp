#pragma once

#include <stdexcept>
#include <string>

namespace avp {

// Error categories surfaced by the core. The C API maps these one-to-one
// onto avp_status codes.
enum class Errc {
  invalid_argument = 1,
  degenerate_input,
  degenerate_descriptor,
  training_input,
  numerical_underflow,
  internal_consistency,
  resource_limit,
  protocol_violation,
  hash_mismatch,
  io,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool condition, Errc code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace avp
