#include "avp/error.hpp"

namespace avp {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::degenerate_input: return "degenerate-input";
    case Errc::degenerate_descriptor: return "degenerate-descriptor";
    case Errc::training_input: return "training-input";
    case Errc::numerical_underflow: return "numerical-underflow";
    case Errc::internal_consistency: return "internal-consistency";
    case Errc::resource_limit: return "resource-limit";
    case Errc::protocol_violation: return "protocol-violation";
    case Errc::hash_mismatch: return "hash-mismatch";
    case Errc::io: return "io";
  }
  return "unknown";
}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace avp
