#include "ihb/error.hpp"

namespace ihb {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::unsupported_rule: return "unsupported-rule";
    case ErrorKind::integrand_overflow: return "integrand-overflow";
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::domain: return "domain";
    case ErrorKind::unsupported_parameter: return "unsupported-parameter";
    case ErrorKind::argument: return "argument";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::stencil_domain: return "stencil-domain";
    case ErrorKind::unknown_check: return "unknown-check";
    case ErrorKind::io: return "io";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

}  // namespace ihb
