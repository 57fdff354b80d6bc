#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ihb {

enum class ErrorKind {
  invalid_dimension,
  unsupported_rule,
  integrand_overflow,
  parse,
  validation,
  dimension_mismatch,
  domain,
  unsupported_parameter,
  argument,
  overflow,
  stencil_domain,
  unknown_check,
  io,
  internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input text; `offset` is the byte position reported by the parser.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error(ErrorKind::parse, message), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A quadrature integrand returned a non-finite value at `node`.
class IntegrandOverflow : public Error {
 public:
  IntegrandOverflow(std::vector<double> node, const std::string& message)
      : Error(ErrorKind::integrand_overflow, message), node_(std::move(node)) {}

  const std::vector<double>& node() const noexcept { return node_; }

 private:
  std::vector<double> node_;
};

}  // namespace ihb
