#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finsler {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Evaluation left the smooth region: division by a zero constant term,
/// sqrt of a non-positive constant term, a point outside the metric domain.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A metric spec or configuration that cannot describe a Finsler metric.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Singular linear algebra at a sample (indefinite g, parallel flag, ...).
class DegenerateError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

} // namespace finsler
