#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace massimo {

/// Non-fatal diagnostics collected along the pipeline and copied into the report.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message)
{
  if (sink) sink->push_back(std::move(message));
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed JSON. `byte_offset` points at the byte where the parser gave up.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// Well-formed JSON that does not match the expected document shape.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Too few samples for the requested computation.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Fewer points than model parameters.
class FitError : public InsufficientDataError {
 public:
  using InsufficientDataError::InsufficientDataError;
};

/// Geometry that makes a computation ill-posed (vertical queue, coincident endpoints).
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RenderError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace massimo
