#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace lane3d {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PointBehindCamera : Error {
  using Error::Error;
};
struct DegenerateHomography : Error {
  using Error::Error;
};
struct HeightAtCameraCenter : Error {
  using Error::Error;
};
struct LaneDoesNotCoverYref : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct InvalidSpec : Error {
  using Error::Error;
};
struct EmptyDataset : Error {
  using Error::Error;
};

/// Malformed JSONL input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Structurally invalid record; carries the offending field name.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error("field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace lane3d
