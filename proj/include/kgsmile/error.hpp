#pragma once

#include <stdexcept>
#include <string>

namespace kgsmile {

enum class ErrorKind {
  Parse,          // malformed input syntax
  Field,          // missing or mistyped required field
  EmptyGraph,     // an operation produced or received a graph with no triples
  UnknownEntity,  // entity lookup failed
  Shape,          // length / dimension mismatch
  Contract,       // caller violated a precondition (NaN, bad config, ...)
  TooSmall,       // graph too small for perturbation
  Undefined,      // statistic undefined for the given input
  Remote,         // transport / HTTP failure talking to an endpoint (retryable)
  Invariant,      // internal invariant violated
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  bool retryable() const noexcept { return kind_ == ErrorKind::Remote; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t byte_offset, const std::string& what)
      : Error(ErrorKind::Parse, what + " (at byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class FieldError : public Error {
 public:
  explicit FieldError(std::string path, const std::string& what)
      : Error(ErrorKind::Field, path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace kgsmile
