#pragma once

#include <stdexcept>
#include <string>

namespace wildnet {

// Base class for everything this library throws; catch this at the CLI
// boundary to map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (JSON, JSONL, raw raster). Messages carry the
// source name and line number where that is known.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A frame that violates its own structural invariants.
class FrameError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration: bad thresholds, missing ego pose, broken scenario.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class CodecErrorKind {
  range,       // encode-side: field value outside its declared range
  truncation,  // buffer shorter (or longer) than the layout demands
  padding,     // nonzero pad bits
  semantic,    // decoded value violates a message invariant
};

class CodecError : public Error {
 public:
  CodecError(CodecErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  CodecErrorKind kind() const { return kind_; }

 private:
  CodecErrorKind kind_;
};

// Socket-level failure; message includes the endpoint.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Evaluation input problems: zero ground truths, mismatched image ids.
class EvalError : public Error {
 public:
  using Error::Error;
};

}  // namespace wildnet
