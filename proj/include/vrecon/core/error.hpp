#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vrecon {

enum class ErrorCode {
  Dimension,
  Range,
  Decode,
  Parse,
  DegenerateMesh,
  EmptyInput,
  CutFailed,
  IdentificationFailed,
  TieUnresolved,
  ManualRequired,
  EmptyHull,
  ZeroWeights,
  SizeMismatch,
  UnresolvedViews,
  ConfigMismatch,
  Format,
  Io,
  Invalid,
};

const char* to_string(ErrorCode code);

// Every failure surfaced by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Decode failures report the byte offset at which the stream became invalid.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : Error(ErrorCode::Decode, what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(ErrorCode::Parse, what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace vrecon
