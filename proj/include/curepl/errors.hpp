#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curepl {

// Process exit codes used by the command-line tool. Each computation error
// maps to its own code so scripts can tell them apart.
enum class ErrorCode : int {
  kUsage = 2,
  kDegenerateWeights = 3,
  kEmptySample = 4,
  kContainsCensoring = 5,
  kInsufficientNeighbors = 6,
  kInvalidRange = 7,
  kOutOfRange = 8,
  kMalformedRow = 9,
  kEmptyFile = 10,
  kIoFailure = 11,
  kCheckFailed = 12,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// No observation lies within one bandwidth of the evaluation point.
class DegenerateWeights : public Error {
 public:
  explicit DegenerateWeights(const std::string& what)
      : Error(ErrorCode::kDegenerateWeights, what) {}
};

class EmptySample : public Error {
 public:
  EmptySample() : Error(ErrorCode::kEmptySample, "empty sample") {}
};

class ContainsCensoring : public Error {
 public:
  ContainsCensoring()
      : Error(ErrorCode::kContainsCensoring,
              "sample contains censored records") {}
};

class InsufficientNeighbors : public Error {
 public:
  explicit InsufficientNeighbors(const std::string& what)
      : Error(ErrorCode::kInsufficientNeighbors, what) {}
};

class InvalidRange : public Error {
 public:
  explicit InvalidRange(const std::string& what)
      : Error(ErrorCode::kInvalidRange, what) {}
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& what)
      : Error(ErrorCode::kOutOfRange, what) {}
};

class MalformedRow : public Error {
 public:
  MalformedRow(std::size_t line, const std::string& reason)
      : Error(ErrorCode::kMalformedRow,
              "malformed row at line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyFile : public Error {
 public:
  explicit EmptyFile(const std::string& path)
      : Error(ErrorCode::kEmptyFile, "no data rows in " + path) {}
};

class IoFailure : public Error {
 public:
  explicit IoFailure(const std::string& what)
      : Error(ErrorCode::kIoFailure, what) {}
};

}  // namespace curepl
