#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pemsig {

// Error categories raised by the library. The CLI maps any of these to
// exit code 2 (data error); command-line misuse is handled separately.
enum class Errc {
  FileError,
  SchemaError,
  EmptyCohort,
  EmptyPrescriptionList,
  TooFewPatients,
  LengthMismatch,
  TooFewGroups,
  EmptySample,
  ZeroPopulation,
  DomainError,
  ColumnMapMismatch,
  EmptyReferenceSet,
  IoError,
  InvalidConfig,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

// Malformed row or header in an input table. Carries the 1-based line
// number within the file (the header row is line 1).
class SchemaError : public Error {
public:
  SchemaError(const std::string& file, std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace pemsig
