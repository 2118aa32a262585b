#include "pemsig/errors.hpp"

namespace pemsig {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::FileError: return "FileError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::EmptyCohort: return "EmptyCohort";
    case Errc::EmptyPrescriptionList: return "EmptyPrescriptionList";
    case Errc::TooFewPatients: return "TooFewPatients";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooFewGroups: return "TooFewGroups";
    case Errc::EmptySample: return "EmptySample";
    case Errc::ZeroPopulation: return "ZeroPopulation";
    case Errc::DomainError: return "DomainError";
    case Errc::ColumnMapMismatch: return "ColumnMapMismatch";
    case Errc::EmptyReferenceSet: return "EmptyReferenceSet";
    case Errc::IoError: return "IoError";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Error";
}

SchemaError::SchemaError(const std::string& file, std::size_t line,
                         const std::string& message)
    : Error(Errc::SchemaError,
            file + ":" + std::to_string(line) + ": " + message),
      line_(line) {}

}  // namespace pemsig
