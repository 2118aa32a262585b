#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pemsig/date.hpp"
#include "pemsig/readcode.hpp"

namespace pemsig {

struct PatientRecord {
  std::string patient_id;
  Day registration_date = 0;
};

struct Prescription {
  std::string patient_id;
  std::string drug_code;
  Day date = 0;
};

struct MedicalEventRecord {
  std::string patient_id;
  Readcode code;
  Day date = 0;
};

struct DatedEvent {
  Readcode code;
  Day date = 0;

  friend bool operator==(const DatedEvent&, const DatedEvent&) = default;
};

struct CohortMember {
  std::string patient_id;
  std::vector<Day> prescriptions;  // dates of the cohort drug, ascending
  std::vector<DatedEvent> events;  // all medical events, ascending by date
};

/// One drug's study population: every retained patient with their
/// prescriptions of that drug and their full medical history, members
/// ordered by ascending patient_id.
struct Cohort {
  std::string drug_code;
  std::vector<CohortMember> members;

  std::size_t population_size() const noexcept { return members.size(); }
};

// Table loaders. Input format is documented in the README: UTF-8 CSV with
// a header row, dates in ISO-8601.
std::vector<PatientRecord> load_patients(const std::filesystem::path& path);
std::vector<Prescription> load_therapy(const std::filesystem::path& path);
std::vector<MedicalEventRecord> load_medical(const std::filesystem::path& path);

/// Assembles the cohort for `drug_code` from already-loaded tables.
///
/// A patient is retained iff they have at least one prescription of the
/// drug and their first such prescription falls at least
/// `min_registration_days` after their registration date. An empty result
/// is a valid cohort, not an error. Prescriptions that reference a patient
/// absent from the patient table are rejected (a silent drop would corrupt
/// the population count downstream).
Cohort build_cohort(std::span<const PatientRecord> patients,
                    std::span<const Prescription> therapy,
                    std::span<const MedicalEventRecord> medical,
                    const std::string& drug_code,
                    int min_registration_days = 365);

/// load_patients/load_therapy/load_medical + build_cohort in one step.
Cohort load_cohort(const std::filesystem::path& patients_path,
                   const std::filesystem::path& therapy_path,
                   const std::filesystem::path& medical_path,
                   const std::string& drug_code,
                   int min_registration_days = 365);

}  // namespace pemsig
