#include "pemsig/ingest.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "pemsig/csv.hpp"
#include "pemsig/errors.hpp"

namespace pemsig {

namespace {

constexpr std::string_view kPatientsHeader[] = {"patient_id", "registration_date"};
constexpr std::string_view kTherapyHeader[] = {"patient_id", "drug_code",
                                               "prescription_date"};
constexpr std::string_view kMedicalHeader[] = {"patient_id", "readcode",
                                               "event_date"};

Day parse_date_field(const std::string& file, std::size_t line,
                     const std::string& value) {
  if (auto day = parse_date(value)) return *day;
  throw SchemaError(file, line, "unparseable date \"" + value + "\"");
}

void require_nonempty(const std::string& file, std::size_t line,
                      const std::string& value, const char* what) {
  if (value.empty()) {
    throw SchemaError(file, line, std::string("empty ") + what);
  }
}

}  // namespace

std::vector<PatientRecord> load_patients(const std::filesystem::path& path) {
  const std::string file = path.filename().string();
  std::vector<PatientRecord> out;
  std::unordered_set<std::string> seen;
  for (auto& row : read_csv(path, kPatientsHeader)) {
    require_nonempty(file, row.line, row.fields[0], "patient_id");
    if (!seen.insert(row.fields[0]).second) {
      throw SchemaError(file, row.line,
                        "duplicate patient_id \"" + row.fields[0] + "\"");
    }
    out.push_back({std::move(row.fields[0]),
                   parse_date_field(file, row.line, row.fields[1])});
  }
  return out;
}

std::vector<Prescription> load_therapy(const std::filesystem::path& path) {
  const std::string file = path.filename().string();
  std::vector<Prescription> out;
  for (auto& row : read_csv(path, kTherapyHeader)) {
    require_nonempty(file, row.line, row.fields[0], "patient_id");
    require_nonempty(file, row.line, row.fields[1], "drug_code");
    out.push_back({std::move(row.fields[0]), std::move(row.fields[1]),
                   parse_date_field(file, row.line, row.fields[2])});
  }
  return out;
}

std::vector<MedicalEventRecord> load_medical(const std::filesystem::path& path) {
  const std::string file = path.filename().string();
  std::vector<MedicalEventRecord> out;
  for (auto& row : read_csv(path, kMedicalHeader)) {
    require_nonempty(file, row.line, row.fields[0], "patient_id");
    ReadcodeIssue issue;
    auto code = try_parse_readcode(row.fields[1], &issue);
    if (!code) {
      throw SchemaError(file, row.line,
                        "invalid readcode \"" + row.fields[1] + "\"");
    }
    out.push_back({std::move(row.fields[0]), *code,
                   parse_date_field(file, row.line, row.fields[2])});
  }
  return out;
}

Cohort build_cohort(std::span<const PatientRecord> patients,
                    std::span<const Prescription> therapy,
                    std::span<const MedicalEventRecord> medical,
                    const std::string& drug_code, int min_registration_days) {
  if (min_registration_days < 0) {
    throw std::invalid_argument("min_registration_days must be >= 0");
  }

  std::unordered_map<std::string_view, Day> registration;
  registration.reserve(patients.size());
  for (const auto& p : patients) {
    registration.emplace(p.patient_id, p.registration_date);
  }

  // Prescriptions of the cohort drug, bucketed per patient. A prescription
  // whose patient is missing from the patient table is a linkage fault.
  std::unordered_map<std::string_view, std::vector<Day>> drug_dates;
  for (const auto& rx : therapy) {
    if (!registration.contains(rx.patient_id)) {
      throw Error(Errc::SchemaError,
                  "therapy row references unknown patient \"" + rx.patient_id +
                      "\"");
    }
    if (rx.drug_code == drug_code) {
      drug_dates[rx.patient_id].push_back(rx.date);
    }
  }

  Cohort cohort;
  cohort.drug_code = drug_code;
  cohort.members.reserve(drug_dates.size());
  for (auto& [patient_id, dates] : drug_dates) {
    std::sort(dates.begin(), dates.end());
    const Day registered = registration.at(patient_id);
    if (static_cast<std::int64_t>(dates.front()) - registered <
        min_registration_days) {
      continue;
    }
    CohortMember member;
    member.patient_id = std::string(patient_id);
    member.prescriptions = std::move(dates);
    cohort.members.push_back(std::move(member));
  }
  std::sort(cohort.members.begin(), cohort.members.end(),
            [](const CohortMember& a, const CohortMember& b) {
              return a.patient_id < b.patient_id;
            });

  std::unordered_map<std::string_view, std::size_t> member_index;
  member_index.reserve(cohort.members.size());
  for (std::size_t i = 0; i < cohort.members.size(); ++i) {
    member_index.emplace(cohort.members[i].patient_id, i);
  }
  // Events of non-members are simply outside this cohort.
  for (const auto& ev : medical) {
    if (auto it = member_index.find(ev.patient_id); it != member_index.end()) {
      cohort.members[it->second].events.push_back({ev.code, ev.date});
    }
  }
  for (auto& member : cohort.members) {
    std::stable_sort(member.events.begin(), member.events.end(),
                     [](const DatedEvent& a, const DatedEvent& b) {
                       return a.date < b.date;
                     });
  }
  return cohort;
}

Cohort load_cohort(const std::filesystem::path& patients_path,
                   const std::filesystem::path& therapy_path,
                   const std::filesystem::path& medical_path,
                   const std::string& drug_code, int min_registration_days) {
  const auto patients = load_patients(patients_path);
  const auto therapy = load_therapy(therapy_path);
  const auto medical = load_medical(medical_path);
  return build_cohort(patients, therapy, medical, drug_code,
                      min_registration_days);
}

}  // namespace pemsig
