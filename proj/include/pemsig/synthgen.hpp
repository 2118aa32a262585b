#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pemsig/readcode.hpp"

namespace pemsig {

struct PlantedSignal {
  std::string code;              // must belong to the generated universe
  double odds_multiplier = 1.0;  // scales occurrence odds inside exposure windows
};

struct SynthConfig {
  std::int64_t n_patients = 2000;
  int n_codes = 200;
  std::string drug_code = "DRUG01";
  int study_span_days = 720;
  // Chance that a given code fires in a given observation window of a
  // patient (one draw per window, matching the binary matrix semantics).
  double base_event_rate = 0.05;
  int min_prescriptions = 1;
  int max_prescriptions = 3;
  int window_days = 60;
  std::vector<PlantedSignal> planted;
  std::uint64_t seed = 1;
};

struct SynthSummary {
  std::vector<std::filesystem::path> files_written;
  std::vector<std::string> planted_codes;
  std::int64_t patients = 0;
  std::int64_t therapy_rows = 0;
  std::int64_t medical_rows = 0;
};

/// Deterministic code universe: `n_codes` valid level-4 codes in groups of
/// four siblings sharing a level-3 prefix.
std::vector<Readcode> synthetic_code_universe(int n_codes);

/// Writes patients.csv, therapy.csv, medical.csv and truth.txt under
/// `out_dir`. Identical (config, seed) produce byte-identical files.
SynthSummary generate(const SynthConfig& config,
                      const std::filesystem::path& out_dir);

/// Flat key=value config file; '#' comments and blank lines are skipped.
/// Planted signals are given as repeated `planted=CODE:MULTIPLIER` lines.
SynthConfig parse_synth_config(const std::filesystem::path& path);

}  // namespace pemsig
