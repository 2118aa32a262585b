#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pemsig/matrix.hpp"
#include "pemsig/readcode.hpp"

namespace pemsig {

enum class SelectionMethod { TTest, RankSum, RatioRank };

const char* method_name(SelectionMethod method) noexcept;

struct SignalRow {
  int rank = 0;
  Readcode code;
  std::string description;  // empty when no dictionary entry is known
  std::int64_t n_before = 0;
  std::int64_t n_after = 0;
  double r1 = 0.0;
  double r2_percent = 0.0;
  double p_value = 1.0;  // from the t-test when method is RatioRank
  SelectionMethod method = SelectionMethod::TTest;
};

struct RunMetadata {
  std::string drug_code;
  int level = 5;
  SelectionMethod method = SelectionMethod::TTest;
  int window_days = 60;
  int group_size = 100;
  std::int64_t population = 0;  // N, the full cohort size
  int group_count = 0;          // g
  double alpha = 0.05;
};

struct SignalTable {
  RunMetadata meta;
  std::vector<SignalRow> rows;
};

// Labels detect() cannot derive from its matrix arguments.
struct RunLabel {
  std::string drug_code;
  int level = 5;
  int window_days = 60;
};

/// Tests every event column of (x, y), attaches the population counts and
/// ratios taken from the full before/after matrices, and returns the
/// ranked table truncated to `top_k` rows.
///
/// Ordering: TTest and RankSum rank by ascending p (ties: descending R1,
/// then ascending code text); RatioRank keeps only columns whose t-test p
/// is below `alpha` and ranks by descending R1 (ties: descending n_after,
/// then ascending code text). Columns with no post-exposure occurrences
/// are excluded throughout.
SignalTable detect(const GroupedMatrix& x, const GroupedMatrix& y,
                   const FeatureMatrix& before, const FeatureMatrix& after,
                   SelectionMethod method, double alpha = 0.05, int top_k = 20,
                   const RunLabel& label = {});

/// Reference list of known reactions, matched by code prefix so coarse
/// entries credit fine-grained detections and vice versa.
struct ReferenceAdrSet {
  std::vector<std::string> prefixes;
  std::string label;
};

/// One prefix per line; blank lines and '#' comments are skipped.
ReferenceAdrSet load_reference_set(const std::filesystem::path& path,
                                   std::string label = "");

bool matches_reference(const ReferenceAdrSet& reference, const Readcode& code);

/// Fraction of the first min(k, rows) table rows that match the reference
/// set, divided by k (the denominator stays k even for short tables).
double evaluate_topk(const SignalTable& table, const ReferenceAdrSet& reference,
                     int k);

// Optional code -> description decoration, keyed by full code text.
using CodeDictionary = std::map<std::string, std::string>;

CodeDictionary load_dictionary(const std::filesystem::path& path);
void apply_dictionary(SignalTable& table, const CodeDictionary& dictionary);

// Serialization. TSV prints R1/R2 with two decimals and p in scientific
// notation with six significant digits; JSON carries full precision.
void write_signal_table_tsv(const SignalTable& table, std::ostream& out);
void write_signal_table_json(const SignalTable& table, std::ostream& out);

/// Reads a table previously written by either writer (sniffs the format).
SignalTable read_signal_table(const std::filesystem::path& path);

}  // namespace pemsig
