#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pemsig {

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line number in the file
};

// Minimal comma-separated reader for the plain tables this project uses:
// UTF-8, mandatory header row, no quoting. CRLF endings are tolerated and
// blank lines are skipped. Every data row must match the header's arity.
//
// Throws FileError if the file cannot be opened, SchemaError on a header
// mismatch or a row with the wrong number of fields.
std::vector<CsvRow> read_csv(const std::filesystem::path& path,
                             std::span<const std::string_view> header);

std::vector<std::string> split_fields(std::string_view line, char sep);

}  // namespace pemsig
