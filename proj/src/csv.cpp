#include "pemsig/csv.hpp"

#include <fstream>

#include "pemsig/errors.hpp"

namespace pemsig {

std::vector<std::string> split_fields(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

namespace {

std::string strip_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<CsvRow> read_csv(const std::filesystem::path& path,
                             std::span<const std::string_view> header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::FileError, "cannot open " + path.string());
  }
  const std::string file = path.filename().string();

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw SchemaError(file, 1, "missing header row");
  }
  ++line_no;
  line = strip_line(std::move(line));
  if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0) {
    line.erase(0, 3);  // UTF-8 BOM
  }
  auto fields = split_fields(line, ',');
  bool header_ok = fields.size() == header.size();
  for (std::size_t i = 0; header_ok && i < fields.size(); ++i) {
    header_ok = fields[i] == header[i];
  }
  if (!header_ok) {
    std::string expected;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) expected += ',';
      expected += header[i];
    }
    throw SchemaError(file, 1, "bad header, expected \"" + expected + "\"");
  }

  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_line(std::move(line));
    if (line.empty()) continue;
    CsvRow row{split_fields(line, ','), line_no};
    if (row.fields.size() != header.size()) {
      throw SchemaError(file, line_no,
                        "expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(row.fields.size()));
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) {
    throw Error(Errc::FileError, "read failure on " + path.string());
  }
  return rows;
}

}  // namespace pemsig
