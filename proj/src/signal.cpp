#include "pemsig/signal.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "pemsig/csv.hpp"
#include "pemsig/errors.hpp"
#include "pemsig/stats.hpp"

namespace pemsig {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string sci6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

SelectionMethod method_from_name(const std::string& name) {
  if (name == "ttest") return SelectionMethod::TTest;
  if (name == "ranksum") return SelectionMethod::RankSum;
  if (name == "ratio") return SelectionMethod::RatioRank;
  throw Error(Errc::SchemaError, "unknown method \"" + name + "\"");
}

constexpr std::string_view kTsvHeader =
    "rank\treadcode\tdescription\tn_before\tn_after\tr1\tr2_percent\tp_value";

}  // namespace

const char* method_name(SelectionMethod method) noexcept {
  switch (method) {
    case SelectionMethod::TTest: return "ttest";
    case SelectionMethod::RankSum: return "ranksum";
    case SelectionMethod::RatioRank: return "ratio";
  }
  return "ttest";
}

SignalTable detect(const GroupedMatrix& x, const GroupedMatrix& y,
                   const FeatureMatrix& before, const FeatureMatrix& after,
                   SelectionMethod method, double alpha, int top_k,
                   const RunLabel& label) {
  if (x.columns != y.columns || x.columns != before.columns ||
      x.columns != after.columns) {
    throw Error(Errc::ColumnMapMismatch,
                "grouped and feature matrices must share one column map");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  if (top_k < 1) {
    throw std::invalid_argument("top_k must be >= 1");
  }

  SignalTable table;
  table.meta.drug_code = label.drug_code;
  table.meta.level = label.level;
  table.meta.method = method;
  table.meta.window_days = label.window_days;
  table.meta.group_size = x.group_size;
  table.meta.population = before.cells.rows();
  table.meta.group_count = static_cast<int>(x.counts.rows());
  table.meta.alpha = alpha;

  const std::int64_t population = before.cells.rows();
  std::vector<SignalRow> rows;
  rows.reserve(static_cast<std::size_t>(x.counts.cols()));
  for (Eigen::Index j = 0; j < x.counts.cols(); ++j) {
    const std::int64_t n_before =
        before.cells.col(j).cast<std::int64_t>().sum();
    const std::int64_t n_after = after.cells.col(j).cast<std::int64_t>().sum();
    if (n_after == 0) continue;  // nothing observed post-exposure

    const TestResult test =
        method == SelectionMethod::RankSum
            ? rank_sum(x.counts.col(j), y.counts.col(j))
            : welch_t(x.counts.col(j), y.counts.col(j));
    const RatioPair ratio = ratios(n_before, n_after, population);

    SignalRow row;
    row.code = x.columns[static_cast<std::size_t>(j)];
    row.n_before = n_before;
    row.n_after = n_after;
    row.r1 = ratio.r1;
    row.r2_percent = ratio.r2_percent;
    row.p_value = test.p_value;
    row.method = method;
    rows.push_back(std::move(row));
  }

  if (method == SelectionMethod::RatioRank) {
    std::erase_if(rows, [&](const SignalRow& r) { return !(r.p_value < alpha); });
    std::sort(rows.begin(), rows.end(),
              [](const SignalRow& a, const SignalRow& b) {
                if (a.r1 != b.r1) return a.r1 > b.r1;
                if (a.n_after != b.n_after) return a.n_after > b.n_after;
                return a.code < b.code;
              });
  } else {
    std::sort(rows.begin(), rows.end(),
              [](const SignalRow& a, const SignalRow& b) {
                if (a.p_value != b.p_value) return a.p_value < b.p_value;
                if (a.r1 != b.r1) return a.r1 > b.r1;
                return a.code < b.code;
              });
  }
  if (rows.size() > static_cast<std::size_t>(top_k)) {
    rows.resize(static_cast<std::size_t>(top_k));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].rank = static_cast<int>(i) + 1;
  }
  table.rows = std::move(rows);
  return table;
}

ReferenceAdrSet load_reference_set(const std::filesystem::path& path,
                                   std::string label) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::FileError, "cannot open " + path.string());
  }
  ReferenceAdrSet set;
  set.label = std::move(label);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    if (entry.size() > Readcode::kLength) {
      throw SchemaError(path.filename().string(), line_no,
                        "prefix \"" + entry + "\" longer than 7 characters");
    }
    for (char c : entry) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.') {
        throw SchemaError(path.filename().string(), line_no,
                          "invalid character in prefix \"" + entry + "\"");
      }
    }
    set.prefixes.push_back(entry);
  }
  if (set.prefixes.empty()) {
    throw Error(Errc::EmptyReferenceSet,
                path.string() + " contains no reference entries");
  }
  return set;
}

bool matches_reference(const ReferenceAdrSet& reference, const Readcode& code) {
  const std::string_view text = code.text();
  return std::any_of(reference.prefixes.begin(), reference.prefixes.end(),
                     [&](const std::string& prefix) {
                       return text.substr(0, prefix.size()) == prefix;
                     });
}

double evaluate_topk(const SignalTable& table, const ReferenceAdrSet& reference,
                     int k) {
  if (k < 1) {
    throw std::invalid_argument("k must be >= 1");
  }
  if (table.rows.empty()) {
    throw std::invalid_argument("cannot evaluate an empty signal table");
  }
  if (reference.prefixes.empty()) {
    throw Error(Errc::EmptyReferenceSet, "reference set has no entries");
  }
  const std::size_t considered =
      std::min(table.rows.size(), static_cast<std::size_t>(k));
  std::size_t matched = 0;
  for (std::size_t i = 0; i < considered; ++i) {
    if (matches_reference(reference, table.rows[i].code)) ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(k);
}

CodeDictionary load_dictionary(const std::filesystem::path& path) {
  static constexpr std::string_view header[] = {"readcode", "description"};
  CodeDictionary dict;
  for (auto& row : read_csv(path, header)) {
    dict[row.fields[0]] = row.fields[1];
  }
  return dict;
}

void apply_dictionary(SignalTable& table, const CodeDictionary& dictionary) {
  for (auto& row : table.rows) {
    if (auto it = dictionary.find(row.code.str()); it != dictionary.end()) {
      row.description = it->second;
    }
  }
}

void write_signal_table_tsv(const SignalTable& table, std::ostream& out) {
  const RunMetadata& m = table.meta;
  char alpha[32];
  std::snprintf(alpha, sizeof alpha, "%g", m.alpha);
  out << "# drug=" << m.drug_code << '\n'
      << "# level=" << m.level << '\n'
      << "# method=" << method_name(m.method) << '\n'
      << "# window_days=" << m.window_days << '\n'
      << "# group_size=" << m.group_size << '\n'
      << "# N=" << m.population << '\n'
      << "# g=" << m.group_count << '\n'
      << "# alpha=" << alpha << '\n'
      << kTsvHeader << '\n';
  for (const auto& row : table.rows) {
    out << row.rank << '\t' << row.code.text() << '\t' << row.description
        << '\t' << row.n_before << '\t' << row.n_after << '\t'
        << fixed2(row.r1) << '\t' << fixed2(row.r2_percent) << '\t'
        << sci6(row.p_value) << '\n';
  }
}

void write_signal_table_json(const SignalTable& table, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["metadata"] = {{"drug", table.meta.drug_code},
                     {"level", table.meta.level},
                     {"method", method_name(table.meta.method)},
                     {"window_days", table.meta.window_days},
                     {"group_size", table.meta.group_size},
                     {"N", table.meta.population},
                     {"g", table.meta.group_count},
                     {"alpha", table.meta.alpha}};
  auto& rows = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"rank", row.rank},
                    {"readcode", row.code.str()},
                    {"description", row.description},
                    {"n_before", row.n_before},
                    {"n_after", row.n_after},
                    {"r1", row.r1},
                    {"r2_percent", row.r2_percent},
                    {"p_value", row.p_value}});
  }
  out << doc.dump(2) << '\n';
}

namespace {

SignalTable read_signal_table_json(const std::filesystem::path& path,
                                   std::ifstream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaError,
                path.string() + ": malformed JSON table: " + e.what());
  }
  SignalTable table;
  try {
    const auto& meta = doc.at("metadata");
    table.meta.drug_code = meta.at("drug").get<std::string>();
    table.meta.level = meta.at("level").get<int>();
    table.meta.method = method_from_name(meta.at("method").get<std::string>());
    table.meta.window_days = meta.at("window_days").get<int>();
    table.meta.group_size = meta.at("group_size").get<int>();
    table.meta.population = meta.at("N").get<std::int64_t>();
    table.meta.group_count = meta.at("g").get<int>();
    table.meta.alpha = meta.at("alpha").get<double>();
    for (const auto& row : doc.at("rows")) {
      SignalRow r;
      r.rank = row.at("rank").get<int>();
      r.code = parse_readcode(row.at("readcode").get<std::string>());
      r.description = row.at("description").get<std::string>();
      r.n_before = row.at("n_before").get<std::int64_t>();
      r.n_after = row.at("n_after").get<std::int64_t>();
      r.r1 = row.at("r1").get<double>();
      r.r2_percent = row.at("r2_percent").get<double>();
      r.p_value = row.at("p_value").get<double>();
      r.method = table.meta.method;
      table.rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaError,
                path.string() + ": incomplete JSON table: " + e.what());
  } catch (const BadReadcode& e) {
    throw Error(Errc::SchemaError, path.string() + ": " + e.what());
  }
  return table;
}

}  // namespace

SignalTable read_signal_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::FileError, "cannot open " + path.string());
  }
  // Sniff: a JSON table starts with '{'.
  int first = in.peek();
  while (first == ' ' || first == '\n' || first == '\r' || first == '\t') {
    in.get();
    first = in.peek();
  }
  if (first == '{') {
    return read_signal_table_json(path, in);
  }

  const std::string file = path.filename().string();
  SignalTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(line.substr(1, eq - 1));
      const std::string value = trim(line.substr(eq + 1));
      try {
        if (key == "drug") table.meta.drug_code = value;
        else if (key == "level") table.meta.level = std::stoi(value);
        else if (key == "method") table.meta.method = method_from_name(value);
        else if (key == "window_days") table.meta.window_days = std::stoi(value);
        else if (key == "group_size") table.meta.group_size = std::stoi(value);
        else if (key == "N") table.meta.population = std::stoll(value);
        else if (key == "g") table.meta.group_count = std::stoi(value);
        else if (key == "alpha") table.meta.alpha = std::stod(value);
      } catch (const std::exception&) {
        throw SchemaError(file, line_no, "bad metadata value for " + key);
      }
      continue;
    }
    if (!header_seen) {
      if (line != kTsvHeader) {
        throw SchemaError(file, line_no, "unexpected column header");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(line, '\t');
    if (fields.size() != 8) {
      throw SchemaError(file, line_no, "expected 8 tab-separated fields");
    }
    try {
      SignalRow row;
      row.rank = std::stoi(fields[0]);
      row.code = parse_readcode(fields[1]);
      row.description = fields[2];
      row.n_before = std::stoll(fields[3]);
      row.n_after = std::stoll(fields[4]);
      row.r1 = std::stod(fields[5]);
      row.r2_percent = std::stod(fields[6]);
      row.p_value = std::stod(fields[7]);
      row.method = table.meta.method;
      table.rows.push_back(std::move(row));
    } catch (const BadReadcode& e) {
      throw SchemaError(file, line_no, e.what());
    } catch (const std::exception&) {
      throw SchemaError(file, line_no, "unparseable numeric field");
    }
  }
  if (!header_seen) {
    throw SchemaError(file, line_no ? line_no : 1, "no table header found");
  }
  return table;
}

}  // namespace pemsig
