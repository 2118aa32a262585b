#include "pemsig/synthgen.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "pemsig/date.hpp"
#include "pemsig/errors.hpp"
#include "pemsig/ingest.hpp"
#include "pemsig/rng.hpp"

namespace pemsig {

namespace {

// Day 0 of every generated timeline; an arbitrary anchor well inside the
// civil calendar.
const Day kStudyStart = *parse_date("2015-01-01");

struct Region {
  Day start = 0;
  Day length = 0;
  bool exposed = false;
};

// The observation regions a patient's prescriptions induce: the pre-first
// baseline window, per-prescription exposure windows, the far parts of
// wide gaps, and one trailing baseline stretch.
std::vector<Region> observation_regions(const std::vector<Day>& rx, int w) {
  std::vector<Region> regions;
  regions.push_back({static_cast<Day>(rx.front() - w), static_cast<Day>(w), false});
  for (std::size_t l = 0; l + 1 < rx.size(); ++l) {
    const Day gap = rx[l + 1] - rx[l];
    const Day exposed_len = std::min<Day>(gap, w);
    if (exposed_len > 0) regions.push_back({rx[l], exposed_len, true});
    if (gap > w) {
      regions.push_back({static_cast<Day>(rx[l] + w), static_cast<Day>(gap - w), false});
    }
  }
  regions.push_back({rx.back(), static_cast<Day>(w), true});
  regions.push_back({static_cast<Day>(rx.back() + w), static_cast<Day>(w), false});
  return regions;
}

void check(bool ok, const char* message) {
  if (!ok) throw Error(Errc::InvalidConfig, message);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  return out;
}

std::string patient_name(std::int64_t index) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "P%07lld", static_cast<long long>(index + 1));
  return buf;
}

}  // namespace

std::vector<Readcode> synthetic_code_universe(int n_codes) {
  std::vector<Readcode> codes;
  codes.reserve(static_cast<std::size_t>(n_codes));
  for (int i = 0; i < n_codes; ++i) {
    const int group = i / 4;
    const int sibling = i % 4;
    char text[8];
    text[0] = static_cast<char>('A' + group % 26);
    text[1] = static_cast<char>('0' + (group / 26) % 10);
    text[2] = static_cast<char>('A' + (group / 260) % 26);
    text[3] = static_cast<char>('1' + sibling);
    text[4] = '.';
    text[5] = '0';
    text[6] = '0';
    codes.push_back(parse_readcode(std::string_view(text, 7)));
  }
  return codes;
}

SynthSummary generate(const SynthConfig& config,
                      const std::filesystem::path& out_dir) {
  check(config.n_patients >= 1, "n_patients must be >= 1");
  check(config.n_codes >= 1 && config.n_codes <= 26 * 10 * 26 * 4,
        "n_codes out of range");
  check(!config.drug_code.empty(), "drug_code must be non-empty");
  check(config.study_span_days >= 6 * config.window_days,
        "study_span_days too short for the window layout");
  check(config.base_event_rate >= 0.0 && config.base_event_rate <= 1.0,
        "base_event_rate must lie in [0, 1]");
  check(config.min_prescriptions >= 1 &&
            config.min_prescriptions <= config.max_prescriptions,
        "prescription range must satisfy 1 <= min <= max");
  check(config.window_days >= 1, "window_days must be >= 1");

  const auto universe = synthetic_code_universe(config.n_codes);
  std::unordered_map<std::string, double> multiplier;
  for (const auto& planted : config.planted) {
    check(planted.odds_multiplier >= 0.0, "odds multiplier must be >= 0");
    const bool known = std::any_of(
        universe.begin(), universe.end(),
        [&](const Readcode& c) { return c.text() == planted.code; });
    if (!known) {
      throw Error(Errc::InvalidConfig, "planted code \"" + planted.code +
                                           "\" is not in the code universe");
    }
    multiplier[planted.code] = planted.odds_multiplier;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + out_dir.string());

  auto patients_csv = open_out(out_dir / "patients.csv");
  auto therapy_csv = open_out(out_dir / "therapy.csv");
  auto medical_csv = open_out(out_dir / "medical.csv");
  patients_csv << "patient_id,registration_date\n";
  therapy_csv << "patient_id,drug_code,prescription_date\n";
  medical_csv << "patient_id,readcode,event_date\n";

  SynthSummary summary;
  summary.patients = config.n_patients;
  const int w = config.window_days;
  // Prescription day budget keeps the trailing windows inside the span:
  // first rx in [w, 3w], gaps in [w/2, 3w], then rx_last + 2w must fit.
  const int max_rx_day =
      config.study_span_days - 2 * w -
      (config.max_prescriptions - 1) * 3 * w;
  check(max_rx_day >= w, "study_span_days too short for max_prescriptions");

  for (std::int64_t p = 0; p < config.n_patients; ++p) {
    const std::string id = patient_name(p);
    auto rng = keyed_rng(config.seed, 0x7061746965ull /* patient stream */, static_cast<std::uint64_t>(p));

    std::vector<Day> rx;
    const int k = static_cast<int>(rng.uniform_int(config.min_prescriptions,
                                                   config.max_prescriptions));
    Day day = kStudyStart + static_cast<Day>(rng.uniform_int(w, max_rx_day));
    rx.push_back(day);
    for (int l = 1; l < k; ++l) {
      day += static_cast<Day>(rng.uniform_int(w / 2, 3 * w));
      rx.push_back(day);
    }

    const Day registration =
        rx.front() - static_cast<Day>(365 + rng.uniform_int(0, 365));
    patients_csv << id << ',' << format_date(registration) << '\n';
    for (Day d : rx) {
      therapy_csv << id << ',' << config.drug_code << ',' << format_date(d)
                  << '\n';
      ++summary.therapy_rows;
    }

    const auto regions = observation_regions(rx, w);
    std::vector<DatedEvent> events;
    for (int c = 0; c < config.n_codes; ++c) {
      const auto& code = universe[static_cast<std::size_t>(c)];
      double boost = 1.0;
      if (auto it = multiplier.find(code.str()); it != multiplier.end()) {
        boost = it->second;
      }
      for (std::size_t r = 0; r < regions.size(); ++r) {
        const auto& region = regions[r];
        const double rate = region.exposed
                                ? std::min(1.0, config.base_event_rate * boost)
                                : config.base_event_rate;
        auto draw = keyed_rng(config.seed,
                              mix_key(0x6576656e74ull /* event stream */,
                                      static_cast<std::uint64_t>(p)),
                              static_cast<std::uint64_t>(c),
                              static_cast<std::uint64_t>(r));
        if (draw.bernoulli(rate)) {
          const Day at = region.start + static_cast<Day>(draw.below(
                             static_cast<std::uint64_t>(region.length)));
          events.push_back({code, at});
        }
      }
    }
    std::sort(events.begin(), events.end(),
              [](const DatedEvent& a, const DatedEvent& b) {
                return a.date != b.date ? a.date < b.date : a.code < b.code;
              });
    for (const auto& ev : events) {
      medical_csv << id << ',' << ev.code.text() << ',' << format_date(ev.date)
                  << '\n';
      ++summary.medical_rows;
    }
  }

  auto truth = open_out(out_dir / "truth.txt");
  for (const auto& planted : config.planted) {
    truth << planted.code << '\n';
    summary.planted_codes.push_back(planted.code);
  }

  summary.files_written = {out_dir / "patients.csv", out_dir / "therapy.csv",
                           out_dir / "medical.csv", out_dir / "truth.txt"};
  for (auto* stream : {&patients_csv, &therapy_csv, &medical_csv, &truth}) {
    stream->flush();
    if (!*stream) throw Error(Errc::IoError, "write failure in " + out_dir.string());
  }
  return summary;
}

SynthConfig parse_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileError, "cannot open " + path.string());

  SynthConfig config;
  config.planted.clear();
  std::string line;
  std::size_t line_no = 0;
  const std::string file = path.filename().string();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view = line;
    const auto hash = view.find('#');
    if (hash != std::string_view::npos) view = view.substr(0, hash);
    while (!view.empty() && (view.back() == ' ' || view.back() == '\t')) {
      view.remove_suffix(1);
    }
    while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) {
      view.remove_prefix(1);
    }
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw SchemaError(file, line_no, "expected key=value");
    }
    const std::string key{view.substr(0, eq)};
    const std::string value{view.substr(eq + 1)};
    try {
      if (key == "n_patients") config.n_patients = std::stoll(value);
      else if (key == "n_codes") config.n_codes = std::stoi(value);
      else if (key == "drug_code") config.drug_code = value;
      else if (key == "study_span_days") config.study_span_days = std::stoi(value);
      else if (key == "base_event_rate") config.base_event_rate = std::stod(value);
      else if (key == "min_prescriptions") config.min_prescriptions = std::stoi(value);
      else if (key == "max_prescriptions") config.max_prescriptions = std::stoi(value);
      else if (key == "window_days") config.window_days = std::stoi(value);
      else if (key == "seed") config.seed = std::stoull(value);
      else if (key == "planted") {
        const auto colon = value.find(':');
        if (colon == std::string::npos) {
          throw SchemaError(file, line_no, "planted wants CODE:MULTIPLIER");
        }
        config.planted.push_back(
            {value.substr(0, colon), std::stod(value.substr(colon + 1))});
      } else {
        throw SchemaError(file, line_no, "unknown key \"" + key + "\"");
      }
    } catch (const SchemaError&) {
      throw;
    } catch (const std::exception&) {
      throw SchemaError(file, line_no, "bad value for \"" + key + "\"");
    }
  }
  return config;
}

}  // namespace pemsig
