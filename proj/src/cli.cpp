#include "pemsig/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "pemsig/errors.hpp"
#include "pemsig/ingest.hpp"
#include "pemsig/matrix.hpp"
#include "pemsig/signal.hpp"
#include "pemsig/synthgen.hpp"

namespace pemsig {

namespace {

struct DetectArgs {
  std::string patients, therapy, medical, drug;
  int window_days = 60;
  int group_size = 100;
  int level = 5;
  SelectionMethod method = SelectionMethod::TTest;
  double alpha = 0.05;
  int top_k = 20;
  TailPolicy tail = TailPolicy::Baseline;
  int min_registration_days = 365;
  std::string format = "tsv";
  std::string out_path;
  std::string dictionary;
  std::string dump_matrices;
};

struct GenerateArgs {
  std::string out_dir;
  std::string config_path;
  std::vector<std::string> planted;
};

struct EvaluateArgs {
  std::string table;
  std::string reference;
  int k = 20;
};

int run_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
  const Cohort cohort = load_cohort(a.patients, a.therapy, a.medical, a.drug,
                                    a.min_registration_days);
  err << "cohort for " << a.drug << ": N=" << cohort.population_size() << "\n";

  auto matrices = build_feature_matrices(cohort, a.window_days, a.tail);
  if (a.level == 3) {
    matrices.before = merge_to_level3(matrices.before);
    matrices.after = merge_to_level3(matrices.after);
  }
  if (!a.dump_matrices.empty()) {
    std::ofstream dump(a.dump_matrices, std::ios::binary);
    if (!dump) throw Error(Errc::IoError, "cannot write " + a.dump_matrices);
    dump_sparse_triplets(matrices.before, matrices.after, dump);
  }
  const auto grouped = group_patients(matrices.before, matrices.after, a.group_size);
  SignalTable table =
      detect(grouped.x, grouped.y, matrices.before, matrices.after, a.method,
             a.alpha, a.top_k, {a.drug, a.level, a.window_days});
  if (!a.dictionary.empty()) {
    apply_dictionary(table, load_dictionary(a.dictionary));
  }

  auto write = [&](std::ostream& sink) {
    if (a.format == "json") {
      write_signal_table_json(table, sink);
    } else {
      write_signal_table_tsv(table, sink);
    }
  };
  if (a.out_path.empty()) {
    write(out);
  } else {
    std::ofstream file(a.out_path, std::ios::binary);
    if (!file) throw Error(Errc::IoError, "cannot write " + a.out_path);
    write(file);
  }
  return 0;
}

int run_generate(const GenerateArgs& a, const SynthConfig& config,
                 std::ostream& err) {
  const SynthSummary summary = generate(config, a.out_dir);
  err << "wrote " << summary.patients << " patients, " << summary.therapy_rows
      << " prescriptions, " << summary.medical_rows << " medical events to "
      << a.out_dir << "\n";
  if (!summary.planted_codes.empty()) {
    err << "planted:";
    for (const auto& code : summary.planted_codes) err << ' ' << code;
    err << "\n";
  }
  return 0;
}

int run_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const SignalTable table = read_signal_table(a.table);
  const ReferenceAdrSet reference = load_reference_set(a.reference);
  const double acc = evaluate_topk(table, reference, a.k);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", acc);
  out << buf << "\n";
  return 0;
}

PlantedSignal parse_planted_flag(const std::string& value) {
  const auto colon = value.find(':');
  if (colon == std::string::npos) {
    throw CLI::ValidationError("--plant", "expected CODE:MULTIPLIER");
  }
  try {
    return {value.substr(0, colon), std::stod(value.substr(colon + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--plant", "bad multiplier in \"" + value + "\"");
  }
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detects adverse-drug-reaction signals from prescription-event"
               " monitoring CSV tables."};
  app.name("pemsig");
  app.require_subcommand(1);

  const std::map<std::string, SelectionMethod> methods{
      {"ttest", SelectionMethod::TTest},
      {"ranksum", SelectionMethod::RankSum},
      {"ratio", SelectionMethod::RatioRank}};
  const std::map<std::string, TailPolicy> tails{
      {"baseline", TailPolicy::Baseline}, {"discard", TailPolicy::Discarded}};

  DetectArgs det;
  auto* detect_cmd = app.add_subcommand(
      "detect", "Run the full pipeline and emit a ranked signal table");
  detect_cmd->add_option("--patients", det.patients, "patients.csv path")->required();
  detect_cmd->add_option("--therapy", det.therapy, "therapy.csv path")->required();
  detect_cmd->add_option("--medical", det.medical, "medical.csv path")->required();
  detect_cmd->add_option("--drug", det.drug, "drug code defining the cohort")->required();
  detect_cmd->add_option("--window-days", det.window_days, "observation window length")
      ->check(CLI::PositiveNumber)->capture_default_str();
  detect_cmd->add_option("--group-size", det.group_size, "patients per group")
      ->check(CLI::PositiveNumber)->capture_default_str();
  detect_cmd->add_option("--level", det.level, "code granularity (3 or 5)")
      ->check(CLI::IsMember({3, 5}))->capture_default_str();
  detect_cmd->add_option("--method", det.method, "selection method")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case))
      ->default_str("ttest");
  const CLI::Validator open_unit(
      [](std::string& value) -> std::string {
        double v = 0.0;
        try {
          v = std::stod(value);
        } catch (const std::exception&) {
          return "\"" + value + "\" is not a number";
        }
        if (!(v > 0.0 && v < 1.0)) {
          return "\"" + value + "\" is not strictly between 0 and 1";
        }
        return {};
      },
      "FLOAT in (0, 1)", "OPEN_UNIT");
  detect_cmd->add_option("--alpha", det.alpha, "significance threshold")
      ->check(open_unit)
      ->capture_default_str();
  detect_cmd->add_option("--top-k", det.top_k, "rows to keep")
      ->check(CLI::PositiveNumber)->capture_default_str();
  detect_cmd->add_option("--tail-policy", det.tail,
                         "events beyond the window after the last prescription")
      ->transform(CLI::CheckedTransformer(tails, CLI::ignore_case))
      ->default_str("baseline");
  detect_cmd->add_option("--min-registration-days", det.min_registration_days,
                         "minimum registration-to-first-prescription gap")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  detect_cmd->add_option("--format", det.format, "output format")
      ->check(CLI::IsMember({"tsv", "json"}))->capture_default_str();
  detect_cmd->add_option("--out", det.out_path, "output file (default stdout)");
  detect_cmd->add_option("--dictionary", det.dictionary,
                         "optional readcode,description CSV for report decoration");
  detect_cmd->add_option("--dump-matrices", det.dump_matrices,
                         "debug dump of the binary matrices as sparse triplets");

  GenerateArgs gen;
  SynthConfig gen_config;
  auto* generate_cmd = app.add_subcommand(
      "generate", "Write a synthetic cohort with optional planted signals");
  generate_cmd->add_option("--out", gen.out_dir, "output directory")->required();
  generate_cmd->add_option("--config", gen.config_path, "key=value config file");
  auto* o_patients = generate_cmd->add_option("--patients", gen_config.n_patients,
                                              "number of patients")
                         ->check(CLI::PositiveNumber)->capture_default_str();
  auto* o_codes = generate_cmd->add_option("--codes", gen_config.n_codes,
                                           "size of the event-code universe")
                      ->check(CLI::PositiveNumber)->capture_default_str();
  auto* o_drug = generate_cmd->add_option("--drug", gen_config.drug_code,
                                          "drug code to prescribe")
                     ->capture_default_str();
  auto* o_span = generate_cmd->add_option("--span-days", gen_config.study_span_days,
                                          "study span in days")
                     ->check(CLI::PositiveNumber)->capture_default_str();
  auto* o_rate = generate_cmd->add_option("--event-rate", gen_config.base_event_rate,
                                          "per-window event probability")
                     ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  auto* o_min_rx = generate_cmd->add_option("--min-rx", gen_config.min_prescriptions,
                                            "minimum prescriptions per patient")
                       ->check(CLI::PositiveNumber)->capture_default_str();
  auto* o_max_rx = generate_cmd->add_option("--max-rx", gen_config.max_prescriptions,
                                            "maximum prescriptions per patient")
                       ->check(CLI::PositiveNumber)->capture_default_str();
  auto* o_window = generate_cmd->add_option("--window-days", gen_config.window_days,
                                            "exposure window used for planting")
                       ->check(CLI::PositiveNumber)->capture_default_str();
  auto* o_seed = generate_cmd->add_option("--seed", gen_config.seed, "RNG seed")
                     ->capture_default_str();
  generate_cmd->add_option("--plant", gen.planted,
                           "planted signal as CODE:MULTIPLIER (repeatable)");

  EvaluateArgs eva;
  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "Score a signal table against a reference reaction list");
  evaluate_cmd->add_option("--table", eva.table, "signal table (TSV or JSON)")->required();
  evaluate_cmd->add_option("--reference", eva.reference,
                           "reference file, one code prefix per line")->required();
  evaluate_cmd->add_option("--k", eva.k, "evaluation depth")
      ->check(CLI::PositiveNumber)->capture_default_str();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));

    if (app.got_subcommand(generate_cmd)) {
      SynthConfig config = gen_config;
      if (!gen.config_path.empty()) {
        // Config file first, explicit flags win.
        config = parse_synth_config(gen.config_path);
        if (*o_patients) config.n_patients = gen_config.n_patients;
        if (*o_codes) config.n_codes = gen_config.n_codes;
        if (*o_drug) config.drug_code = gen_config.drug_code;
        if (*o_span) config.study_span_days = gen_config.study_span_days;
        if (*o_rate) config.base_event_rate = gen_config.base_event_rate;
        if (*o_min_rx) config.min_prescriptions = gen_config.min_prescriptions;
        if (*o_max_rx) config.max_prescriptions = gen_config.max_prescriptions;
        if (*o_window) config.window_days = gen_config.window_days;
        if (*o_seed) config.seed = gen_config.seed;
      }
      for (const auto& entry : gen.planted) {
        config.planted.push_back(parse_planted_flag(entry));
      }
      return run_generate(gen, config, err);
    }
    if (app.got_subcommand(detect_cmd)) {
      return run_detect(det, out, err);
    }
    return run_evaluate(eva, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    err << "pemsig: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const BadReadcode& e) {
    err << "pemsig: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "pemsig: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace pemsig
