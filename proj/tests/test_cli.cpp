#include "doctest.h"

#include "pemsig/cli.hpp"
#include "pemsig/signal.hpp"

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace pemsig;
using testsup::TempDir;
using testsup::write_file;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

// One generated cohort shared by the detect-oriented cases.
struct Pipeline {
  TempDir dir{"cli"};

  Pipeline() {
    const auto r = cli({"generate", "--out", dir.path().string(), "--patients",
                        "400", "--codes", "24", "--drug", "D1", "--seed", "11",
                        "--plant", "A0A1.00:6.0"});
    REQUIRE(r.code == 0);
  }

  std::vector<std::string> detect_args(std::vector<std::string> extra = {}) const {
    std::vector<std::string> args{
        "detect",  "--patients", (dir.path() / "patients.csv").string(),
        "--therapy", (dir.path() / "therapy.csv").string(),
        "--medical", (dir.path() / "medical.csv").string(),
        "--drug",  "D1"};
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  }
};

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"detect"}).code == 1);                  // missing required flags
  CHECK(cli({"frobnicate"}).code == 1);              // unknown subcommand
  CHECK(cli({"evaluate", "--table"}).code == 1);     // missing value
  const auto bad_level = cli({"detect", "--patients", "x", "--therapy", "x",
                              "--medical", "x", "--drug", "D", "--level", "4"});
  CHECK(bad_level.code == 1);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("data errors exit with 2") {
  TempDir dir("cli_data");
  const auto missing = cli({"detect", "--patients",
                            (dir.path() / "nope.csv").string(), "--therapy",
                            (dir.path() / "nope.csv").string(), "--medical",
                            (dir.path() / "nope.csv").string(), "--drug", "D1"});
  CHECK(missing.code == 2);
  CHECK(!missing.err.empty());

  // Well-formed files but a cohort too small for one group.
  write_file(dir.file("patients.csv"),
             "patient_id,registration_date\np1,2013-01-01\n");
  write_file(dir.file("therapy.csv"),
             "patient_id,drug_code,prescription_date\np1,D1,2015-01-01\n");
  write_file(dir.file("medical.csv"),
             "patient_id,readcode,event_date\np1,N245.16,2015-01-02\n");
  const auto tiny = cli({"detect", "--patients", dir.file("patients.csv").string(),
                         "--therapy", dir.file("therapy.csv").string(),
                         "--medical", dir.file("medical.csv").string(),
                         "--drug", "D1"});
  CHECK(tiny.code == 2);
  CHECK(tiny.err.find("TooFewPatients") != std::string::npos);
}

TEST_CASE("detect emits a parseable table with the requested settings") {
  Pipeline pipe;
  const auto r = cli(pipe.detect_args({"--level", "3", "--top-k", "10"}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# level=3\n") != std::string::npos);
  CHECK(r.out.find("# method=ttest\n") != std::string::npos);
  CHECK(r.out.find("# window_days=60\n") != std::string::npos);
  CHECK(r.out.find("# group_size=100\n") != std::string::npos);
  CHECK(r.out.find("# N=400\n") != std::string::npos);
  CHECK(r.out.find("# g=4\n") != std::string::npos);
  CHECK(r.out.find("# alpha=0.05\n") != std::string::npos);

  const auto out_file = pipe.dir.file("table.tsv");
  const auto r2 = cli(pipe.detect_args(
      {"--level", "3", "--top-k", "10", "--out", out_file.string()}));
  REQUIRE(r2.code == 0);
  const auto table = read_signal_table(out_file);
  CHECK(table.meta.level == 3);
  CHECK(table.meta.population == 400);
  // Level-3 merging really happened: all codes at level <= 3.
  for (const auto& row : table.rows) {
    CHECK(code_level(row.code) <= 3);
    CHECK(row.code.str().substr(5) == "00");
  }
  CHECK(table.rows.size() <= 10);
}

TEST_CASE("detect output is byte-identical across runs") {
  Pipeline pipe;
  const auto first = cli(pipe.detect_args());
  const auto second = cli(pipe.detect_args());
  REQUIRE(first.code == 0);
  REQUIRE(second.code == 0);
  CHECK(first.out == second.out);

  const auto json1 = cli(pipe.detect_args({"--format", "json"}));
  const auto json2 = cli(pipe.detect_args({"--format", "json"}));
  REQUIRE(json1.code == 0);
  CHECK(json1.out == json2.out);
  CHECK(json1.out.substr(0, 1) == "{");
}

TEST_CASE("ratio method rows are exactly the significant t-test rows") {
  Pipeline pipe;
  const auto out_t = pipe.dir.file("t.tsv");
  const auto out_r = pipe.dir.file("r.tsv");
  REQUIRE(cli(pipe.detect_args({"--top-k", "1000", "--out", out_t.string()})).code == 0);
  REQUIRE(cli(pipe.detect_args({"--method", "ratio", "--top-k", "1000", "--out",
                                out_r.string()})).code == 0);
  const auto ttest = read_signal_table(out_t);
  const auto ratio = read_signal_table(out_r);
  std::set<std::string> significant;
  for (const auto& row : ttest.rows) {
    if (row.p_value < ttest.meta.alpha) significant.insert(row.code.str());
  }
  std::set<std::string> ranked;
  for (const auto& row : ratio.rows) ranked.insert(row.code.str());
  CHECK(ranked == significant);
}

TEST_CASE("dictionary decoration flows through detect") {
  Pipeline pipe;
  write_file(pipe.dir.file("dict.csv"),
             "readcode,description\nA0A1.00,Planted reaction\n");
  const auto r = cli(pipe.detect_args(
      {"--dictionary", pipe.dir.file("dict.csv").string()}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\tPlanted reaction\t") != std::string::npos);
}

TEST_CASE("matrix dump writes sparse triplets") {
  Pipeline pipe;
  const auto dump = pipe.dir.file("dump.csv");
  REQUIRE(cli(pipe.detect_args({"--dump-matrices", dump.string()})).code == 0);
  const auto content = testsup::read_file(dump);
  CHECK(content.rfind("patient_id,readcode,matrix\n", 0) == 0);
  CHECK(content.find(",A\n") != std::string::npos);
  CHECK(content.find(",B\n") != std::string::npos);
}

TEST_CASE("evaluate prints the top-k accuracy") {
  TempDir dir("cli_eval");
  // A 20-row table; 17 of the codes carry the T0 prefix picked up by the
  // reference file, the other 3 are unrelated.
  SignalTable table;
  table.meta.drug_code = "D1";
  table.meta.population = 500;
  for (int i = 0; i < 20; ++i) {
    SignalRow row;
    row.rank = i + 1;
    const bool miss = i == 3 || i == 11 || i == 19;
    std::string text = miss ? "X9" : "T0";
    text += static_cast<char>('A' + i / 4);
    text += static_cast<char>('1' + i % 4);
    text += ".00";
    row.code = parse_readcode(text);
    row.n_before = 1;
    row.n_after = 2;
    row.r1 = 2.0;
    row.r2_percent = 0.4;
    row.p_value = 0.001 * (i + 1);
    table.rows.push_back(row);
  }
  {
    std::ostringstream out;
    write_signal_table_tsv(table, out);
    write_file(dir.file("table.tsv"), out.str());
  }
  write_file(dir.file("ref.txt"), "# reference reactions\nT0\n");

  const auto r = cli({"evaluate", "--table", dir.file("table.tsv").string(),
                      "--reference", dir.file("ref.txt").string(), "--k", "20"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "0.85\n");

  const auto empty_ref = cli({"evaluate", "--table", dir.file("table.tsv").string(),
                              "--reference", dir.file("table.tsv").string()});
  CHECK(empty_ref.code == 2);
}

TEST_CASE("generate honors a config file with flag overrides") {
  TempDir dir("cli_gen");
  write_file(dir.file("gen.cfg"),
             "n_patients=250\nn_codes=12\ndrug_code=DZ\nseed=3\n");
  const auto r = cli({"generate", "--out", (dir.path() / "data").string(),
                      "--config", dir.file("gen.cfg").string(), "--seed", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("250 patients") != std::string::npos);

  const auto detect = cli({"detect", "--patients",
                           (dir.path() / "data" / "patients.csv").string(),
                           "--therapy", (dir.path() / "data" / "therapy.csv").string(),
                           "--medical", (dir.path() / "data" / "medical.csv").string(),
                           "--drug", "DZ"});
  REQUIRE(detect.code == 0);
  CHECK(detect.out.find("# N=250\n") != std::string::npos);
}
