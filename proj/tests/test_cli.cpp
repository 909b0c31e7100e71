#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlda/arff.hpp"
#include "nlda/model_io.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <sstream>

using namespace nlda;
using namespace nlda::testing;

namespace {

const std::string kCli = NLDA_CLI_PATH;
const std::string kData = NLDA_DATA_DIR;

CommandResult cli(const std::string& args) { return run_command(kCli + " " + args); }

std::string fast_fit(const std::string& input, const std::string& extra) {
  return "fit --input " + input +
         " --topics 3 --alpha 0.1 --beta 0.01 --sweeps 300 --burn-in 50 --seed 1 " + extra;
}

std::vector<nlohmann::json> read_json_lines(const std::filesystem::path& p) {
  std::istringstream in(read_file(p));
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

TEST_CASE("fit is byte-for-byte reproducible") {
  TempDir dir;
  const std::string base = "fit --input " + kData + "/tiny.tsv --topics 2 --stages 1 --seed 7";
  const auto a = cli(base + " --model-out " + (dir / "a.json").string());
  const auto b = cli(base + " --model-out " + (dir / "b.json").string());
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(read_file(dir / "a.json") == read_file(dir / "b.json"));
  CHECK(a.out == b.out);
}

TEST_CASE("fit input validation exits 2") {
  TempDir dir;
  const auto zero = cli("fit --input " + kData + "/tiny.tsv --stages 0 --model-out " +
                        (dir / "m.json").string());
  CHECK(zero.exit_code == 2);
  CHECK(zero.err.find("stages") != std::string::npos);

  const auto missing = cli("fit --input /nonexistent/corpus.tsv");
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("cannot read") != std::string::npos);

  const auto no_input = cli("fit --topics 2");
  CHECK(no_input.exit_code == 2);
  CHECK(no_input.err.find("--input") != std::string::npos);

  CHECK(cli("fit --input " + kData + "/tiny.tsv --topics 1").exit_code == 2);
  CHECK(cli("fit --input " + kData + "/tiny.tsv --alpha -1").exit_code == 2);
  CHECK(cli("fit --input " + kData + "/tiny.tsv --prefix-stem 0").exit_code == 2);
  CHECK(cli("fit --input " + kData + "/tiny.tsv --chains 0").exit_code == 2);
  CHECK(cli("frobnicate").exit_code == 2);
  CHECK(cli("").exit_code == 2);
  CHECK(cli("--help").exit_code == 0);
}

TEST_CASE("three-stage report on the noisy corpus") {
  TempDir dir;
  const auto r = cli(fast_fit(kData + "/synthetic_noisy.tsv",
                              "--stages 3 --model-out " + (dir / "m.json").string() +
                                  " --report " + (dir / "r.jsonl").string()));
  REQUIRE(r.exit_code == 0);
  const auto lines = read_json_lines(dir / "r.jsonl");
  REQUIRE(lines.size() == 3);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    CHECK(lines[i]["stage"] == i + 1);
    if (i > 0) {
      CHECK(lines[i]["vocab_size_after"].get<int>() <=
            lines[i - 1]["vocab_size_after"].get<int>());
      CHECK(lines[i]["vocab_size_before"] == lines[i - 1]["vocab_size_after"]);
    }
  }
  const auto model = load_model(dir / "m.json");
  CHECK(model.stages == 3);
  CHECK(model.model.vocabulary.size() == lines[2]["vocab_size_after"].get<std::size_t>());
}

TEST_CASE("eval prints accuracy and confusion") {
  TempDir dir;
  const auto input = kData + "/synthetic_disjoint.tsv";
  REQUIRE(cli("fit --input " + input + " --topics 2 --alpha 0.1 --sweeps 200 --seed 4 "
              "--model-out " + (dir / "m.json").string()).exit_code == 0);
  const auto r = cli("eval --model " + (dir / "m.json").string() + " --input " + input +
                     " --json " + (dir / "e.jsonl").string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("accuracy 1.0000\n", 0) == 0);
  CHECK(r.out.find("true\\pred") != std::string::npos);
  const auto j = read_json_lines(dir / "e.jsonl");
  REQUIRE(j.size() == 1);
  CHECK(j[0]["accuracy"] == 1.0);

  const auto h = cli("eval --labeling hungarian --model " + (dir / "m.json").string() +
                     " --input " + input);
  CHECK(h.exit_code == 0);
  CHECK(h.out.rfind("accuracy 1.0000\n", 0) == 0);

  const auto fold = cli("eval --fold-in --model " + (dir / "m.json").string() +
                        " --input " + input);
  CHECK(fold.exit_code == 0);
  CHECK(fold.out.rfind("accuracy 1.0000\n", 0) == 0);

  CHECK(cli("eval --labeling vote --model " + (dir / "m.json").string() + " --input " + input)
            .exit_code == 2);
}

TEST_CASE("eval error paths") {
  TempDir dir;
  REQUIRE(cli("fit --input " + kData + "/tiny.tsv --topics 2 --sweeps 50 --model-out " +
              (dir / "m.json").string()).exit_code == 0);

  std::string unlabeled;
  std::istringstream in(read_file(kData + "/tiny.tsv"));
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    unlabeled += line.substr(line.find('\t') + 1) + "\n";
  }
  write_file(dir / "unlabeled.txt", unlabeled);
  const auto u = cli("eval --model " + (dir / "m.json").string() + " --input " +
                     (dir / "unlabeled.txt").string());
  CHECK(u.exit_code == 2);
  CHECK(u.err.find("labels required") != std::string::npos);

  const auto mismatch = cli("eval --model " + (dir / "m.json").string() + " --input " +
                            kData + "/synthetic_disjoint.tsv");
  CHECK(mismatch.exit_code == 2);
  CHECK(mismatch.err.find("mismatch") != std::string::npos);

  write_file(dir / "fewer.tsv", "happiness\thappy day\nanger\tangry\n");
  CHECK(cli("eval --model " + (dir / "m.json").string() + " --input " +
            (dir / "fewer.tsv").string()).exit_code == 2);

  write_file(dir / "bad.json", "{ not json");
  CHECK(cli("eval --model " + (dir / "bad.json").string() + " --input " + kData +
            "/tiny.tsv").exit_code == 2);
}

TEST_CASE("per-stage evaluation lists stages in order") {
  TempDir dir;
  const auto input = kData + "/synthetic_noisy.tsv";
  REQUIRE(cli(fast_fit(input, "--stages 3 --model-out " + (dir / "m.json").string() +
                                  " --stage-models " + (dir / "stages").string()))
              .exit_code == 0);
  const auto stages = dir / "stages";
  REQUIRE(std::filesystem::exists(stages / "stage3.json"));
  CHECK(read_file(stages / "stage3.json") == read_file(dir / "m.json"));

  const auto r = cli("eval --input " + input + " --model " + (stages / "stage3.json").string() +
                     " --model " + (stages / "stage1.json").string() + " --model " +
                     (stages / "stage2.json").string());
  REQUIRE(r.exit_code == 0);
  std::istringstream out(r.out);
  std::vector<std::string> lines;
  for (std::string line; std::getline(out, line);) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(lines[i].rfind("stage " + std::to_string(i + 1) + " accuracy ", 0) == 0);
  }
}

TEST_CASE("export writes a parseable ARFF and a topic table") {
  TempDir dir;
  const auto input = kData + "/synthetic_clean.tsv";
  REQUIRE(cli(fast_fit(input, "--model-out " + (dir / "m.json").string())).exit_code == 0);
  const auto r = cli("export --model " + (dir / "m.json").string() + " --input " + input +
                     " --arff " + (dir / "m.arff").string() + " --topics-table " +
                     (dir / "t.tsv").string() + " --top-m 4");
  REQUIRE(r.exit_code == 0);
  const auto arff = parse_arff_file((dir / "m.arff").string());
  CHECK(arff.rows.size() == 200);
  CHECK(arff.attributes.size() == 4);
  const auto table = read_file(dir / "t.tsv");
  CHECK(std::count(table.begin(), table.end(), '\n') == 1 + 3 * 4);

  const auto words = cli("export --model " + (dir / "m.json").string() +
                         " --arff-mode topic-words --arff " + (dir / "w.arff").string());
  REQUIRE(words.exit_code == 0);
  const auto w = parse_arff_file((dir / "w.arff").string());
  CHECK(w.rows.size() == 3);
  CHECK(w.attributes.size() == 30);
}

TEST_CASE("export validation") {
  TempDir dir;
  const auto input = kData + "/tiny.tsv";
  REQUIRE(cli("fit --input " + input + " --topics 2 --sweeps 20 --model-out " +
              (dir / "m.json").string()).exit_code == 0);
  const std::string m = " --model " + (dir / "m.json").string();
  CHECK(cli("export" + m + " --input " + input + " --topics-table " +
            (dir / "t.tsv").string() + " --top-m 0").exit_code == 2);
  const auto nothing = cli("export" + m + " --input " + input);
  CHECK(nothing.exit_code == 2);
  CHECK(nothing.err.find("nothing to export") != std::string::npos);
  CHECK(cli("export" + m + " --arff " + (dir / "x.arff").string()).exit_code == 2);
  CHECK(cli("export" + m + " --input " + input + " --arff /nonexistent/dir/x.arff")
            .exit_code == 2);
  CHECK(cli("export" + m + " --arff-mode bogus --arff " + (dir / "x.arff").string())
            .exit_code == 2);
}

TEST_CASE("config file values are overridden by flags") {
  TempDir dir;
  const auto cfg = " --config " + kData + "/example.toml";
  REQUIRE(cli(cfg + " fit --input " + kData + "/tiny.tsv --sweeps 60 --model-out " +
              (dir / "a.json").string()).exit_code == 0);
  const auto a = load_model(dir / "a.json");
  CHECK(a.model.num_topics() == 3);
  CHECK(a.stages == 3);
  CHECK(a.model.config.total_sweeps == 60);
  CHECK(a.pipeline.prefix_stem == 5u);

  REQUIRE(cli(cfg + " fit --input " + kData + "/tiny.tsv --sweeps 60 --topics 2 --stages 1 "
              "--model-out " + (dir / "b.json").string()).exit_code == 0);
  const auto b = load_model(dir / "b.json");
  CHECK(b.model.num_topics() == 2);
  CHECK(b.stages == 1);
}

TEST_CASE("multiple chains are deterministic") {
  TempDir dir;
  const auto base = "fit --input " + kData +
                    "/synthetic_clean.tsv --topics 3 --alpha 0.1 --sweeps 100 --seed 1 --chains 3";
  REQUIRE(cli(base + " --model-out " + (dir / "a.json").string()).exit_code == 0);
  REQUIRE(cli(base + " --model-out " + (dir / "b.json").string()).exit_code == 0);
  CHECK(read_file(dir / "a.json") == read_file(dir / "b.json"));
}

TEST_CASE("gen-synthetic reproduces the bundled corpora") {
  for (const auto* preset : {"clean", "noisy", "disjoint"}) {
    CAPTURE(preset);
    const auto r = cli(std::string("gen-synthetic --preset ") + preset);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == read_file(kData + "/synthetic_" + preset + ".tsv"));
  }
  CHECK(cli("gen-synthetic --preset enormous").exit_code == 2);
}

TEST_CASE("NSTAGE_LOG controls diagnostics on stderr") {
  TempDir dir;
  const auto args = " fit --input " + kData + "/tiny.tsv --topics 2 --sweeps 20 --model-out " +
                    (dir / "m.json").string();
  const auto quiet = run_command(kCli + args);
  const auto loud = run_command("NSTAGE_LOG=info " + kCli + args);
  CHECK(quiet.err.find("stage 1") == std::string::npos);
  CHECK(loud.err.find("[info] stage 1") != std::string::npos);
  CHECK(quiet.out == loud.out);
}
