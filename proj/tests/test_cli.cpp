#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sageforge/cli.hpp"
#include "support.hpp"

using namespace sageforge;
using namespace sageforge::cli;
using sageforge::testing::fixtures;
using sageforge::testing::scratch_dir;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Drops the fields that legitimately differ between runs in separate directories.
nlohmann::json without_wall_clock(const std::string& path) {
  auto j = nlohmann::json::parse(read_file(path));
  j.erase("wall_seconds");
  j.erase("checkpoint");
  return j;
}

}  // namespace

TEST_CASE("usage and exit codes") {
  auto r = invoke({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("tokenizer-train") != std::string::npos);
  CHECK(r.out.find("eval") != std::string::npos);

  r = invoke({"train", "--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("--stage") != std::string::npos);

  CHECK(invoke({"bogus"}).code == 1);
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"eval", "--task", "nl2code"}).code == 1);
  CHECK(invoke({"train", "--stage", "7"}).code == 1);
  // missing input is a runtime failure
  const auto dir = scratch_dir("cli-codes");
  CHECK(invoke({"-q", "pairs", "--input", (dir / "nope").string(), "--out", (dir / "p.jsonl").string()}).code == 2);
}

TEST_CASE("toml subset parsing") {
  const auto j = parse_toml(R"(# top comment
seed = 42
name = "run # one"
path = 'C:\raw'

[train]
steps = 1_000
base_lr = 3e-4
weight_decay = 0.01
flag = true
list = [1, 2, 3]

[mask]
rate = "dynamic"
a.b = -7
)");
  CHECK(j["seed"] == 42);
  CHECK(j["name"] == "run # one");
  CHECK(j["path"] == "C:\\raw");
  CHECK(j["train"]["steps"] == 1000);
  CHECK(j["train"]["base_lr"].get<double>() == doctest::Approx(3e-4));
  CHECK(j["train"]["flag"] == true);
  CHECK(j["train"]["list"] == nlohmann::json::array({1, 2, 3}));
  CHECK(j["mask"]["rate"] == "dynamic");
  CHECK(j["mask"]["a"]["b"] == -7);

  CHECK_THROWS_AS(parse_toml("x = \n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[train\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("x = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("x = \"open\n"), ConfigError);
  try {
    parse_toml("a = 1\nb = ?\n");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("config precedence and validation") {
  const auto file = parse_toml(R"(seed = 9
[train]
steps = 50
batch_size = 16
base_lr = 0.001
[mask]
scheme = "80-10-10"
rate = "dynamic"
dobf_mix = 0.25
[seq]
max_len = 64
[data]
corpus = "src"
tokenizer = "tok.json"
)");
  TrainOverrides flags;
  auto rc = resolve_train_config(trainer::Stage::Stage1, file, flags);
  CHECK(rc.train.seed == 9);
  CHECK(rc.train.steps == 50);
  CHECK(rc.train.warmup_steps == 5);
  CHECK(rc.train.batch_size == 16);
  CHECK(rc.train.base_lr == doctest::Approx(0.001));
  CHECK(rc.train.mask.random_scheme == denoiser::Scheme::Conv801010);
  CHECK(rc.train.mask.rate.dynamic);
  CHECK(rc.train.mask.dobf_mix == doctest::Approx(0.25));
  CHECK(rc.train.max_len == 64);
  CHECK(rc.paths.corpus == "src");
  CHECK(rc.paths.tokenizer == "tok.json");

  flags.seed = 1;
  flags.steps = 20;
  flags.base_lr = 0.5;
  flags.corpus = "other";
  rc = resolve_train_config(trainer::Stage::Stage1, file, flags);
  CHECK(rc.train.seed == 1);
  CHECK(rc.train.steps == 20);
  CHECK(rc.train.warmup_steps == 2);
  CHECK(rc.train.base_lr == doctest::Approx(0.5));
  CHECK(rc.paths.corpus == "other");
  CHECK(rc.train.batch_size == 16);

  // defaults when nothing is given
  rc = resolve_train_config(trainer::Stage::Stage2, nlohmann::json::object(), {});
  CHECK(rc.train.batch_size == 64);
  CHECK(rc.train.base_lr == doctest::Approx(1e-4));
  CHECK(rc.train.mask.rate.rate == doctest::Approx(0.15));

  CHECK_THROWS_AS(resolve_train_config(trainer::Stage::Stage1, parse_toml("[train]\nstepz = 3\n"), {}), ConfigError);
  CHECK_THROWS_AS(resolve_train_config(trainer::Stage::Stage1, parse_toml("colour = 3\n"), {}), ConfigError);
  CHECK_THROWS_AS(resolve_train_config(trainer::Stage::Stage1, parse_toml("[train]\nsteps = \"many\"\n"), {}),
                  ConfigError);
  CHECK_THROWS_AS(resolve_train_config(trainer::Stage::Stage1, parse_toml("[mask]\nscheme = \"half\"\n"), {}),
                  ConfigError);

  const auto dir = scratch_dir("cli-config");
  write(dir / "bad.toml", "[train]\nwat = 1\n");
  const auto r = invoke({"-q", "train", "--stage", "1", "--config", (dir / "bad.toml").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("wat") != std::string::npos);
}

TEST_CASE("pipeline smoke run on the fixtures") {
  const auto dir = scratch_dir("cli-pipeline");
  const auto corpus = (fixtures() / "corpus").string();
  const auto tok = (dir / "tok.json").string();
  const auto pairs = (dir / "pairs.jsonl").string();
  const std::string seed = "11";

  REQUIRE(invoke({"-q", "--seed", seed, "tokenizer-train", "--input", corpus, "--vocab-size", "2000", "--out", tok})
              .code == 0);
  REQUIRE(invoke({"-q", "--seed", seed, "pairs", "--input", corpus, "--tokenizer", tok, "--out", pairs, "--report",
                  (dir / "hist.json").string()})
              .code == 0);
  CHECK(corpus::read_pairs_jsonl(pairs).size() > 400);
  CHECK(nlohmann::json::parse(read_file((dir / "hist.json").string()))["verdicts"]["Ok"].get<int>() > 400);

  auto r = invoke({"-q", "stats", "--input", corpus, "--tokenizer", tok, "--out", (dir / "stats.json").string()});
  REQUIRE(r.code == 0);
  const auto stats = nlohmann::json::parse(read_file((dir / "stats.json").string()));
  CHECK(stats.contains("distribution"));
  CHECK(stats.contains("overlap_reduction"));

  const auto appendix = (fixtures() / "appendix" / "postorder.py").string();
  r = invoke({"-q", "obfuscate", "--input", appendix, "--out", (dir / "obf.py").string(), "--map",
              (dir / "map.json").string()});
  REQUIRE(r.code == 0);
  CHECK(read_file((dir / "obf.py").string()).find("class c_0:") != std::string::npos);
  CHECK(nlohmann::json::parse(read_file((dir / "map.json").string()))["f_1"] == "printPostorder");

  const auto s1 = (dir / "s1").string();
  r = invoke({"-q", "--seed", seed, "train", "--stage", "1", "--tokenizer", tok, "--corpus", corpus, "--steps", "3",
              "--batch-size", "4", "--out", s1});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(fs::path(s1) / "stage1-final.ckpt"));
  CHECK(fs::exists(fs::path(s1) / "loss.csv"));
  CHECK(nlohmann::json::parse(read_file((fs::path(s1) / "config.json").string()))["steps"] == 3);

  const auto s2 = (dir / "s2").string();
  r = invoke({"-q", "--seed", seed, "train", "--stage", "2", "--tokenizer", tok, "--pairs", pairs, "--init",
              (fs::path(s1) / "stage1-final.ckpt").string(), "--steps", "2", "--batch-size", "4", "--out", s2});
  REQUIRE(r.code == 0);
  const auto model = (fs::path(s2) / "stage2-final.ckpt").string();
  REQUIRE(fs::exists(model));
  CHECK(invoke({"-q", "train", "--stage", "2", "--tokenizer", tok, "--pairs", pairs, "--steps", "1"}).code == 1);

  const auto nl = (dir / "nl2code.json").string();
  r = invoke({"-q", "--seed", seed, "eval", "--task", "nl2code", "--model", model, "--tokenizer", tok, "--data",
              (fixtures() / "heldout").string(), "--out", nl, "--pairs", pairs, "--groups",
              (fixtures() / "code2code" / "groups.jsonl").string()});
  REQUIRE(r.code == 0);
  const auto nlj = nlohmann::json::parse(read_file(nl));
  CHECK(nlj["mrr"].get<double>() > 0);
  CHECK(nlj.contains("random_mrr_expectation"));
  CHECK(nlj["similarity_gap"].contains("relative_gap"));

  const auto c2c = (dir / "code2code.json").string();
  r = invoke({"-q", "--seed", seed, "eval", "--task", "code2code", "--model", model, "--tokenizer", tok, "--data",
              (fixtures() / "code2code").string(), "--out", c2c});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(read_file(c2c))["map"].get<double>() > 0);

  r = invoke({"report", "--input", (fs::path(s2) / "train_report.json").string(), "--csv",
              (dir / "s2.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("accuracy") != std::string::npos);
  r = invoke({"report", "--input", nl});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("MRR") != std::string::npos);
  CHECK(invoke({"report", "--input", tok}).code == 2);

  // a mismatched tokenizer is refused
  const auto tok2 = (dir / "tok2.json").string();
  REQUIRE(invoke({"-q", "tokenizer-train", "--input", corpus, "--vocab-size", "700", "--out", tok2}).code == 0);
  CHECK(invoke({"-q", "eval", "--task", "nl2code", "--model", model, "--tokenizer", tok2, "--data",
                (fixtures() / "heldout").string(), "--out", (dir / "x.json").string()})
            .code == 2);
}

TEST_CASE("identical invocations give identical outputs") {
  const auto dir = scratch_dir("cli-determinism");
  const auto corpus = (fixtures() / "corpus").string();
  for (const char* run_name : {"a", "b"}) {
    const auto d = dir / run_name;
    fs::create_directories(d);
    const auto tok = (d / "tok.json").string();
    REQUIRE(invoke({"-q", "--seed", "5", "tokenizer-train", "--input", corpus, "--vocab-size", "1500", "--out", tok})
                .code == 0);
    REQUIRE(invoke({"-q", "--seed", "5", "pairs", "--input", corpus, "--tokenizer", tok, "--out",
                    (d / "pairs.jsonl").string()})
                .code == 0);
    REQUIRE(invoke({"-q", "--seed", "5", "--threads", "2", "train", "--stage", "2-scratch", "--tokenizer", tok,
                    "--pairs", (d / "pairs.jsonl").string(), "--steps", "2", "--batch-size", "4", "--out",
                    (d / "s2").string()})
                .code == 0);
  }
  for (const char* f : {"tok.json", "pairs.jsonl", "s2/stage2-scratch-final.ckpt", "s2/loss.csv"}) {
    CAPTURE(f);
    CHECK(read_file((dir / "a" / f).string()) == read_file((dir / "b" / f).string()));
  }
  // the report differs only in its wall-clock field and output path
  CHECK(without_wall_clock((dir / "a" / "s2" / "train_report.json").string()) ==
        without_wall_clock((dir / "b" / "s2" / "train_report.json").string()));
}
