#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"

using json = nlohmann::json;
using msfl::test::TempDir;

namespace {

std::string cli_path() {
  const char* env = std::getenv("MSFL_CLI");
  REQUIRE_MESSAGE(env != nullptr,
                  "MSFL_CLI must point at the built msfl binary");
  return env;
}

int run(const std::string& args, bool expect_success = true) {
  const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (expect_success) REQUIRE_MESSAGE(code == 0, ("command failed: " + args));
  return code;
}

std::vector<json> read_log(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<json> records;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) records.push_back(json::parse(line));
  return records;
}

// synth -> learn -> encode -> train -> eval in dir, one log per run.
void pipeline(const TempDir& dir, const std::string& svm_kind) {
  const std::string log = " --log " + dir.file("log.ndjson") + " ";
  run(log + "synth --out " + dir.file("c") +
      " --classes 3 --per-class-train 5 --per-class-test 5 --side 32"
      " --seed 9");
  run(log + "learn --data " + dir.file("c") +
      " --model km --dict-size 12 --patch 6 --patches 800 --seed 4 --out " +
      dir.file("m.bin"));
  run(log + "encode --data " + dir.file("c") + " --model " + dir.file("m.bin") +
      " --out " + dir.file("f") + " --stride 6");
  run(log + "train --features " + dir.file("f.train.bin") + " --svm " +
      svm_kind + " --C 10 --out " + dir.file("s.bin"));
  run(log + "eval --features " + dir.file("f.test.bin") + " --svm " +
      dir.file("s.bin"));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("the full pipeline runs and logs one record per command") {
  TempDir dir("cli");
  pipeline(dir, "linear");
  const auto records = read_log(dir.file("log.ndjson"));
  REQUIRE(records.size() == 5);
  const std::vector<std::string> cmds = {"synth", "learn", "encode", "train",
                                         "eval"};
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i]["cmd"] == cmds[i]);
    CHECK(records[i].contains("config"));
    CHECK(records[i].contains("metrics"));
  }
  CHECK(records[0]["metrics"]["train"] == 15);
  CHECK(records[2]["metrics"]["dim"] == 48);  // 12 atoms x 2x2 pooling
  const double acc = records[4]["metrics"]["accuracy"];
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  const auto& confusion = records[4]["metrics"]["confusion"];
  REQUIRE(confusion.size() == 3);
  int total = 0;
  for (const auto& row : confusion)
    for (const auto& cell : row) total += cell.get<int>();
  CHECK(total == 15);
}

TEST_CASE("same-seed reruns log identical metrics") {
  TempDir a("cli_a");
  TempDir b("cli_b");
  pipeline(a, "chi2");
  pipeline(b, "chi2");
  const auto ra = read_log(a.file("log.ndjson"));
  const auto rb = read_log(b.file("log.ndjson"));
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    CHECK(ra[i]["cmd"] == rb[i]["cmd"]);
    CHECK(ra[i]["metrics"] == rb[i]["metrics"]);
  }
  CHECK(msfl::test::read_file_bytes(a.file("m.bin")) ==
        msfl::test::read_file_bytes(b.file("m.bin")));
}

TEST_CASE("config files feed flags and the command line overrides them") {
  TempDir dir("cli_cfg");
  run("--log " + dir.file("log.ndjson") + " synth --out " + dir.file("c") +
      " --classes 2 --per-class-train 3 --per-class-test 3 --side 24"
      " --seed 1");
  std::ofstream(dir.file("cfg.json"))
      << R"({"log": ")" << dir.file("cfg_log.ndjson") << R"(",
             "learn": {"data": ")"
      << dir.file("c") << R"(", "model": "km", "dict-size": 6,
                       "patch": 6, "patches": 200,
                       "out": ")"
      << dir.file("m.bin") << R"("}})";
  run("--config " + dir.file("cfg.json") + " learn");
  auto records = read_log(dir.file("cfg_log.ndjson"));
  REQUIRE(records.size() == 1);
  CHECK(records[0]["config"]["dict_size"] == 6);

  // A command-line flag beats the same key in the config file.
  run("--config " + dir.file("cfg.json") + " learn --dict-size 9 --out " +
      dir.file("m2.bin"));
  records = read_log(dir.file("cfg_log.ndjson"));
  REQUIRE(records.size() == 2);
  CHECK(records[1]["config"]["dict_size"] == 9);
}

TEST_CASE("bad invocations exit nonzero") {
  TempDir dir("cli_bad");
  CHECK(run("frobnicate", false) != 0);
  CHECK(run("learn --no-such-flag 3", false) != 0);
  CHECK(run("--log " + dir.file("log.ndjson") + " viz --model " +
                dir.file("missing.bin") + " --out " + dir.file("x.pgm"),
            false) != 0);
  CHECK(run("--log " + dir.file("log.ndjson") + " encode --data " +
                dir.file("nowhere") + " --lbp --out " + dir.file("f"),
            false) != 0);
}

}  // TEST_SUITE
