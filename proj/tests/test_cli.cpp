/*
 * Copyright 2026 The HierIDS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "hierids/cli.hpp"
#include "hierids/io.hpp"
#include "test_support.hpp"

using namespace hierids;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = run_cli(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream o(p, std::ios::binary);
  o << text;
}

// Small end-to-end run inside `dir`; every stage reads what the previous one
// wrote. Relative paths keep the echoed configs identical across directories.
void pipeline(const fs::path& dir) {
  const fs::path previous = fs::current_path();
  fs::current_path(dir);
  REQUIRE(run({"--seed", "4", "synth", "--records", "600", "--features", "10"}).code == 0);
  REQUIRE(run({"--seed", "4", "ingest", "--input", "synth.csv"}).code == 0);
  REQUIRE(run({"--seed", "4", "select", "--max-runs", "12", "--trees", "15", "--k", "3",
               "--attribution-rows", "100"})
              .code == 0);
  REQUIRE(run({"--seed", "4", "train-eval", "--mode", "hier", "--trees", "15", "--k", "3",
               "--features-file", "subset.txt"})
              .code == 0);
  REQUIRE(run({"--seed", "4", "train-eval", "--mode", "flat", "--learner", "tree", "--k", "3"})
              .code == 0);
  REQUIRE(run({"--seed", "4", "train-eval", "--mode", "fed", "--rounds", "2", "--epochs", "2",
               "--clients", "3"})
              .code == 0);
  REQUIRE(run({"--seed", "4", "simulate", "--duration", "30", "--model-bundle", "model_bundle.json"})
              .code == 0);
  fs::current_path(previous);
}

}  // namespace

TEST_CASE("full pipeline writes every artifact and is reproducible") {
  hierids::testing::TempDir a, b;
  pipeline(a.path());
  for (const char* name :
       {"synth.csv", "synth.json", "dataset.csv", "scaler.json", "summary.json", "ranking.txt",
        "boruta.json", "attribution.json", "subset.txt", "subset.json", "trace.csv",
        "metrics_hier.json", "metrics_hier.csv", "timing_hier.json", "model_bundle.json",
        "metrics_flat.json", "metrics_fed.json", "fedrun.json", "fedrun.csv", "overhead.json",
        "overhead.csv"}) {
    CHECK_MESSAGE(fs::exists(a.path() / name), name);
  }
  const Json summary = read_json(a.path() / "summary.json");
  CHECK(summary["config"]["seed"] == 4);
  CHECK(slurp(a.path() / "metrics_hier.csv").rfind("table,class,precision,recall,f1,support\n", 0) == 0);

  pipeline(b.path());
  for (const auto& entry : fs::directory_iterator(a.path())) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("timing_", 0) == 0) continue;
    CHECK_MESSAGE(slurp(entry.path()) == slurp(b.path() / name), name);
  }
}

TEST_CASE("flags override the config file, which overrides defaults") {
  hierids::testing::TempDir dir;
  const fs::path cfg = dir.path() / "cfg.json";
  spit(cfg, R"({"seed": 77, "synth": {"records": 120, "features": 8}})");
  const std::string d = dir.path().string();
  REQUIRE(run({"--config", cfg.string(), "--out", d, "synth", "--features", "9"}).code == 0);
  const Json echo = read_json(dir.path() / "synth.json");
  CHECK(echo["config"]["records"] == 120);
  CHECK(echo["config"]["features"] == 9);
  CHECK(echo["config"]["seed"] == 77);
  CHECK(echo["config"]["bias"] == 1.0);
  REQUIRE(run({"--config", cfg.string(), "--out", d, "--seed", "3", "synth"}).code == 0);
  CHECK(read_json(dir.path() / "synth.json")["config"]["seed"] == 3);
}

TEST_CASE("HIERIDS_SEED is the seed of last resort") {
  hierids::testing::TempDir dir;
  const std::string d = dir.path().string();
  ::setenv("HIERIDS_SEED", "31", 1);
  const Outcome o = run({"--out", d, "synth", "--records", "60", "--features", "6"});
  ::unsetenv("HIERIDS_SEED");
  REQUIRE(o.code == 0);
  CHECK(read_json(dir.path() / "synth.json")["config"]["seed"] == 31);
  REQUIRE(run({"--out", d, "synth", "--records", "60", "--features", "6"}).code == 0);
  CHECK(read_json(dir.path() / "synth.json")["config"]["seed"] == 0);
}

TEST_CASE("exit codes") {
  hierids::testing::TempDir dir;
  const std::string d = dir.path().string();

  SUBCASE("malformed row names the row") {
    const fs::path csv = dir.path() / "bad.csv";
    spit(csv, "f0,f1,label\n0,1,BENIGN\n1,x,DOS\n");
    const Outcome o = run({"--out", d, "ingest", "--input", csv.string()});
    CHECK(o.code == kExitUsage);
    CHECK(o.err.find("row 2") != std::string::npos);
  }
  SUBCASE("bad config file") {
    const fs::path cfg = dir.path() / "cfg.json";
    spit(cfg, "{not json");
    CHECK(run({"--config", cfg.string(), "--out", d, "synth"}).code == kExitUsage);
    spit(cfg, R"({"synth": {"records": "many"}})");
    CHECK(run({"--config", cfg.string(), "--out", d, "synth"}).code == kExitUsage);
  }
  SUBCASE("usage errors") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"synth", "--no-such-flag"}).code == kExitUsage);
    CHECK(run({"--out", d, "train-eval", "--mode", "sideways"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
  }
  SUBCASE("missing dataset is a usage error") {
    CHECK(run({"--out", d, "select"}).code != kExitOk);
  }
  SUBCASE("invalid simulation parameters") {
    CHECK(run({"--out", d, "simulate", "--density", "-5"}).code == kExitUsage);
  }
}

#ifdef HIERIDS_CLI_PATH
TEST_CASE("installed binary") {
  hierids::testing::TempDir dir;
  const std::string cmd = std::string(HIERIDS_CLI_PATH) + " --out " + dir.path().string() +
                          " --seed 2 simulate --duration 5 > /dev/null";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(fs::exists(dir.path() / "overhead.json"));
  const std::string bad = std::string(HIERIDS_CLI_PATH) + " frobnicate 2> /dev/null";
  CHECK(WEXITSTATUS(std::system(bad.c_str())) == kExitUsage);
}
#endif
