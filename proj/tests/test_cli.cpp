// Copyright 2026 The zone-eval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "support/fixtures.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fixtures::temp_dir("cli");
    const Result r = run("synth bench --images 40 --seed 3 --partition annular:5 --out-gt " +
                      (dir_ / "gt.json").string() + " --out-dt " + (dir_ / "dt.json").string());
    ASSERT_EQ(r.code, 0) << r.err;
  }

  static Result run(const std::string& args) {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string(ZONE_EVAL_BIN) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = fixtures::read_file(out);
    r.err = fixtures::read_file(err);
    return r;
  }

  static std::string gt() { return (dir_ / "gt.json").string(); }
  static std::string dt() { return (dir_ / "dt.json").string(); }

  static fs::path dir_;
};

fs::path Cli::dir_;

TEST_F(Cli, EvalPrintsTable) {
  const Result r = run("eval --gt " + gt() + " --dt " + dt());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("AP\tVar.\tZP[z0,1]", 0), 0u) << r.out;
}

TEST_F(Cli, EvalJsonToStdout) {
  const Result r = run("eval --gt " + gt() + " --dt " + dt() + " --out - --partition grid:2x2");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["zones"].size(), 4u);
}

TEST_F(Cli, WorkersGiveIdenticalBytes) {
  const auto a = dir_ / "w1.json";
  const auto b = dir_ / "w8.json";
  ASSERT_EQ(run("eval --gt " + gt() + " --dt " + dt() + " --workers 1 --out " + a.string()).code,
            0);
  ASSERT_EQ(run("eval --gt " + gt() + " --dt " + dt() + " --workers 8 --out " + b.string()).code,
            0);
  EXPECT_EQ(fixtures::read_file(a), fixtures::read_file(b));
  EXPECT_FALSE(fixtures::read_file(a).empty());
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("eval --gt " + gt() + " --dt " + dt() + " --bogus").code, 1);
  EXPECT_EQ(run("eval --gt /nonexistent.json --dt " + dt()).code, 1);
  EXPECT_EQ(run("eval --gt " + gt() + " --dt " + dt() + " --partition ring:2").code, 1);
  EXPECT_EQ(run("eval --gt " + gt() + " --dt " + dt() + " --recall-points 1").code, 1);

  const auto empty = dir_ / "empty_gt.json";
  fixtures::write_file(empty, R"({"images": [{"id": 1, "width": 10, "height": 10}],
    "categories": [{"id": 1, "name": "a"}], "annotations": []})");
  const auto nodt = dir_ / "empty_dt.json";
  fixtures::write_file(nodt, "[]");
  const Result r = run("eval --gt " + empty.string() + " --dt " + nodt.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, HelpListsFlags) {
  const Result r = run("eval --help");
  EXPECT_EQ(r.code, 0);
  for (const char* flag : {"--gt", "--dt", "--partition", "--iou", "--max-dets",
                           "--recall-points", "--workers", "--out", "--format"}) {
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  }
  EXPECT_EQ(run("--version").code, 0);
}

TEST_F(Cli, DensityRowsPerZone) {
  const Result r = run("density --gt " + gt() + " --partition annular:50");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 51);  // header + 50 zones
}

TEST_F(Cli, CountsAndCorrelate) {
  const auto heat = dir_ / "heat.json";
  ASSERT_EQ(run("eval --gt " + gt() + " --dt " + dt() +
                " --partition grid:3x3 --heatmap-json " + heat.string())
                .code,
            0);
  const Result c = run("counts --gt " + gt() + " --grid 3x3");
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(std::count(c.out.begin(), c.out.end(), '\n'), 3);
  const Result r = run("correlate --heatmap " + heat.string() + " --gt " + gt());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("iou,pcc,scc\n", 0), 0u);
}

TEST_F(Cli, SelaAndSynth) {
  EXPECT_EQ(run("sela --gt " + gt() + " --partition annular:3 --gamma 0.2").code, 0);
  EXPECT_EQ(run("sela --gt " + gt() + " --partition annular:3 --beta 0.3").code, 1);
  const auto objects = dir_ / "objects.json";
  fixtures::write_file(objects, R"([{"id": 7, "category_id": 1}, {"id": 8, "category_id": 2}])");
  const auto sgt = dir_ / "sudoku.json";
  const Result r = run("synth sudoku --objects " + objects.string() + " --out-gt " + sgt.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(fixtures::read_file(sgt))["annotations"].size(), 2u);
}

TEST_F(Cli, PatternDistance) {
  const auto f = dir_ / "features.jsonl";
  fixtures::write_file(
      f, R"({"split":"train","zone_tag":"in","category_id":1,"area":20,"vector":[1,2]})"
         "\n"
         R"({"split":"train","zone_tag":"out","category_id":1,"area":20,"vector":[1,3]})"
         "\n");
  const Result r = run("pattern-distance --features " + f.string() + " --pair train:in,train:out");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::stod(r.out), 0.5);
}

}  // namespace
