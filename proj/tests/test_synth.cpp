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

#include "zoneeval/errors.hpp"
#include "zoneeval/synth.hpp"
#include "zoneeval/zone_eval.hpp"

namespace {

using namespace zoneeval;

SudokuConfig objects(int n) {
  SudokuConfig cfg;
  for (int i = 0; i < n; ++i) cfg.objects.push_back({1000 + i, 1 + i % 3});
  return cfg;
}

TEST(Sudoku, NineObjectsFillOneImage) {
  const auto layout = sudoku_layout(objects(9));
  ASSERT_EQ(layout.dataset.images().size(), 1u);
  const auto gts = layout.dataset.ground_truths();
  ASSERT_EQ(gts.size(), 9u);
  for (int j = 0; j < 9; ++j) {
    const auto c = bbox_center(gts[j].bbox);
    EXPECT_DOUBLE_EQ(c.x, 100.0 + 200.0 * (j % 3)) << j;
    EXPECT_DOUBLE_EQ(c.y, 100.0 + 200.0 * (j / 3)) << j;
    EXPECT_EQ(gts[j].bbox.w, 128.0);
    EXPECT_EQ(layout.manifest[j].row, j / 3);
    EXPECT_EQ(layout.manifest[j].col, j % 3);
    EXPECT_EQ(layout.manifest[j].source_id, 1000 + j);
  }
  EXPECT_EQ(layout.dataset.categories().size(), 3u);
}

TEST(Sudoku, SingleObjectTopLeft) {
  const auto layout = sudoku_layout(objects(1));
  const auto c = bbox_center(layout.dataset.ground_truths()[0].bbox);
  EXPECT_EQ(c.x, 100.0);
  EXPECT_EQ(c.y, 100.0);
  const auto m = manifest_json(layout);
  EXPECT_EQ(m[0]["cell"], nlohmann::json::array({0, 0}));
}

TEST(Sudoku, EvenCellsAtScale) {
  const auto layout = sudoku_layout(objects(14976));
  EXPECT_EQ(layout.dataset.images().size(), 1664u);
  std::vector<int> per_cell(9, 0);
  for (const auto& p : layout.manifest) ++per_cell[p.row * 3 + p.col];
  for (int n : per_cell) EXPECT_EQ(n, 1664);
}

TEST(Sudoku, InvalidConfigs) {
  EXPECT_THROW(sudoku_layout(SudokuConfig{}), InputError);
  auto cfg = objects(3);
  cfg.object_size = 200;
  EXPECT_THROW(sudoku_layout(cfg), InputError);
  cfg.object_size = 10;
  cfg.canvas = 0;
  EXPECT_THROW(sudoku_layout(cfg), InputError);
  const auto parsed = sudoku_config_from_json(
      nlohmann::json::parse(R"([{"id": 5, "category_id": 2}])"), 300, 64);
  EXPECT_EQ(parsed.objects.at(0).source_id, 5);
  EXPECT_EQ(parsed.canvas, 300.0);
}

TEST(Bench, Reproducible) {
  BenchConfig bc;
  bc.num_images = 30;
  bc.profile.fallback = {0.6, 1.5, 3.0};
  bc.profile.score_law = ScoreLaw::kUniform;
  bc.profile.seed = 77;
  const Partition p(ZoneSpec::annular(5));
  const auto a = synthetic_benchmark(bc, p);
  const auto b = synthetic_benchmark(bc, p);
  EXPECT_EQ(to_json(a.dataset), to_json(b.dataset));
  EXPECT_EQ(to_json(a.detections), to_json(b.detections));
  bc.profile.seed = 78;
  EXPECT_NE(to_json(synthetic_benchmark(bc, p).detections), to_json(a.detections));
  EXPECT_FALSE(a.expected.has_value());  // jitter disables the closed form
}

TEST(Bench, InvalidQuality) {
  BenchConfig bc;
  bc.profile.fallback.recall = 1.2;
  EXPECT_THROW(synthetic_benchmark(bc, Partition(ZoneSpec::annular(5))), InputError);
  bc.profile.fallback.recall = 1.0;
  bc.profile.zones["z7,8"] = {};
  EXPECT_THROW(synthetic_benchmark(bc, Partition(ZoneSpec::annular(5))), InputError);
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"score_law": "random"})")),
               InputError);
}

TEST(Bench, PerfectDetectorScoresFull) {
  BenchConfig bc;
  bc.num_images = 50;
  bc.profile.seed = 3;
  const Partition p(ZoneSpec::annular(5));
  const auto bench = synthetic_benchmark(bc, p);
  const auto r = evaluate_zones(bench.dataset, bench.detections, p, EvalConfig{});
  for (const auto& z : r.zones) EXPECT_EQ(*z.zp, 100.0) << z.id;
  EXPECT_EQ(*r.variance, 0.0);
  EXPECT_EQ(*bench.expected_variance, 0.0);
}

TEST(Bench, ClosedFormMatchesEvaluation) {
  BenchConfig bc;
  bc.num_images = 300;
  bc.profile.fallback = {0.5, 1.0, 0.0};
  bc.profile.zones["z1,2"] = {0.9, 0.25, 0.0};
  bc.profile.seed = 21;
  const Partition p(ZoneSpec::annular(2));
  const auto bench = synthetic_benchmark(bc, p);
  ASSERT_TRUE(bench.expected.has_value());
  const auto r = evaluate_zones(bench.dataset, bench.detections, p, EvalConfig{});
  for (std::size_t z = 0; z < p.size(); ++z) {
    EXPECT_NEAR(*r.zones[z].zp, *(*bench.expected)[z].zp, 0.1) << r.zones[z].id;
  }
  EXPECT_NEAR(*r.variance, *bench.expected_variance, 0.2);
  EXPECT_GT(*(*bench.expected)[1].zp, 85.0);
  EXPECT_LT(*(*bench.expected)[0].zp, 55.0);
  const auto j = expected_json(bench);
  EXPECT_TRUE(j["closed_form"].get<bool>());
  EXPECT_EQ(j["zones"].size(), 2u);
}

TEST(Bench, CentersStayInTheirZone) {
  // A tiny partition cell must still receive the qualities of its own zone.
  BenchConfig bc;
  bc.num_images = 200;
  bc.min_size = bc.max_size = 6;
  bc.profile.fallback = {0.0, 0.0, 0.0};
  bc.profile.zones["g1_1"] = {1.0, 0.0, 0.0};
  bc.profile.seed = 5;
  const Partition p(ZoneSpec::grid(3, 3));
  const auto bench = synthetic_benchmark(bc, p);
  const auto r = evaluate_zones(bench.dataset, bench.detections, p, EvalConfig{});
  for (const auto& z : r.zones) {
    EXPECT_EQ(*z.zp, z.id == "g1_1" ? 100.0 : 0.0) << z.id;
  }
}

TEST(Bench, ConfigFromJson) {
  const auto bc = bench_config_from_json(nlohmann::json::parse(R"({
    "images": 7, "width": 320, "height": 240, "objects_per_image": [2, 3],
    "object_size": [8, 9], "categories": 2, "center_bias": 1.5,
    "profile": {"default": {"recall": 0.4}, "zones": {"z0,1": {"recall": 0.1, "fp_per_tp": 2}},
                "score_law": "uniform", "seed": 11}
  })"));
  EXPECT_EQ(bc.num_images, 7);
  EXPECT_EQ(bc.max_objects, 3);
  EXPECT_EQ(bc.center_bias, 1.5);
  EXPECT_EQ(bc.profile.fallback.recall, 0.4);
  EXPECT_EQ(bc.profile.zones.at("z0,1").fp_per_tp, 2.0);
  EXPECT_EQ(bc.profile.score_law, ScoreLaw::kUniform);
  EXPECT_EQ(bc.profile.seed, 11u);
}

}  // namespace
