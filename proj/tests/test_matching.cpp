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

#include <random>

#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "zoneeval/errors.hpp"
#include "zoneeval/matching.hpp"

namespace {

using namespace zoneeval;

EvalConfig single_threshold(double t = 0.5) {
  EvalConfig cfg;
  cfg.iou_thresholds = {t};
  return cfg;
}

GroundTruth make_gt(BBox b, bool crowd = false) {
  GroundTruth g;
  g.id = 1;
  g.image_id = 1;
  g.category_id = 1;
  g.bbox = b;
  g.area = b.area();
  g.ignore = crowd;
  return g;
}

Detection make_det(BBox b, double score) { return {1, 1, b, score}; }

TEST(Linspace, MatchesNumpy) {
  const auto t = linspace(0.5, 0.95, 10);
  ASSERT_EQ(t.size(), 10u);
  EXPECT_EQ(t[0], 0.5);
  EXPECT_EQ(t[8], 0.8999999999999999);  // numpy gives the same
  EXPECT_EQ(t[9], 0.95);
  const auto r = linspace(0.0, 1.0, 101);
  EXPECT_EQ(r[33], 0.33);
  EXPECT_EQ(r[100], 1.0);
}

TEST(IouThresholds, Parse) {
  EXPECT_EQ(parse_iou_thresholds("0.5:0.95:0.05"), EvalConfig::default_iou_thresholds());
  EXPECT_EQ(parse_iou_thresholds("0.5"), std::vector<double>{0.5});
  EXPECT_EQ(parse_iou_thresholds("0.5,0.75"), (std::vector<double>{0.5, 0.75}));
  EXPECT_THROW(parse_iou_thresholds("0.5:0.9"), InputError);
  EXPECT_THROW(parse_iou_thresholds("a"), InputError);
  EXPECT_THROW(parse_iou_thresholds("0.9:0.5:0.1"), InputError);
}

TEST(EvalConfig, Validate) {
  EvalConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.iou_thresholds = {0.7, 0.5};
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = EvalConfig{};
  cfg.recall_points = 1;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = EvalConfig{};
  cfg.max_dets = 0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = EvalConfig{};
  cfg.iou_thresholds = {1.5};
  EXPECT_THROW(cfg.validate(), InputError);
}

TEST(MatchImage, PerfectDetectionIsTpEverywhere) {
  const std::vector<GroundTruth> gts{make_gt({10, 10, 20, 20})};
  const std::vector<Detection> dets{make_det({10, 10, 20, 20}, 0.9)};
  EvalConfig cfg;
  const auto f = match_image(gts, dets, cfg);
  EXPECT_EQ(f.num_positive_gts, 1u);
  for (std::size_t t = 0; t < cfg.iou_thresholds.size(); ++t) {
    EXPECT_EQ(f.flags[t], kTruePositive);
  }
}

TEST(MatchImage, SingleMatchRule) {
  const std::vector<GroundTruth> gts{make_gt({10, 10, 20, 20})};
  const std::vector<Detection> dets{make_det({10, 10, 20, 20}, 0.9),
                                    make_det({11, 10, 20, 20}, 0.8)};
  const auto f = match_image(gts, dets, single_threshold());
  EXPECT_EQ(f.flags[0], kTruePositive);
  EXPECT_EQ(f.flags[1], 0);
}

TEST(MatchImage, GreedyCrossedAssignment) {
  // A is at x 0..10, B at x 4..14. Detection 1 (higher score) overlaps B more
  // than A, so greedy gives it B; detection 2 then only reaches A below t.
  const std::vector<GroundTruth> gts{make_gt({0, 0, 10, 10}), make_gt({4, 0, 10, 10})};
  const std::vector<Detection> dets{make_det({3, 0, 10, 10}, 0.9),
                                    make_det({6, 0, 10, 10}, 0.8)};
  const auto f = match_image(gts, dets, single_threshold());
  EXPECT_EQ(f.flags[0], kTruePositive);
  EXPECT_EQ(f.flags[1], 0);

  oracle::Instance inst{1, {}, {}};
  inst.gts = {{0, 1, {0, 0, 10, 10}, false, 100}, {0, 1, {4, 0, 10, 10}, false, 100}};
  inst.dets = {{0, 1, {3, 0, 10, 10}, 0.9}, {0, 1, {6, 0, 10, 10}, 0.8}};
  oracle::Options opt;
  opt.thresholds = {0.5};
  const auto l = fixtures::from_oracle(inst);
  EXPECT_NEAR(*fixtures::engine_ap(l, single_threshold()).ap, *oracle::ap(inst.gts, inst.dets, opt),
              1e-15);
}

TEST(MatchImage, ThresholdIsInclusive) {
  // IoU exactly 0.5: boxes [0,10) and [0,20) of height 10 -> 100 / 200.
  const std::vector<GroundTruth> gts{make_gt({0, 0, 20, 10})};
  const std::vector<Detection> dets{make_det({0, 0, 10, 10}, 0.9)};
  EXPECT_EQ(match_image(gts, dets, single_threshold(0.5)).flags[0], kTruePositive);
  EXPECT_EQ(match_image(gts, dets, single_threshold(0.55)).flags[0], 0);
}

TEST(MatchImage, CrowdAbsorbsDetections) {
  const std::vector<GroundTruth> gts{make_gt({0, 0, 100, 100}, true)};
  const std::vector<Detection> dets{make_det({10, 10, 10, 10}, 0.9),
                                    make_det({50, 50, 10, 10}, 0.8)};
  const auto f = match_image(gts, dets, single_threshold());
  EXPECT_EQ(f.num_positive_gts, 0u);
  EXPECT_EQ(f.flags[0], kIgnored);
  EXPECT_EQ(f.flags[1], kIgnored);
  // Overlap is measured against the detection area.
  EXPECT_DOUBLE_EQ(match_iou(dets[0], gts[0]), 1.0);
}

TEST(MatchImage, RegularGtPreferredOverCrowd) {
  const std::vector<GroundTruth> gts{make_gt({0, 0, 100, 100}, true), make_gt({10, 10, 10, 10})};
  const std::vector<Detection> dets{make_det({10, 10, 10, 10}, 0.9)};
  EXPECT_EQ(match_image(gts, dets, single_threshold()).flags[0], kTruePositive);
}

TEST(MatchImage, ScaleRangeIgnores) {
  EvalConfig cfg = single_threshold();
  cfg.scale_range = ScaleRange{0, 32 * 32};
  const std::vector<GroundTruth> gts{make_gt({0, 0, 40, 40}), make_gt({100, 100, 10, 10})};
  const std::vector<Detection> dets{make_det({0, 0, 40, 40}, 0.9),   // matches big GT
                                    make_det({200, 200, 50, 50}, 0.8),  // big, unmatched
                                    make_det({300, 300, 5, 5}, 0.7)};    // small, unmatched
  const auto f = match_image(gts, dets, cfg);
  EXPECT_EQ(f.num_positive_gts, 1u);
  EXPECT_EQ(f.flags[0], kIgnored);
  EXPECT_EQ(f.flags[1], kIgnored);
  EXPECT_EQ(f.flags[2], 0);
  // Half-open: an area of exactly hi is outside.
  EXPECT_FALSE(cfg.scale_range->contains(32 * 32));
  EXPECT_TRUE(cfg.scale_range->contains(0));
}

ApResult ap_of(const fixtures::Builder& b, const EvalConfig& cfg) {
  return fixtures::engine_ap(fixtures::load(b), cfg);
}

TEST(ApFromMatches, PerfectIsOne) {
  fixtures::Builder b(2);
  b.gt(1, {0, 0, 10, 10}).gt(2, {20, 20, 30, 30});
  b.det(1, {0, 0, 10, 10}, 0.4).det(2, {20, 20, 30, 30}, 0.6);
  EXPECT_EQ(*ap_of(b, EvalConfig{}).ap, 1.0);
}

TEST(ApFromMatches, NoDetectionsIsZero) {
  fixtures::Builder b;
  b.gt(1, {0, 0, 10, 10});
  EXPECT_EQ(*ap_of(b, EvalConfig{}).ap, 0.0);
}

TEST(ApFromMatches, NoPositivesIsUndefined) {
  fixtures::Builder b;
  b.gt(1, {0, 0, 10, 10}, 1, true);
  b.det(1, {0, 0, 10, 10}, 0.5);
  EXPECT_FALSE(ap_of(b, EvalConfig{}).ap.has_value());
}

TEST(ApFromMatches, TpFpTpHandCurve) {
  // Precisions 1, 1/2, 2/3 at recalls 1/3, 1/3, 2/3. After monotonizing,
  // recall levels 0.00..0.33 (34 points) get 1, 0.34..0.66 (33 points) get
  // 2/3, the rest 0: (34 + 22) / 101.
  fixtures::Builder b;
  b.gt(1, {0, 0, 10, 10}).gt(1, {20, 0, 10, 10}).gt(1, {40, 0, 10, 10});
  b.det(1, {0, 0, 10, 10}, 0.9).det(1, {70, 70, 10, 10}, 0.8).det(1, {20, 0, 10, 10}, 0.7);
  const auto r = ap_of(b, single_threshold());
  EXPECT_NEAR(*r.ap, 56.0 / 101.0, 1e-15);

  oracle::Instance inst{1, {}, {}};
  inst.gts = {{0, 1, {0, 0, 10, 10}, false, 100}, {0, 1, {20, 0, 10, 10}, false, 100},
              {0, 1, {40, 0, 10, 10}, false, 100}};
  inst.dets = {{0, 1, {0, 0, 10, 10}, 0.9}, {0, 1, {70, 70, 10, 10}, 0.8},
               {0, 1, {20, 0, 10, 10}, 0.7}};
  oracle::Options opt;
  opt.thresholds = {0.5};
  EXPECT_NEAR(*oracle::ap(inst.gts, inst.dets, opt), 56.0 / 101.0, 1e-15);
}

TEST(ApFromMatches, StepAtHalfRecall) {
  // Two GTs, one found: precision 1 up to recall 0.5 -> 51 of 101 points.
  fixtures::Builder b;
  b.gt(1, {0, 0, 10, 10}).gt(1, {50, 50, 10, 10});
  b.det(1, {0, 0, 10, 10}, 0.9);
  EXPECT_DOUBLE_EQ(*ap_of(b, single_threshold()).ap, 51.0 / 101.0);
}

TEST(ApFromMatches, CategoriesWithoutGtExcluded) {
  fixtures::Builder b(1, 100, 100, 2);
  b.gt(1, {0, 0, 10, 10}, 1);
  b.det(1, {0, 0, 10, 10}, 0.9, 1).det(1, {50, 50, 10, 10}, 0.9, 2);
  EXPECT_EQ(*ap_of(b, EvalConfig{}).ap, 1.0);
}

TEST(ApFromMatches, MaxDetsCapsPerImageAndCategory) {
  fixtures::Builder b;
  b.gt(1, {0, 0, 10, 10});
  b.det(1, {50, 50, 10, 10}, 0.9).det(1, {0, 0, 10, 10}, 0.8);
  EvalConfig cfg = single_threshold();
  cfg.max_dets = 1;
  EXPECT_EQ(*ap_of(b, cfg).ap, 0.0);
  cfg.max_dets = 2;
  EXPECT_DOUBLE_EQ(*ap_of(b, cfg).ap, 0.5);
}

TEST(ApFromMatches, MergeOrderIrrelevant) {
  std::mt19937_64 rng(11);
  const auto inst = oracle::random_instance(rng, 6, 10, 4);
  const auto l = fixtures::from_oracle(inst);
  EvalConfig cfg;
  MatchTable forward(2, cfg.iou_thresholds.size());
  MatchTable backward(2, cfg.iou_thresholds.size());
  std::vector<MatchTable> per_image;
  for (std::size_t img = 0; img < l.dataset.images().size(); ++img) {
    MatchTable t(2, cfg.iou_thresholds.size());
    std::vector<GroundTruth> gts;
    for (auto gi : l.dataset.gts_of_image(img)) {
      if (l.dataset.ground_truths()[gi].category_id == 1) gts.push_back(l.dataset.ground_truths()[gi]);
    }
    std::vector<Detection> dets;
    std::vector<std::uint32_t> ranks;
    const auto all = l.detections.of_image(img);
    for (std::size_t d = 0; d < all.size(); ++d) {
      if (all[d].category_id != 1) continue;
      dets.push_back(all[d]);
      ranks.push_back(static_cast<std::uint32_t>(d));
    }
    auto f = match_image(gts, dets, cfg);
    f.ranks = ranks;
    t.add(0, static_cast<std::uint32_t>(img), f);
    per_image.push_back(std::move(t));
  }
  for (const auto& t : per_image) forward.merge(t);
  for (auto it = per_image.rbegin(); it != per_image.rend(); ++it) backward.merge(*it);
  const auto a = ap_from_matches(forward, cfg);
  const auto b = ap_from_matches(backward, cfg);
  EXPECT_EQ(a.ap, b.ap);
  EXPECT_EQ(a.per_threshold, b.per_threshold);
}

// The full acceptance run uses 1000 instances; this keeps a quick variant in
// the unit suite, covering the scale-range and max-dets paths as well.
TEST(ApOracle, RandomInstancesAgree) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = oracle::random_instance(rng);
    const auto l = fixtures::from_oracle(inst);
    EvalConfig cfg;
    oracle::Options opt;
    if (trial % 3 == 1) {
      cfg.scale_range = ScaleRange{0, 600};
      opt.range = {{0, 600}};
    }
    if (trial % 5 == 2) {
      cfg.max_dets = 3;
      opt.max_dets = 3;
    }
    const auto got = fixtures::engine_ap(l, cfg).ap;
    const auto want = oracle::ap(inst.gts, inst.dets, opt);
    ASSERT_EQ(got.has_value(), want.has_value()) << trial;
    if (got) {
      ASSERT_NEAR(*got, *want, 1e-12) << trial;
    }
  }
}

}  // namespace
