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

#include "support/fixtures.hpp"
#include "zoneeval/coco_data.hpp"
#include "zoneeval/errors.hpp"

namespace {

using namespace zoneeval;
using nlohmann::json;

json minimal_gt() {
  return json::parse(R"({
    "images": [{"id": 1, "width": 640, "height": 480, "file_name": "a.jpg"}],
    "categories": [{"id": 3, "name": "car"}],
    "annotations": [{"id": 10, "image_id": 1, "category_id": 3, "bbox": [1, 2, 30, 40]}]
  })");
}

TEST(CocoData, MinimalFileLoads) {
  const Dataset ds = parse_ground_truth(minimal_gt());
  ASSERT_EQ(ds.ground_truths().size(), 1u);
  const auto& g = ds.ground_truths()[0];
  EXPECT_EQ(g.id, 10);
  EXPECT_DOUBLE_EQ(g.area, 1200.0);  // w*h when area is absent
  EXPECT_FALSE(g.ignore);
  EXPECT_EQ(ds.images()[0].width, 640.0);
}

TEST(CocoData, MissingImageNamesAnnotation) {
  auto doc = minimal_gt();
  doc["annotations"][0]["image_id"] = 99;
  try {
    parse_ground_truth(doc);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("annotation 10"), std::string::npos) << e.what();
  }
}

TEST(CocoData, RejectsBadInput) {
  auto doc = minimal_gt();
  doc["annotations"][0]["bbox"] = {0, 0, 0, 5};
  EXPECT_THROW(parse_ground_truth(doc), InputError);
  doc = minimal_gt();
  doc["annotations"].push_back(doc["annotations"][0]);
  EXPECT_THROW(parse_ground_truth(doc), InputError);  // duplicate id
  doc = minimal_gt();
  doc["annotations"][0]["category_id"] = 4;
  EXPECT_THROW(parse_ground_truth(doc), InputError);
  doc = minimal_gt();
  doc.erase("images");
  EXPECT_THROW(parse_ground_truth(doc), InputError);
  EXPECT_THROW(parse_ground_truth(json::array()), InputError);
}

TEST(CocoData, CrowdAndIgnoreFlags) {
  auto doc = minimal_gt();
  doc["annotations"][0]["iscrowd"] = 1;
  EXPECT_TRUE(parse_ground_truth(doc).ground_truths()[0].ignore);
  doc = minimal_gt();
  doc["annotations"][0]["ignore"] = true;
  EXPECT_TRUE(parse_ground_truth(doc).ground_truths()[0].ignore);
}

TEST(CocoData, SevenObjectsFourClasses) {
  fixtures::Builder b(3, 100, 100, 4);
  b.gt(1, {0, 0, 10, 10}, 1).gt(1, {20, 20, 10, 10}, 2).gt(2, {5, 5, 10, 10}, 3);
  b.gt(2, {50, 50, 10, 10}, 4).gt(3, {1, 1, 5, 5}, 1).gt(3, {60, 60, 5, 5}, 2);
  b.gt(3, {70, 10, 5, 5}, 4);
  const Dataset ds = b.dataset();
  EXPECT_EQ(ds.images().size(), 3u);
  EXPECT_EQ(ds.ground_truths().size(), 7u);
  EXPECT_EQ(ds.categories().size(), 4u);
  EXPECT_EQ(ds.gts_of_image(2).size(), 3u);
  EXPECT_EQ(ds.gts_of_category(0).size(), 2u);
}

TEST(CocoData, DetectionsSortedAndGrouped) {
  const Dataset ds = parse_ground_truth(minimal_gt());
  EXPECT_EQ(parse_detections(json::array(), ds).size(), 0u);

  const auto dets = parse_detections(json::parse(R"([
    {"image_id": 1, "category_id": 3, "bbox": [0, 0, 5, 5], "score": 0.3},
    {"image_id": 1, "category_id": 3, "bbox": [1, 1, 5, 5], "score": 0.9}
  ])"),
                                     ds);
  ASSERT_EQ(dets.of_image(0).size(), 2u);
  EXPECT_EQ(dets.of_image(0)[0].score, 0.9);
  EXPECT_EQ(dets.of_image(0)[1].score, 0.3);
}

TEST(CocoData, FiveDetectionGrouping) {
  fixtures::Builder b(3);
  b.gt(1, {0, 0, 5, 5});
  b.det(2, {0, 0, 5, 5}, 0.1).det(1, {0, 0, 5, 5}, 0.5).det(2, {0, 0, 5, 5}, 0.7);
  b.det(3, {0, 0, 5, 5}, 0.2).det(2, {0, 0, 5, 5}, 0.7);
  const auto l = fixtures::load(b);
  EXPECT_EQ(l.detections.size(), 5u);
  EXPECT_EQ(l.detections.of_image(0).size(), 1u);
  EXPECT_EQ(l.detections.of_image(1).size(), 3u);
  EXPECT_EQ(l.detections.of_image(2).size(), 1u);
  EXPECT_EQ(l.detections.of_image(1)[2].score, 0.1);
}

TEST(CocoData, DetectionErrors) {
  const Dataset ds = parse_ground_truth(minimal_gt());
  EXPECT_THROW(parse_detections(json::parse(R"([{"image_id": 2, "category_id": 3,
      "bbox": [0,0,1,1], "score": 1}])"),
                                ds),
               InputError);
  EXPECT_THROW(parse_detections(json::parse(R"([{"image_id": 1, "category_id": 3,
      "bbox": [0,0,1,1]}])"),
                                ds),
               InputError);
  EXPECT_THROW(parse_detections(json::parse(R"({"a": 1})"), ds), InputError);
}

TEST(CocoData, JsonRoundTrip) {
  const Dataset ds = parse_ground_truth(minimal_gt());
  const Dataset again = parse_ground_truth(to_json(ds));
  EXPECT_EQ(to_json(ds), to_json(again));
  const auto dets = parse_detections(
      json::parse(R"([{"image_id": 1, "category_id": 3, "bbox": [0, 0, 5, 5], "score": 0.25}])"),
      ds);
  EXPECT_EQ(to_json(parse_detections(to_json(dets), ds)), to_json(dets));
}

TEST(CocoData, LoadFromFile) {
  const auto dir = fixtures::temp_dir("coco_load");
  fixtures::write_file(dir / "gt.json", minimal_gt().dump());
  fixtures::write_file(dir / "bad.json", "{not json");
  EXPECT_EQ(load_ground_truth(dir / "gt.json").ground_truths().size(), 1u);
  EXPECT_THROW(load_ground_truth(dir / "bad.json"), InputError);
  EXPECT_THROW(load_ground_truth(dir / "missing.json"), InputError);
}

TEST(Geometry, Centers) {
  EXPECT_EQ(bbox_center({0, 0, 10, 10}).x, 5.0);
  EXPECT_EQ(bbox_center({0, 0, 10, 10}).y, 5.0);
  EXPECT_EQ(bbox_center({10, 20, 30, 40}).x, 25.0);
  EXPECT_EQ(bbox_center({10, 20, 30, 40}).y, 40.0);
  EXPECT_EQ(bbox_center({0, 0, 600, 600}).x, 300.0);
}

TEST(Geometry, Iou) {
  EXPECT_DOUBLE_EQ(iou({3, 4, 10, 12}, {3, 4, 10, 12}), 1.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {10, 0, 10, 10}), 0.0);  // touching edges
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {5, 0, 10, 10}), iou({5, 0, 10, 10}, {0, 0, 10, 10}));
}

}  // namespace
