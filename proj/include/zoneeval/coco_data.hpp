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
#pragma once

// COCO-format ground truth / detection ingestion and box geometry.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace zoneeval {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Axis-aligned box in pixels, COCO convention: (left, top, width, height).
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  bool valid() const;
};

struct ImageInfo {
  std::int64_t id = 0;
  double width = 0.0;
  double height = 0.0;
  std::string file_name;
};

struct Category {
  std::int64_t id = 0;
  std::string name;
};

struct GroundTruth {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  BBox bbox;
  double area = 0.0;
  // iscrowd regions: never counted toward recall, absorb matching detections.
  bool ignore = false;
};

struct Detection {
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  BBox bbox;
  double score = 0.0;
};

Point bbox_center(const BBox& b);

// Intersection over union; 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b);

// Immutable, validated, id-sorted ground truth with per-image and
// per-category indexes into ground_truths().
class Dataset {
 public:
  Dataset() = default;
  // Throws InputError on duplicate ids, dangling references or invalid boxes.
  Dataset(std::vector<ImageInfo> images, std::vector<Category> categories,
          std::vector<GroundTruth> ground_truths);

  std::span<const ImageInfo> images() const { return images_; }
  std::span<const Category> categories() const { return categories_; }
  std::span<const GroundTruth> ground_truths() const { return gts_; }

  std::optional<std::size_t> image_index(std::int64_t image_id) const;
  std::optional<std::size_t> category_index(std::int64_t category_id) const;

  // Indexes into ground_truths(), ascending.
  std::span<const std::size_t> gts_of_image(std::size_t image_index) const {
    return by_image_[image_index];
  }
  std::span<const std::size_t> gts_of_category(std::size_t category_index) const {
    return by_category_[category_index];
  }

 private:
  std::vector<ImageInfo> images_;
  std::vector<Category> categories_;
  std::vector<GroundTruth> gts_;
  std::unordered_map<std::int64_t, std::size_t> image_lookup_;
  std::unordered_map<std::int64_t, std::size_t> category_lookup_;
  std::vector<std::vector<std::size_t>> by_image_;
  std::vector<std::vector<std::size_t>> by_category_;
};

// Detections grouped by dataset image index. Each image's list is sorted by
// descending score; ties keep input order.
class DetectionSet {
 public:
  DetectionSet() = default;
  // Throws InputError on unknown image/category ids, non-finite scores or
  // invalid boxes.
  DetectionSet(const Dataset& dataset, std::vector<Detection> detections);

  std::size_t size() const { return total_; }
  std::size_t num_images() const { return per_image_.size(); }
  std::span<const Detection> of_image(std::size_t image_index) const {
    return per_image_[image_index];
  }

 private:
  std::vector<std::vector<Detection>> per_image_;
  std::size_t total_ = 0;
};

Dataset parse_ground_truth(const nlohmann::json& doc);
Dataset load_ground_truth(const std::filesystem::path& path);
nlohmann::json to_json(const Dataset& dataset);

DetectionSet parse_detections(const nlohmann::json& doc, const Dataset& dataset);
DetectionSet load_detections(const std::filesystem::path& path,
                             const Dataset& dataset);
// COCO results list, images in dataset order, each in score order.
nlohmann::json to_json(const DetectionSet& detections);

// Reads a whole JSON file; InputError with the path on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace zoneeval
