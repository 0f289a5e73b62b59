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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "zoneeval/coco_data.hpp"
#include "zoneeval/matching.hpp"

namespace fixtures {

using namespace zoneeval;

// Incremental builder for small hand-made datasets.
class Builder {
 public:
  explicit Builder(int num_images = 1, double width = 100, double height = 100,
                   int num_categories = 1) {
    for (int i = 1; i <= num_images; ++i) images_.push_back({i, width, height, {}});
    for (int c = 1; c <= num_categories; ++c) categories_.push_back({c, "c" + std::to_string(c)});
  }

  Builder& gt(std::int64_t image, BBox box, std::int64_t category = 1, bool crowd = false) {
    GroundTruth g;
    g.id = static_cast<std::int64_t>(gts_.size()) + 1;
    g.image_id = image;
    g.category_id = category;
    g.bbox = box;
    g.area = box.area();
    g.ignore = crowd;
    gts_.push_back(g);
    return *this;
  }

  Builder& det(std::int64_t image, BBox box, double score, std::int64_t category = 1) {
    dets_.push_back({image, category, box, score});
    return *this;
  }

  Dataset dataset() const { return Dataset(images_, categories_, gts_); }
  std::vector<Detection> detections() const { return dets_; }

 private:
  std::vector<ImageInfo> images_;
  std::vector<Category> categories_;
  std::vector<GroundTruth> gts_;
  std::vector<Detection> dets_;
};

struct Loaded {
  Dataset dataset;
  DetectionSet detections;
};

inline Loaded load(const Builder& b) {
  Loaded l;
  l.dataset = b.dataset();
  l.detections = DetectionSet(l.dataset, b.detections());
  return l;
}

// Same instance in library form; image index i becomes image id i + 1.
inline Loaded from_oracle(const oracle::Instance& inst, double size = 200) {
  Builder b(inst.num_images, size, size, 2);
  for (const auto& g : inst.gts) {
    b.gt(g.image + 1, {g.box.x, g.box.y, g.box.w, g.box.h}, g.category, g.crowd);
  }
  for (const auto& d : inst.dets) {
    b.det(d.image + 1, {d.box.x, d.box.y, d.box.w, d.box.h}, d.score, d.category);
  }
  return load(b);
}

// Runs per-(image, category) matching and the AP accumulator directly.
inline ApResult engine_ap(const Loaded& l, const EvalConfig& cfg) {
  MatchTable table(l.dataset.categories().size(), cfg.iou_thresholds.size());
  const auto gts = l.dataset.ground_truths();
  for (std::size_t img = 0; img < l.dataset.images().size(); ++img) {
    std::map<std::size_t, std::vector<GroundTruth>> cell_gts;
    std::map<std::size_t, std::vector<Detection>> cell_dets;
    std::map<std::size_t, std::vector<std::uint32_t>> cell_ranks;
    for (std::size_t gi : l.dataset.gts_of_image(img)) {
      cell_gts[*l.dataset.category_index(gts[gi].category_id)].push_back(gts[gi]);
    }
    const auto dets = l.detections.of_image(img);
    for (std::size_t d = 0; d < dets.size(); ++d) {
      const auto c = *l.dataset.category_index(dets[d].category_id);
      if (cell_dets[c].size() >= static_cast<std::size_t>(cfg.max_dets)) continue;
      cell_dets[c].push_back(dets[d]);
      cell_ranks[c].push_back(static_cast<std::uint32_t>(d));
    }
    for (std::size_t c = 0; c < l.dataset.categories().size(); ++c) {
      if (cell_gts[c].empty() && cell_dets[c].empty()) continue;
      auto f = match_image(cell_gts[c], cell_dets[c], cfg);
      f.ranks = cell_ranks[c];
      table.add(c, static_cast<std::uint32_t>(img), f);
    }
  }
  return ap_from_matches(table, cfg);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("zoneeval_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fixtures
