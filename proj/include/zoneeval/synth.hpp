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

// Synthetic annotation generators: the 3x3 "Sudoku" layout and benchmarks with
// controllable per-zone detection quality.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zoneeval/coco_data.hpp"
#include "zoneeval/zone_partition.hpp"

namespace zoneeval {

struct SudokuObject {
  std::int64_t source_id = 0;
  std::int64_t category_id = 0;
};

struct SudokuConfig {
  double canvas = 600.0;
  double object_size = 128.0;  // side of every placed box
  std::vector<SudokuObject> objects;
  std::vector<Category> categories;  // derived from objects when empty
};

struct SudokuPlacement {
  std::int64_t annotation_id = 0;
  std::int64_t image_id = 0;
  std::int64_t source_id = 0;
  int row = 0;  // 0-based grid cell
  int col = 0;
};

struct SudokuLayout {
  Dataset dataset;
  std::vector<SudokuPlacement> manifest;
};

// Object j goes to image j / 9, cell j % 9 in row-major order, centered at
// ((2c+1) canvas/6, (2r+1) canvas/6). InputError for an empty object list,
// canvas <= 0 or object_size >= canvas / 3.
SudokuLayout sudoku_layout(const SudokuConfig& cfg);
// Accepts a list of {id, category_id} or {objects: [...], categories: [...]}.
SudokuConfig sudoku_config_from_json(const nlohmann::json& doc, double canvas,
                                     double object_size);
nlohmann::json manifest_json(const SudokuLayout& layout);

struct ZoneQuality {
  double recall = 1.0;     // fraction of GTs that receive a matching detection
  double fp_per_tp = 0.0;  // unmatched detections per matched one
  double loc_jitter = 0.0; // stddev of the box shift, pixels
};

enum class ScoreLaw {
  kTpFirst,  // matched detections score in [0.5, 1), unmatched in [0, 0.5)
  kUniform,  // every score uniform in [0, 1)
};

struct QualityProfile {
  ZoneQuality fallback;
  std::map<std::string, ZoneQuality> zones;  // by partition zone id
  // When set, quality is interpolated linearly in the spatial weight of the
  // GT center between `center` (weight 0) and `border` (weight 1), and
  // recall becomes a per-object Bernoulli draw.
  struct Gradient {
    ZoneQuality center;
    ZoneQuality border;
  };
  std::optional<Gradient> gradient;
  ScoreLaw score_law = ScoreLaw::kTpFirst;
  std::uint64_t seed = 0;
};

struct BenchConfig {
  int num_images = 100;
  double width = 640.0;
  double height = 480.0;
  int min_objects = 1;
  int max_objects = 10;
  double min_size = 16.0;
  double max_size = 128.0;
  int num_categories = 3;
  // GT center density proportional to exp(-center_bias * spatial_weight).
  double center_bias = 0.0;
  QualityProfile profile;
};

struct ExpectedZone {
  std::string id;
  std::optional<double> zp;  // percent
};

struct SyntheticBenchmark {
  Dataset dataset;
  DetectionSet detections;
  // Closed-form ZPs, present for tp_first profiles without jitter or gradient.
  std::optional<std::vector<ExpectedZone>> expected;
  std::optional<double> expected_variance;
};

// Deterministic given cfg (including profile.seed). InputError for recall
// outside [0,1] or other invalid settings. `recall_points` must match the
// evaluation that the expected ZPs are compared with.
SyntheticBenchmark synthetic_benchmark(const BenchConfig& cfg, const Partition& partition,
                                       int recall_points = 101);

QualityProfile profile_from_json(const nlohmann::json& doc);
// Dataset shape keys: images, width, height, objects_per_image [min,max],
// object_size [min,max], categories, center_bias; plus an optional "profile".
BenchConfig bench_config_from_json(const nlohmann::json& doc);
nlohmann::json expected_json(const SyntheticBenchmark& bench);

}  // namespace zoneeval
