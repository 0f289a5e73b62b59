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

// COCO-style greedy matching and 101-point interpolated average precision.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "zoneeval/coco_data.hpp"

namespace zoneeval {

// Half-open area range [lo, hi) in pixels^2.
struct ScaleRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double area) const { return area >= lo && area < hi; }
};

struct EvalConfig {
  std::vector<double> iou_thresholds = default_iou_thresholds();
  int recall_points = 101;
  int max_dets = 100;
  std::optional<ScaleRange> scale_range;
  // Apply max_dets inside each zone instead of per image before filtering.
  bool cap_after_zone = false;
  int workers = 1;

  static std::vector<double> default_iou_thresholds();
  // InputError unless thresholds are strictly increasing in (0,1],
  // recall_points >= 2, max_dets >= 1 and workers >= 1.
  void validate() const;
  std::vector<double> recall_thresholds() const;
};

// numpy.linspace(start, stop, num) bit-for-bit (endpoint included).
std::vector<double> linspace(double start, double stop, int num);

// "lo:hi:step" (COCO style), a single value, or a comma-separated list.
std::vector<double> parse_iou_thresholds(std::string_view text);

enum MatchFlag : std::uint8_t { kTruePositive = 1, kIgnored = 2 };

// Matching outcome for one (image, category): per detection and threshold a
// flag byte (kTruePositive / kIgnored / 0 for a false positive).
struct MatchFragment {
  std::size_t num_thresholds = 0;
  std::vector<double> scores;        // detection order
  std::vector<std::uint32_t> ranks;  // position in the image's score order
  std::vector<std::uint8_t> flags;   // [det * num_thresholds + threshold]
  std::size_t num_positive_gts = 0;  // non-ignored ground truths
};

// Greedy matching of one image and category. `dets` must be sorted by
// descending score and already capped. Crowd ground truths use
// intersection-over-detection-area and may absorb several detections.
MatchFragment match_image(std::span<const GroundTruth> gts,
                          std::span<const Detection> dets, const EvalConfig& cfg);

// IoU between a detection and a ground truth as used by matching.
double match_iou(const Detection& det, const GroundTruth& gt);

// Same matching over index subsets of a precomputed [det x gt] IoU matrix.
struct MatchInput {
  std::span<const double> ious;  // row-major, det_count x gt_count of the cell
  std::size_t gt_stride = 0;     // columns in `ious`
  std::span<const GroundTruth* const> gts;
  std::span<const Detection* const> dets;
  std::span<const std::uint32_t> gt_columns;   // which columns take part
  std::span<const std::uint32_t> det_rows;     // which rows, score order
  std::span<const std::uint32_t> det_ranks;    // rank of each row
};
void match_subset(const MatchInput& in, const EvalConfig& cfg, MatchFragment& out);

// Per-category accumulation of match fragments over images.
class MatchTable {
 public:
  MatchTable(std::size_t num_categories, std::size_t num_thresholds);

  void add(std::size_t category, std::uint32_t image, const MatchFragment& fragment);
  // Appends everything in `other`; order of merges does not affect AP.
  void merge(const MatchTable& other);

  std::size_t num_categories() const { return cats_.size(); }
  std::size_t num_thresholds() const { return num_thresholds_; }

  struct Entry {
    double score;
    std::uint64_t order;  // image << 32 | rank, breaks score ties
  };
  struct Category {
    std::vector<Entry> entries;
    std::vector<std::uint8_t> flags;  // [entry * num_thresholds + threshold]
    std::size_t num_positive_gts = 0;
  };
  const Category& category(std::size_t c) const { return cats_[c]; }

 private:
  std::size_t num_thresholds_;
  std::vector<Category> cats_;
};

struct ApResult {
  std::optional<double> ap;  // nullopt: no category has a positive GT
  std::vector<std::optional<double>> per_threshold;
};

// Precision monotonised from the right, sampled at recall_points evenly spaced
// recalls, averaged over thresholds and categories that have positive GTs.
ApResult ap_from_matches(const MatchTable& table, const EvalConfig& cfg);

}  // namespace zoneeval
