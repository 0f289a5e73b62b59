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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zoneeval/coco_data.hpp"
#include "zoneeval/zone_eval.hpp"

namespace zoneeval {

// Product-moment correlation. InputError when sizes differ or are < 2;
// nullopt when either input is constant.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of average (fractional) ranks.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

// 1-based ranks, ties share the mean of the positions they occupy.
std::vector<double> average_ranks(std::span<const double> x);

struct CountMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::size_t> counts;  // row-major

  std::size_t at(int r, int c) const { return counts[r * cols + c]; }
};

// Ground-truth centers per cell of the half-open rows x cols grid.
CountMatrix center_counts(const Dataset& dataset, int rows, int cols);
std::string to_csv(const CountMatrix& counts);

struct CorrelationCurve {
  std::vector<double> iou_thresholds;
  std::vector<std::optional<double>> pcc;
  std::vector<std::optional<double>> scc;
};

// Per IoU threshold, correlates the ZP matrix with the count matrix over the
// cells where ZP is defined. InputError on shape mismatch or when any panel
// has fewer than two defined cells.
CorrelationCurve correlate_zp_distribution(const Heatmap& heatmap,
                                           const CountMatrix& counts);
// iou,pcc,scc; undefined coefficients are empty.
std::string to_csv(const CorrelationCurve& curve);

enum class Split { kTrain, kTest };
enum class ZoneTag { kIn, kOut };

struct FeatureRecord {
  Split split = Split::kTrain;
  ZoneTag zone_tag = ZoneTag::kIn;
  std::int64_t category = 0;
  double scale = 0.0;  // object area, pixels^2
  std::vector<double> vector;
};

struct FeatureGroup {
  Split split = Split::kTrain;
  ZoneTag zone_tag = ZoneTag::kIn;
};

// One JSON object per line: {split, zone_tag, category_id, area, vector}.
std::vector<FeatureRecord> parse_feature_lines(std::istream& in);
std::vector<FeatureRecord> load_features(const std::filesystem::path& path);
// "train:in", "test:out", ...
FeatureGroup parse_feature_group(const std::string& text);

// Mean absolute per-dimension difference between the two groups' feature
// centers, taken per (scale bin, category) and averaged over every
// (bin, category, dimension) term populated on both sides. Scale bins are
// [((k-1) r)^2, (k r)^2) for k = 1..K-1 plus [((K-1) r)^2, inf).
double pattern_distance(std::span<const FeatureRecord> records, const FeatureGroup& a,
                        const FeatureGroup& b, int num_bins, double bin_width);

}  // namespace zoneeval
