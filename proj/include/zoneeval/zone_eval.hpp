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

// Zone-restricted evaluation: each zone is scored by the AP of the ground
// truths and detections whose box centers fall inside it (ZP), and the spread
// of those scores is summarised by their population variance.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "zoneeval/coco_data.hpp"
#include "zoneeval/matching.hpp"
#include "zoneeval/zone_partition.hpp"

namespace zoneeval {

struct ZoneResult {
  std::string id;
  std::optional<double> zp;  // percent; nullopt when the zone has no positive GT
  std::vector<std::optional<double>> zp_per_iou;
  std::size_t gt_count = 0;
  std::size_t det_count = 0;
  double area_fraction = 0.0;
};

struct ZoneReport {
  std::string partition;
  EvalConfig config;
  std::vector<ZoneResult> zones;
  std::optional<double> variance;  // percent^2 over defined zones
  double full_ap = 0.0;            // percent, whole image
  std::vector<std::optional<double>> full_ap_per_iou;
  std::vector<std::string> undefined_zones;
};

// Matching state shared by every evaluation of one (dataset, detections,
// partition, config): per-(image, category) IoU matrices and zone labels of
// every box center. Evaluations with different scale ranges reuse it.
class ZoneEvaluator {
 public:
  ZoneEvaluator(const Dataset& dataset, const DetectionSet& detections,
                const Partition& partition, EvalConfig cfg);
  ~ZoneEvaluator();
  ZoneEvaluator(const ZoneEvaluator&) = delete;
  ZoneEvaluator& operator=(const ZoneEvaluator&) = delete;

  struct Outcome {
    std::vector<ApResult> zones;
    ApResult full;
    std::vector<std::size_t> gt_counts;
    std::vector<std::size_t> det_counts;
  };
  // `scale_range` overrides the configured range for this run.
  Outcome run(std::optional<ScaleRange> scale_range) const;

  const EvalConfig& config() const { return cfg_; }
  const Partition& partition() const { return partition_; }

 private:
  struct Cell;
  const Partition& partition_;
  EvalConfig cfg_;
  std::vector<Cell> cells_;
  std::size_t num_categories_ = 0;
};

// Throws UndefinedError when the dataset has no positive ground truth at all.
ZoneReport evaluate_zones(const Dataset& dataset, const DetectionSet& detections,
                          const Partition& partition, const EvalConfig& cfg);

// Unpartitioned AP in percent (nullopt without positive GT).
std::optional<double> full_image_ap(const Dataset& dataset,
                                    const DetectionSet& detections,
                                    const EvalConfig& cfg);

// Population variance. InputError on an empty list.
double zp_variance(std::span<const double> zps);

nlohmann::json to_json(const ZoneReport& report);
// One row per zone: zone,zp,gt_count,det_count,area_fraction,zp@<iou>...
std::string to_csv(const ZoneReport& report);
// "AP Var. <zone>..." header plus one row, one decimal.
std::string format_table(const ZoneReport& report);

struct ScaleStudyRow {
  std::string label;  // "4", ..., "128", "inf"
  std::vector<ScaleRange> bins;
  // [zone][bin] percent, nullopt where the (zone, bin) has no positive GT
  std::vector<std::vector<std::optional<double>>> zone_bin_zps;
  std::vector<std::optional<double>> zone_means;
};

struct ScaleStudyReport {
  std::string partition;
  std::vector<std::string> zone_ids;
  std::vector<ScaleStudyRow> rows;
  std::vector<std::optional<double>> grand_means;   // mean of per-row means
  std::vector<std::optional<double>> pooled_means;  // mean over every defined bin
};

// Bins [(k r)^2, ((k+1) r)^2) up to 256^2 plus [256^2, inf) for
// r in {4, 8, 16, 32, 64, 128}; a single [0, inf) bin for r = inf.
std::vector<ScaleRange> scale_bins(double r, double max_endpoint = 256.0);

ScaleStudyReport scale_study(const Dataset& dataset, const DetectionSet& detections,
                             const Partition& partition, const EvalConfig& cfg);
nlohmann::json to_json(const ScaleStudyReport& report);

struct Heatmap {
  int rows = 0;
  int cols = 0;
  std::vector<double> iou_thresholds;
  // Row-major rows*cols; nullopt marks cells without positive GT.
  std::vector<std::optional<double>> mean_zp;
  std::vector<std::vector<std::optional<double>>> per_threshold;
};

Heatmap grid_heatmap(const Dataset& dataset, const DetectionSet& detections, int rows,
                     int cols, const EvalConfig& cfg);
Heatmap heatmap_from_report(const ZoneReport& report, int rows, int cols);
nlohmann::json to_json(const Heatmap& heatmap);
Heatmap heatmap_from_json(const nlohmann::json& doc);
// Row-major CSV matrix, empty cell for undefined values. panel < 0 selects the
// mean over thresholds, otherwise the threshold index.
std::string heatmap_csv(const Heatmap& heatmap, int panel = -1);

}  // namespace zoneeval
