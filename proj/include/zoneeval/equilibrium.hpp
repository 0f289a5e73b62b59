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

// Spatial weighting of anchor positions, label-assignment simulation under
// a position-dependent IoU threshold, and per-zone object / positive-sample
// densities.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "zoneeval/coco_data.hpp"
#include "zoneeval/zone_partition.hpp"

namespace zoneeval {

// 2 * max(|x - W/2| / W, |y - H/2| / H): 0 at the image center, 1 on the
// border. InputError for points outside [0,W] x [0,H].
double spatial_weight(double x, double y, double width, double height);

// 1 + gamma * spatial_weight.
double se_loss_weight(double x, double y, double width, double height, double gamma);

struct Anchor {
  Point center;
  BBox box;

  static Anchor from_box(const BBox& box) { return {bbox_center(box), box}; }
};

// rows x cols anchor centers at cell centers; one anchor per scale, sized
// scale * (W/cols, H/rows).
std::vector<Anchor> anchor_grid(const ImageInfo& image, int rows, int cols,
                                std::span<const double> scales);

struct SelaRule {
  double t = 0.5;      // positive IoU threshold
  double gamma = 0.0;  // relaxation toward the border
};

struct BetaRule {
  double alpha_pos = 0.5;
  double beta = 0.0;
  std::string zone;  // id within the partition used for assignment
};

struct AssignConfig {
  SelaRule sela;
  std::optional<BetaRule> beta;  // set: beta-zone rule instead of SELA
};

struct Assignment {
  // Per ground truth, ascending anchor indices assigned positive.
  std::vector<std::vector<std::size_t>> positives;
  // Beta rule with alpha_pos + beta > 1: no in-zone anchor can be positive.
  bool in_zone_impossible = false;

  // Anchors positive for at least one ground truth, ascending.
  std::vector<std::size_t> positive_anchors() const;
};

// iou(a, g) >= t - gamma * spatial_weight(a.center). InputError if
// t - gamma < 0 or an anchor center lies outside the image.
Assignment sela_assign(std::span<const Anchor> anchors, std::span<const GroundTruth> gts,
                       const ImageInfo& image, const SelaRule& rule);

// iou(a, g) >= alpha_pos + beta * [a.center in zone].
Assignment beta_assign(std::span<const Anchor> anchors, std::span<const GroundTruth> gts,
                       double alpha_pos, double beta, const Zone& zone,
                       const ImageInfo& image);

struct ZoneDensity {
  std::string id;
  std::size_t count = 0;
  double area = 0.0;  // normalized fraction, or pixels^2 with absolute areas
  double density = 0.0;
};

struct DensityReport {
  std::string partition;
  bool absolute_area = false;
  std::vector<ZoneDensity> zones;
  bool in_zone_impossible = false;  // assignment reports only
};

// Ground-truth centers per zone divided by zone area. Absolute areas need all
// images to share one size (InputError otherwise).
DensityReport object_density(const Dataset& dataset, const Partition& partition,
                             bool absolute_area = false);

// Positive anchors of one image bucketed by their center zone.
DensityReport supervision_density(const Assignment& assignment,
                                  std::span<const Anchor> anchors,
                                  const Partition& partition, const ImageInfo& image,
                                  bool absolute_area = false);

struct AnchorGridSpec {
  int rows = 8;
  int cols = 8;
  std::vector<double> scales{1.0};
};

// Runs the assignment on every image of the dataset (non-crowd ground truths)
// and sums per-zone positive-anchor counts.
DensityReport assignment_density(const Dataset& dataset, const Partition& partition,
                                 const AnchorGridSpec& grid, const AssignConfig& cfg,
                                 bool absolute_area = false);

nlohmann::json to_json(const DensityReport& report);
std::string to_csv(const DensityReport& report);

}  // namespace zoneeval
