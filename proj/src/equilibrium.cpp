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
#include "zoneeval/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "text_util.hpp"
#include "zoneeval/errors.hpp"

namespace zoneeval {

double spatial_weight(double x, double y, double width, double height) {
  if (!(width > 0.0 && height > 0.0)) {
    throw InputError("spatial_weight: image size must be positive");
  }
  if (!(x >= 0.0 && x <= width && y >= 0.0 && y <= height)) {
    throw InputError("spatial_weight: point lies outside the image");
  }
  const double dx = std::abs(x - width / 2.0) / width;
  const double dy = std::abs(y - height / 2.0) / height;
  return 2.0 * std::max(dx, dy);
}

double se_loss_weight(double x, double y, double width, double height, double gamma) {
  if (!(gamma >= 0.0)) throw InputError("se_loss_weight: gamma must be >= 0");
  return 1.0 + gamma * spatial_weight(x, y, width, height);
}

std::vector<Anchor> anchor_grid(const ImageInfo& image, int rows, int cols,
                                std::span<const double> scales) {
  if (rows < 1 || cols < 1) throw InputError("anchor grid needs rows, cols >= 1");
  if (scales.empty()) throw InputError("anchor grid needs at least one scale");
  const double cw = image.width / cols;
  const double ch = image.height / rows;
  std::vector<Anchor> anchors;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Point center{(c + 0.5) * cw, (r + 0.5) * ch};
      for (double s : scales) {
        if (!(s > 0.0)) throw InputError("anchor scales must be positive");
        const double w = s * cw;
        const double h = s * ch;
        anchors.push_back({center, {center.x - w / 2.0, center.y - h / 2.0, w, h}});
      }
    }
  }
  return anchors;
}

std::vector<std::size_t> Assignment::positive_anchors() const {
  std::vector<std::size_t> out;
  for (const auto& set : positives) out.insert(out.end(), set.begin(), set.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

void check_center(const Anchor& a, const ImageInfo& image) {
  if (!(a.center.x >= 0.0 && a.center.x <= image.width && a.center.y >= 0.0 &&
        a.center.y <= image.height)) {
    throw InputError("anchor center lies outside the image");
  }
}

template <typename Threshold>
Assignment threshold_assign(std::span<const Anchor> anchors,
                            std::span<const GroundTruth> gts, Threshold threshold) {
  Assignment out;
  out.positives.resize(gts.size());
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const double thr = threshold(anchors[a]);
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (iou(anchors[a].box, gts[g].bbox) >= thr) out.positives[g].push_back(a);
    }
  }
  return out;
}

}  // namespace

Assignment sela_assign(std::span<const Anchor> anchors, std::span<const GroundTruth> gts,
                       const ImageInfo& image, const SelaRule& rule) {
  if (!(rule.gamma >= 0.0)) throw InputError("SELA: gamma must be >= 0");
  if (!(rule.t > 0.0 && rule.t <= 1.0)) throw InputError("SELA: t must lie in (0, 1]");
  if (rule.t - rule.gamma < 0.0) throw InputError("SELA: t - gamma must be >= 0");
  for (const auto& a : anchors) check_center(a, image);
  return threshold_assign(anchors, gts, [&](const Anchor& a) {
    return rule.t -
           rule.gamma * spatial_weight(a.center.x, a.center.y, image.width, image.height);
  });
}

Assignment beta_assign(std::span<const Anchor> anchors, std::span<const GroundTruth> gts,
                       double alpha_pos, double beta, const Zone& zone,
                       const ImageInfo& image) {
  for (const auto& a : anchors) check_center(a, image);
  constexpr double kInside = 0x1.fffffffffffffp-1;
  Assignment out = threshold_assign(anchors, gts, [&](const Anchor& a) {
    const double x = std::min(a.center.x / image.width, kInside);
    const double y = std::min(a.center.y / image.height, kInside);
    return alpha_pos + (zone.contains(x, y) ? beta : 0.0);
  });
  out.in_zone_impossible = alpha_pos + beta > 1.0;
  return out;
}

namespace {

double zone_area(const Zone& zone, bool absolute_area, double image_area) {
  const double fraction = zone.area_fraction();
  return absolute_area ? fraction * image_area : fraction;
}

void fill_densities(DensityReport& report) {
  for (auto& z : report.zones) {
    z.density = z.area > 0.0 ? static_cast<double>(z.count) / z.area : 0.0;
  }
}

DensityReport empty_report(const Partition& partition, bool absolute_area,
                           double image_area) {
  DensityReport report;
  report.partition = partition.spec().to_string();
  report.absolute_area = absolute_area;
  for (const auto& z : partition.zones()) {
    report.zones.push_back({z.id, 0, zone_area(z, absolute_area, image_area), 0.0});
  }
  return report;
}

double common_image_area(const Dataset& dataset) {
  const auto images = dataset.images();
  if (images.empty()) throw InputError("absolute areas need at least one image");
  for (const auto& img : images) {
    if (img.width != images[0].width || img.height != images[0].height) {
      throw InputError("absolute areas need all images to share one size");
    }
  }
  return images[0].width * images[0].height;
}

}  // namespace

DensityReport object_density(const Dataset& dataset, const Partition& partition,
                             bool absolute_area) {
  const double image_area = absolute_area ? common_image_area(dataset) : 1.0;
  DensityReport report = empty_report(partition, absolute_area, image_area);
  for (std::size_t img = 0; img < dataset.images().size(); ++img) {
    const auto& info = dataset.images()[img];
    for (std::size_t gi : dataset.gts_of_image(img)) {
      const auto& gt = dataset.ground_truths()[gi];
      ++report.zones[partition.zone_of_clamped(bbox_center(gt.bbox), info)].count;
    }
  }
  fill_densities(report);
  return report;
}

DensityReport supervision_density(const Assignment& assignment,
                                  std::span<const Anchor> anchors,
                                  const Partition& partition, const ImageInfo& image,
                                  bool absolute_area) {
  DensityReport report =
      empty_report(partition, absolute_area, image.width * image.height);
  for (std::size_t a : assignment.positive_anchors()) {
    ++report.zones[partition.zone_of_clamped(anchors[a].center, image)].count;
  }
  report.in_zone_impossible = assignment.in_zone_impossible;
  fill_densities(report);
  return report;
}

DensityReport assignment_density(const Dataset& dataset, const Partition& partition,
                                 const AnchorGridSpec& grid, const AssignConfig& cfg,
                                 bool absolute_area) {
  const double image_area = absolute_area ? common_image_area(dataset) : 1.0;
  DensityReport total = empty_report(partition, absolute_area, image_area);
  const Zone* beta_zone = nullptr;
  if (cfg.beta) {
    auto idx = partition.find(cfg.beta->zone);
    if (!idx) throw InputError("unknown beta zone '" + cfg.beta->zone + "'");
    beta_zone = &partition.zone(*idx);
  }
  std::vector<GroundTruth> gts;
  for (std::size_t img = 0; img < dataset.images().size(); ++img) {
    const auto& info = dataset.images()[img];
    gts.clear();
    for (std::size_t gi : dataset.gts_of_image(img)) {
      if (!dataset.ground_truths()[gi].ignore) gts.push_back(dataset.ground_truths()[gi]);
    }
    const auto anchors = anchor_grid(info, grid.rows, grid.cols, grid.scales);
    const Assignment assignment =
        beta_zone ? beta_assign(anchors, gts, cfg.beta->alpha_pos, cfg.beta->beta,
                                *beta_zone, info)
                  : sela_assign(anchors, gts, info, cfg.sela);
    const auto per_image = supervision_density(assignment, anchors, partition, info);
    for (std::size_t z = 0; z < total.zones.size(); ++z) {
      total.zones[z].count += per_image.zones[z].count;
    }
    total.in_zone_impossible = total.in_zone_impossible || assignment.in_zone_impossible;
  }
  fill_densities(total);
  return total;
}

nlohmann::json to_json(const DensityReport& report) {
  nlohmann::json zones = nlohmann::json::array();
  for (const auto& z : report.zones) {
    zones.push_back(
        {{"id", z.id}, {"count", z.count}, {"area", z.area}, {"density", z.density}});
  }
  nlohmann::json out = {{"partition", report.partition},
                        {"absolute_area", report.absolute_area},
                        {"zones", std::move(zones)}};
  if (report.in_zone_impossible) out["warning"] = "alpha_pos + beta > 1: no in-zone positives";
  return out;
}

std::string to_csv(const DensityReport& report) {
  std::ostringstream os;
  os << "zone,count,area,density\n";
  for (const auto& z : report.zones) {
    os << detail::csv_field(z.id) << "," << z.count << "," << detail::format_number(z.area)
       << "," << detail::format_number(z.density) << "\n";
  }
  return os.str();
}

}  // namespace zoneeval
