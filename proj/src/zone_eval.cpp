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
#include "zoneeval/zone_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "text_util.hpp"
#include "zoneeval/errors.hpp"

namespace zoneeval {

using nlohmann::json;
using detail::format_number;
using detail::optional_json;

struct ZoneEvaluator::Cell {
  std::uint32_t image = 0;
  std::uint32_t category = 0;
  std::vector<const GroundTruth*> gts;
  std::vector<const Detection*> dets;  // score order
  std::vector<std::uint32_t> det_ranks;
  std::vector<double> ious;  // dets x gts
  std::vector<std::uint32_t> gt_zone;
  std::vector<std::uint32_t> det_zone;
};

ZoneEvaluator::ZoneEvaluator(const Dataset& dataset, const DetectionSet& detections,
                             const Partition& partition, EvalConfig cfg)
    : partition_(partition), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (detections.num_images() != dataset.images().size()) {
    throw InputError("detections were not built against this dataset");
  }
  num_categories_ = dataset.categories().size();
  const auto gts = dataset.ground_truths();

  std::map<std::uint32_t, Cell> by_category;
  for (std::size_t img = 0; img < dataset.images().size(); ++img) {
    const ImageInfo& info = dataset.images()[img];
    by_category.clear();
    for (std::size_t gi : dataset.gts_of_image(img)) {
      const auto cat = static_cast<std::uint32_t>(*dataset.category_index(gts[gi].category_id));
      by_category[cat].gts.push_back(&gts[gi]);
    }
    const auto dets = detections.of_image(img);
    for (std::size_t d = 0; d < dets.size(); ++d) {
      const auto cat = static_cast<std::uint32_t>(*dataset.category_index(dets[d].category_id));
      Cell& cell = by_category[cat];
      if (!cfg_.cap_after_zone &&
          cell.dets.size() >= static_cast<std::size_t>(cfg_.max_dets)) {
        continue;
      }
      cell.dets.push_back(&dets[d]);
      cell.det_ranks.push_back(static_cast<std::uint32_t>(d));
    }
    for (auto& [cat, cell] : by_category) {
      cell.image = static_cast<std::uint32_t>(img);
      cell.category = cat;
      const std::size_t ng = cell.gts.size();
      cell.ious.resize(cell.dets.size() * ng);
      for (std::size_t d = 0; d < cell.dets.size(); ++d) {
        for (std::size_t g = 0; g < ng; ++g) {
          cell.ious[d * ng + g] = match_iou(*cell.dets[d], *cell.gts[g]);
        }
      }
      for (const auto* g : cell.gts) {
        cell.gt_zone.push_back(static_cast<std::uint32_t>(
            partition_.zone_of_clamped(bbox_center(g->bbox), info)));
      }
      for (const auto* d : cell.dets) {
        cell.det_zone.push_back(static_cast<std::uint32_t>(
            partition_.zone_of_clamped(bbox_center(d->bbox), info)));
      }
      cells_.push_back(std::move(cell));
    }
  }
}

ZoneEvaluator::~ZoneEvaluator() = default;

namespace {

struct ChunkResult {
  std::vector<MatchTable> zones;
  MatchTable full;
  std::vector<std::size_t> gt_counts;
  std::vector<std::size_t> det_counts;
};

}  // namespace

ZoneEvaluator::Outcome ZoneEvaluator::run(std::optional<ScaleRange> scale_range) const {
  EvalConfig cfg = cfg_;
  cfg.scale_range = scale_range;
  cfg.validate();
  const std::size_t num_t = cfg.iou_thresholds.size();
  const std::size_t num_z = partition_.size();
  const auto max_dets = static_cast<std::size_t>(cfg.max_dets);

  auto process = [&](std::size_t begin, std::size_t end, ChunkResult& out) {
    out.zones.assign(num_z, MatchTable(num_categories_, num_t));
    out.gt_counts.assign(num_z, 0);
    out.det_counts.assign(num_z, 0);
    MatchFragment fragment;
    std::vector<std::uint32_t> cols;
    std::vector<std::uint32_t> rows;
    std::vector<std::uint32_t> ranks;
    std::vector<std::uint32_t> present;
    for (std::size_t ci = begin; ci < end; ++ci) {
      const Cell& cell = cells_[ci];
      MatchInput in{cell.ious, cell.gts.size(), cell.gts, cell.dets, {}, {}, {}};

      // Whole image.
      cols.resize(cell.gts.size());
      for (std::uint32_t g = 0; g < cols.size(); ++g) cols[g] = g;
      rows.clear();
      ranks.clear();
      for (std::uint32_t d = 0; d < cell.dets.size() && rows.size() < max_dets; ++d) {
        rows.push_back(d);
        ranks.push_back(cell.det_ranks[d]);
      }
      in.gt_columns = cols;
      in.det_rows = rows;
      in.det_ranks = ranks;
      match_subset(in, cfg, fragment);
      out.full.add(cell.category, cell.image, fragment);

      present.assign(cell.gt_zone.begin(), cell.gt_zone.end());
      present.insert(present.end(), cell.det_zone.begin(), cell.det_zone.end());
      std::sort(present.begin(), present.end());
      present.erase(std::unique(present.begin(), present.end()), present.end());
      for (std::uint32_t z : present) {
        cols.clear();
        for (std::uint32_t g = 0; g < cell.gts.size(); ++g) {
          if (cell.gt_zone[g] == z) cols.push_back(g);
        }
        rows.clear();
        ranks.clear();
        for (std::uint32_t d = 0; d < cell.dets.size() && rows.size() < max_dets; ++d) {
          if (cell.det_zone[d] != z) continue;
          rows.push_back(d);
          ranks.push_back(cell.det_ranks[d]);
        }
        in.gt_columns = cols;
        in.det_rows = rows;
        in.det_ranks = ranks;
        match_subset(in, cfg, fragment);
        out.zones[z].add(cell.category, cell.image, fragment);
        out.gt_counts[z] += cols.size();
        out.det_counts[z] += rows.size();
      }
    }
  };

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(cfg.workers, cells_.size()));
  std::vector<ChunkResult> chunks;
  chunks.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    chunks.push_back({{}, MatchTable(num_categories_, num_t), {}, {}});
  }
  auto bounds = [&](std::size_t w) { return cells_.size() * w / workers; };
  if (workers == 1) {
    process(0, cells_.size(), chunks[0]);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back(process, bounds(w), bounds(w + 1), std::ref(chunks[w]));
    }
    for (auto& t : threads) t.join();
  }

  ChunkResult& merged = chunks[0];
  for (std::size_t w = 1; w < workers; ++w) {
    merged.full.merge(chunks[w].full);
    for (std::size_t z = 0; z < num_z; ++z) {
      merged.zones[z].merge(chunks[w].zones[z]);
      merged.gt_counts[z] += chunks[w].gt_counts[z];
      merged.det_counts[z] += chunks[w].det_counts[z];
    }
  }

  Outcome outcome;
  outcome.full = ap_from_matches(merged.full, cfg);
  for (std::size_t z = 0; z < num_z; ++z) {
    outcome.zones.push_back(ap_from_matches(merged.zones[z], cfg));
  }
  outcome.gt_counts = std::move(merged.gt_counts);
  outcome.det_counts = std::move(merged.det_counts);
  return outcome;
}

namespace {

std::optional<double> percent(const std::optional<double>& v) {
  if (!v) return std::nullopt;
  return *v * 100.0;
}

std::vector<std::optional<double>> percent(const std::vector<std::optional<double>>& v) {
  std::vector<std::optional<double>> out;
  for (const auto& x : v) out.push_back(percent(x));
  return out;
}

}  // namespace

ZoneReport evaluate_zones(const Dataset& dataset, const DetectionSet& detections,
                          const Partition& partition, const EvalConfig& cfg) {
  ZoneEvaluator evaluator(dataset, detections, partition, cfg);
  const auto outcome = evaluator.run(cfg.scale_range);
  if (!outcome.full.ap) {
    throw UndefinedError("AP is undefined: no category has a non-ignored ground truth");
  }
  ZoneReport report;
  report.partition = partition.spec().to_string();
  report.config = evaluator.config();
  report.full_ap = *outcome.full.ap * 100.0;
  report.full_ap_per_iou = percent(outcome.full.per_threshold);
  std::vector<double> defined;
  for (std::size_t z = 0; z < partition.size(); ++z) {
    ZoneResult zr;
    zr.id = partition.zone(z).id;
    zr.zp = percent(outcome.zones[z].ap);
    zr.zp_per_iou = percent(outcome.zones[z].per_threshold);
    zr.gt_count = outcome.gt_counts[z];
    zr.det_count = outcome.det_counts[z];
    zr.area_fraction = partition.zone(z).area_fraction();
    if (zr.zp) {
      defined.push_back(*zr.zp);
    } else {
      report.undefined_zones.push_back(zr.id);
    }
    report.zones.push_back(std::move(zr));
  }
  if (!defined.empty()) report.variance = zp_variance(defined);
  return report;
}

std::optional<double> full_image_ap(const Dataset& dataset, const DetectionSet& detections,
                                    const EvalConfig& cfg) {
  cfg.validate();
  const auto num_t = cfg.iou_thresholds.size();
  MatchTable table(dataset.categories().size(), num_t);
  const auto gts = dataset.ground_truths();
  for (std::size_t img = 0; img < dataset.images().size(); ++img) {
    std::map<std::size_t, std::pair<std::vector<GroundTruth>, std::vector<Detection>>> cells;
    for (std::size_t gi : dataset.gts_of_image(img)) {
      cells[*dataset.category_index(gts[gi].category_id)].first.push_back(gts[gi]);
    }
    std::map<std::size_t, std::vector<std::uint32_t>> ranks;
    const auto dets = detections.of_image(img);
    for (std::size_t d = 0; d < dets.size(); ++d) {
      const auto cat = *dataset.category_index(dets[d].category_id);
      auto& list = cells[cat].second;
      if (list.size() >= static_cast<std::size_t>(cfg.max_dets)) continue;
      list.push_back(dets[d]);
      ranks[cat].push_back(static_cast<std::uint32_t>(d));
    }
    for (auto& [cat, cell] : cells) {
      MatchFragment f = match_image(cell.first, cell.second, cfg);
      f.ranks = ranks[cat];
      table.add(cat, static_cast<std::uint32_t>(img), f);
    }
  }
  return percent(ap_from_matches(table, cfg).ap);
}

double zp_variance(std::span<const double> zps) {
  if (zps.empty()) throw InputError("variance of an empty ZP list");
  double mean = 0.0;
  for (double v : zps) mean += v;
  mean /= static_cast<double>(zps.size());
  double acc = 0.0;
  for (double v : zps) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(zps.size());
}

json to_json(const ZoneReport& report) {
  json zones = json::array();
  for (const auto& z : report.zones) {
    json per_iou = json::array();
    for (const auto& v : z.zp_per_iou) per_iou.push_back(optional_json(v));
    zones.push_back({{"id", z.id},
                     {"zp", optional_json(z.zp)},
                     {"zp_per_iou", std::move(per_iou)},
                     {"gt_count", z.gt_count},
                     {"det_count", z.det_count},
                     {"area_fraction", z.area_fraction}});
  }
  json full_per_iou = json::array();
  for (const auto& v : report.full_ap_per_iou) full_per_iou.push_back(optional_json(v));
  json meta = {{"partition", report.partition},
               {"iou_thresholds", report.config.iou_thresholds},
               {"recall_points", report.config.recall_points},
               {"max_dets", report.config.max_dets},
               {"cap_after_zone", report.config.cap_after_zone}};
  if (report.config.scale_range) {
    meta["scale_range"] = {report.config.scale_range->lo, report.config.scale_range->hi};
  }
  return {{"meta", std::move(meta)},
          {"zones", std::move(zones)},
          {"variance", optional_json(report.variance)},
          {"full_ap", report.full_ap},
          {"full_ap_per_iou", std::move(full_per_iou)},
          {"undefined_zones", report.undefined_zones}};
}

std::string to_csv(const ZoneReport& report) {
  std::ostringstream os;
  os << "zone,zp,gt_count,det_count,area_fraction";
  for (double t : report.config.iou_thresholds) os << ",zp@" << format_number(t);
  os << "\n";
  for (const auto& z : report.zones) {
    os << detail::csv_field(z.id) << "," << detail::format_optional(z.zp) << ","
       << z.gt_count << "," << z.det_count << "," << format_number(z.area_fraction);
    for (const auto& v : z.zp_per_iou) os << "," << detail::format_optional(v);
    os << "\n";
  }
  return os.str();
}

std::string format_table(const ZoneReport& report) {
  std::ostringstream head;
  std::ostringstream row;
  head << "AP\tVar.";
  row << detail::format_fixed1(report.full_ap) << "\t"
      << (report.variance ? detail::format_fixed1(*report.variance) : std::string("-"));
  for (const auto& z : report.zones) {
    head << "\tZP[" << z.id << "]";
    row << "\t" << (z.zp ? detail::format_fixed1(*z.zp) : std::string("-"));
  }
  return head.str() + "\n" + row.str() + "\n";
}

std::vector<ScaleRange> scale_bins(double r, double max_endpoint) {
  const double inf = std::numeric_limits<double>::infinity();
  if (std::isinf(r)) return {{0.0, inf}};
  if (!(r > 0.0)) throw InputError("scale bin width must be positive");
  std::vector<ScaleRange> bins;
  for (int k = 0;; ++k) {
    const double hi = (k + 1) * r;
    if (hi > max_endpoint) break;
    bins.push_back({(k * r) * (k * r), hi * hi});
  }
  bins.push_back({max_endpoint * max_endpoint, inf});
  return bins;
}

ScaleStudyReport scale_study(const Dataset& dataset, const DetectionSet& detections,
                             const Partition& partition, const EvalConfig& cfg) {
  ZoneEvaluator evaluator(dataset, detections, partition, cfg);
  const std::size_t num_z = partition.size();
  ScaleStudyReport report;
  report.partition = partition.spec().to_string();
  for (const auto& z : partition.zones()) report.zone_ids.push_back(z.id);

  const double inf = std::numeric_limits<double>::infinity();
  const std::pair<const char*, double> radii[] = {{"4", 4},   {"8", 8},     {"16", 16},
                                                  {"32", 32}, {"64", 64},   {"128", 128},
                                                  {"inf", inf}};
  std::vector<double> pooled_sum(num_z, 0.0);
  std::vector<std::size_t> pooled_n(num_z, 0);
  std::vector<double> grand_sum(num_z, 0.0);
  std::vector<std::size_t> grand_n(num_z, 0);
  for (const auto& [label, r] : radii) {
    ScaleStudyRow row;
    row.label = label;
    row.bins = scale_bins(r);
    row.zone_bin_zps.assign(num_z, {});
    for (const auto& bin : row.bins) {
      const auto range = std::isinf(r) ? std::optional<ScaleRange>() : std::optional(bin);
      const auto outcome = evaluator.run(range);
      for (std::size_t z = 0; z < num_z; ++z) {
        row.zone_bin_zps[z].push_back(percent(outcome.zones[z].ap));
      }
    }
    for (std::size_t z = 0; z < num_z; ++z) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& v : row.zone_bin_zps[z]) {
        if (!v) continue;
        sum += *v;
        ++n;
      }
      pooled_sum[z] += sum;
      pooled_n[z] += n;
      if (n == 0) {
        row.zone_means.push_back(std::nullopt);
      } else {
        row.zone_means.push_back(sum / static_cast<double>(n));
        grand_sum[z] += sum / static_cast<double>(n);
        ++grand_n[z];
      }
    }
    report.rows.push_back(std::move(row));
  }
  for (std::size_t z = 0; z < num_z; ++z) {
    report.grand_means.push_back(
        grand_n[z] ? std::optional(grand_sum[z] / static_cast<double>(grand_n[z]))
                   : std::nullopt);
    report.pooled_means.push_back(
        pooled_n[z] ? std::optional(pooled_sum[z] / static_cast<double>(pooled_n[z]))
                    : std::nullopt);
  }
  return report;
}

json to_json(const ScaleStudyReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    json bins = json::array();
    for (const auto& b : row.bins) {
      bins.push_back({b.lo, std::isinf(b.hi) ? json(nullptr) : json(b.hi)});
    }
    json zones = json::array();
    for (std::size_t z = 0; z < report.zone_ids.size(); ++z) {
      json zps = json::array();
      for (const auto& v : row.zone_bin_zps[z]) zps.push_back(optional_json(v));
      zones.push_back({{"id", report.zone_ids[z]},
                       {"bin_zps", std::move(zps)},
                       {"mean", optional_json(row.zone_means[z])}});
    }
    rows.push_back({{"r", row.label}, {"bins", std::move(bins)}, {"zones", std::move(zones)}});
  }
  json summary = json::array();
  for (std::size_t z = 0; z < report.zone_ids.size(); ++z) {
    summary.push_back({{"id", report.zone_ids[z]},
                       {"grand_mean", optional_json(report.grand_means[z])},
                       {"pooled_mean", optional_json(report.pooled_means[z])}});
  }
  return {{"partition", report.partition}, {"rows", std::move(rows)},
          {"summary", std::move(summary)}};
}

Heatmap heatmap_from_report(const ZoneReport& report, int rows, int cols) {
  if (report.zones.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw InputError("report does not match a " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " grid");
  }
  Heatmap h;
  h.rows = rows;
  h.cols = cols;
  h.iou_thresholds = report.config.iou_thresholds;
  h.per_threshold.assign(h.iou_thresholds.size(), {});
  for (const auto& z : report.zones) {
    h.mean_zp.push_back(z.zp);
    for (std::size_t t = 0; t < h.iou_thresholds.size(); ++t) {
      h.per_threshold[t].push_back(z.zp_per_iou[t]);
    }
  }
  return h;
}

Heatmap grid_heatmap(const Dataset& dataset, const DetectionSet& detections, int rows,
                     int cols, const EvalConfig& cfg) {
  const Partition grid(ZoneSpec::grid(rows, cols));
  ZoneEvaluator evaluator(dataset, detections, grid, cfg);
  const auto outcome = evaluator.run(cfg.scale_range);
  Heatmap h;
  h.rows = rows;
  h.cols = cols;
  h.iou_thresholds = evaluator.config().iou_thresholds;
  h.per_threshold.assign(h.iou_thresholds.size(), {});
  for (const auto& zone : outcome.zones) {
    h.mean_zp.push_back(percent(zone.ap));
    for (std::size_t t = 0; t < h.iou_thresholds.size(); ++t) {
      h.per_threshold[t].push_back(percent(zone.per_threshold[t]));
    }
  }
  return h;
}

namespace {

json matrix_json(const std::vector<std::optional<double>>& cells, int rows, int cols) {
  json m = json::array();
  for (int r = 0; r < rows; ++r) {
    json row = json::array();
    for (int c = 0; c < cols; ++c) row.push_back(optional_json(cells[r * cols + c]));
    m.push_back(std::move(row));
  }
  return m;
}

std::vector<std::optional<double>> matrix_from_json(const json& m, int rows, int cols) {
  if (!m.is_array() || m.size() != static_cast<std::size_t>(rows)) {
    throw InputError("heatmap: matrix row count mismatch");
  }
  std::vector<std::optional<double>> out;
  for (const auto& row : m) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) {
      throw InputError("heatmap: matrix column count mismatch");
    }
    for (const auto& v : row) {
      if (!v.is_null() && !v.is_number()) throw InputError("heatmap: cells must be numbers");
      out.push_back(detail::json_optional(v));
    }
  }
  return out;
}

}  // namespace

json to_json(const Heatmap& h) {
  json panels = json::array();
  for (std::size_t t = 0; t < h.iou_thresholds.size(); ++t) {
    panels.push_back(
        {{"iou", h.iou_thresholds[t]}, {"zp", matrix_json(h.per_threshold[t], h.rows, h.cols)}});
  }
  return {{"rows", h.rows},
          {"cols", h.cols},
          {"iou_thresholds", h.iou_thresholds},
          {"mean_zp", matrix_json(h.mean_zp, h.rows, h.cols)},
          {"per_threshold", std::move(panels)}};
}

Heatmap heatmap_from_json(const json& doc) {
  try {
    Heatmap h;
    h.rows = doc.at("rows").get<int>();
    h.cols = doc.at("cols").get<int>();
    if (h.rows < 1 || h.cols < 1) throw InputError("heatmap: rows and cols must be >= 1");
    h.iou_thresholds = doc.at("iou_thresholds").get<std::vector<double>>();
    h.mean_zp = matrix_from_json(doc.at("mean_zp"), h.rows, h.cols);
    const auto& panels = doc.at("per_threshold");
    if (!panels.is_array() || panels.size() != h.iou_thresholds.size()) {
      throw InputError("heatmap: one panel per IoU threshold expected");
    }
    for (const auto& p : panels) {
      h.per_threshold.push_back(matrix_from_json(p.at("zp"), h.rows, h.cols));
    }
    return h;
  } catch (const json::exception& e) {
    throw InputError(std::string("heatmap: ") + e.what());
  }
}

std::string heatmap_csv(const Heatmap& h, int panel) {
  if (panel >= static_cast<int>(h.per_threshold.size())) {
    throw InputError("heatmap panel out of range");
  }
  const auto& cells = panel < 0 ? h.mean_zp : h.per_threshold[panel];
  std::ostringstream os;
  for (int r = 0; r < h.rows; ++r) {
    for (int c = 0; c < h.cols; ++c) {
      if (c) os << ",";
      os << detail::format_optional(cells[r * h.cols + c]);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace zoneeval
