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
#include "zoneeval/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "zoneeval/errors.hpp"

namespace zoneeval {

std::vector<double> linspace(double start, double stop, int num) {
  std::vector<double> out;
  if (num <= 0) return out;
  out.resize(static_cast<std::size_t>(num));
  if (num == 1) {
    out[0] = start;
    return out;
  }
  const double step = (stop - start) / static_cast<double>(num - 1);
  for (int i = 0; i < num; ++i) out[i] = static_cast<double>(i) * step + start;
  out.back() = stop;
  return out;
}

std::vector<double> EvalConfig::default_iou_thresholds() {
  return linspace(0.5, 0.95, static_cast<int>(std::round((0.95 - 0.5) / 0.05)) + 1);
}

void EvalConfig::validate() const {
  if (iou_thresholds.empty()) throw InputError("at least one IoU threshold is required");
  for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
    const double t = iou_thresholds[i];
    if (!(t > 0.0 && t <= 1.0)) throw InputError("IoU thresholds must lie in (0, 1]");
    if (i > 0 && !(t > iou_thresholds[i - 1])) {
      throw InputError("IoU thresholds must be strictly increasing");
    }
  }
  if (recall_points < 2) throw InputError("recall_points must be >= 2");
  if (max_dets < 1) throw InputError("max_dets must be >= 1");
  if (workers < 1) throw InputError("workers must be >= 1");
  if (scale_range && !(scale_range->lo < scale_range->hi)) {
    throw InputError("scale range must satisfy lo < hi");
  }
}

std::vector<double> EvalConfig::recall_thresholds() const {
  return linspace(0.0, 1.0, recall_points);
}

std::vector<double> parse_iou_thresholds(std::string_view text) {
  auto number = [&](std::string_view s) {
    std::string tmp(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tmp, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tmp.size()) {
      throw InputError("invalid IoU threshold list '" + std::string(text) + "'");
    }
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string_view::npos) {
      throw InputError("IoU range must be lo:hi:step, got '" + std::string(text) + "'");
    }
    const double lo = number(text.substr(0, a));
    const double hi = number(text.substr(a + 1, b - a - 1));
    const double step = number(text.substr(b + 1));
    if (!(step > 0.0) || hi < lo) {
      throw InputError("IoU range must have lo <= hi and step > 0");
    }
    out = linspace(lo, hi, static_cast<int>(std::round((hi - lo) / step)) + 1);
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto end = comma == std::string_view::npos ? text.size() : comma;
      out.push_back(number(text.substr(start, end - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

double match_iou(const Detection& det, const GroundTruth& gt) {
  if (!gt.ignore) return iou(det.bbox, gt.bbox);
  // Crowd regions: overlap measured against the detection alone.
  const auto& a = det.bbox;
  const auto& b = gt.bbox;
  const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih / a.area();
}

void match_subset(const MatchInput& in, const EvalConfig& cfg, MatchFragment& out) {
  const std::size_t num_t = cfg.iou_thresholds.size();
  const std::size_t nd = in.det_rows.size();
  const std::size_t ng = in.gt_columns.size();

  // Ground truth order: non-ignored first, stable.
  std::vector<std::uint32_t> gt_order(in.gt_columns.begin(), in.gt_columns.end());
  std::vector<std::uint8_t> gt_ignored(in.gt_stride, 0);
  std::size_t positives = 0;
  for (auto col : gt_order) {
    const GroundTruth& gt = *in.gts[col];
    const bool ig = gt.ignore || (cfg.scale_range && !cfg.scale_range->contains(gt.area));
    gt_ignored[col] = ig ? 1 : 0;
    if (!ig) ++positives;
  }
  std::stable_partition(gt_order.begin(), gt_order.end(),
                        [&](std::uint32_t c) { return gt_ignored[c] == 0; });

  out.num_thresholds = num_t;
  out.num_positive_gts = positives;
  out.scores.resize(nd);
  out.ranks.resize(nd);
  out.flags.assign(nd * num_t, 0);
  for (std::size_t d = 0; d < nd; ++d) {
    out.scores[d] = in.dets[in.det_rows[d]]->score;
    out.ranks[d] = in.det_ranks[d];
  }

  std::vector<std::uint8_t> taken(in.gt_stride, 0);
  for (std::size_t t = 0; t < num_t; ++t) {
    std::fill(taken.begin(), taken.end(), 0);
    for (std::size_t d = 0; d < nd; ++d) {
      const std::uint32_t row = in.det_rows[d];
      const double* ious = in.ious.data() + static_cast<std::size_t>(row) * in.gt_stride;
      double best_iou = std::min(cfg.iou_thresholds[t], 1.0 - 1e-10);
      std::int64_t best = -1;
      for (std::size_t k = 0; k < ng; ++k) {
        const std::uint32_t g = gt_order[k];
        if (taken[g] && !in.gts[g]->ignore) continue;
        if (best > -1 && !gt_ignored[best] && gt_ignored[g]) break;
        if (ious[g] < best_iou) continue;
        best_iou = ious[g];
        best = g;
      }
      std::uint8_t flag = 0;
      if (best == -1) {
        const double area = in.dets[row]->bbox.area();
        if (cfg.scale_range && !cfg.scale_range->contains(area)) flag = kIgnored;
      } else {
        taken[best] = 1;
        flag = gt_ignored[best] ? kIgnored : kTruePositive;
      }
      out.flags[d * num_t + t] = flag;
    }
  }
}

MatchFragment match_image(std::span<const GroundTruth> gts,
                          std::span<const Detection> dets, const EvalConfig& cfg) {
  std::vector<const GroundTruth*> gp;
  std::vector<const Detection*> dp;
  for (const auto& g : gts) gp.push_back(&g);
  for (const auto& d : dets) dp.push_back(&d);
  std::vector<double> ious(dp.size() * gp.size());
  for (std::size_t d = 0; d < dp.size(); ++d) {
    for (std::size_t g = 0; g < gp.size(); ++g) {
      ious[d * gp.size() + g] = match_iou(*dp[d], *gp[g]);
    }
  }
  std::vector<std::uint32_t> cols(gp.size());
  std::iota(cols.begin(), cols.end(), 0u);
  std::vector<std::uint32_t> rows(dp.size());
  std::iota(rows.begin(), rows.end(), 0u);
  MatchFragment out;
  match_subset({ious, gp.size(), gp, dp, cols, rows, rows}, cfg, out);
  return out;
}

MatchTable::MatchTable(std::size_t num_categories, std::size_t num_thresholds)
    : num_thresholds_(num_thresholds), cats_(num_categories) {}

void MatchTable::add(std::size_t category, std::uint32_t image,
                     const MatchFragment& fragment) {
  auto& cat = cats_[category];
  cat.num_positive_gts += fragment.num_positive_gts;
  for (std::size_t d = 0; d < fragment.scores.size(); ++d) {
    cat.entries.push_back(
        {fragment.scores[d], (static_cast<std::uint64_t>(image) << 32) | fragment.ranks[d]});
  }
  cat.flags.insert(cat.flags.end(), fragment.flags.begin(), fragment.flags.end());
}

void MatchTable::merge(const MatchTable& other) {
  for (std::size_t c = 0; c < cats_.size(); ++c) {
    auto& dst = cats_[c];
    const auto& src = other.cats_[c];
    dst.num_positive_gts += src.num_positive_gts;
    dst.entries.insert(dst.entries.end(), src.entries.begin(), src.entries.end());
    dst.flags.insert(dst.flags.end(), src.flags.begin(), src.flags.end());
  }
}

ApResult ap_from_matches(const MatchTable& table, const EvalConfig& cfg) {
  const std::size_t num_t = table.num_thresholds();
  const std::vector<double> recall_thr = cfg.recall_thresholds();
  const std::size_t num_r = recall_thr.size();

  std::vector<double> sum_per_t(num_t, 0.0);
  std::size_t included = 0;
  std::vector<std::size_t> order;
  std::vector<double> recall;
  std::vector<double> precision;

  for (std::size_t c = 0; c < table.num_categories(); ++c) {
    const auto& cat = table.category(c);
    if (cat.num_positive_gts == 0) continue;
    ++included;
    order.resize(cat.entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& ea = cat.entries[a];
      const auto& eb = cat.entries[b];
      if (ea.score != eb.score) return ea.score > eb.score;
      return ea.order < eb.order;
    });
    const double npos = static_cast<double>(cat.num_positive_gts);
    for (std::size_t t = 0; t < num_t; ++t) {
      recall.clear();
      precision.clear();
      double tp = 0.0;
      double fp = 0.0;
      for (std::size_t e : order) {
        const std::uint8_t f = cat.flags[e * num_t + t];
        if (f & kIgnored) continue;
        if (f & kTruePositive) {
          tp += 1.0;
        } else {
          fp += 1.0;
        }
        recall.push_back(tp / npos);
        precision.push_back(tp / (tp + fp));
      }
      for (std::size_t i = precision.size(); i-- > 1;) {
        precision[i - 1] = std::max(precision[i - 1], precision[i]);
      }
      double q_sum = 0.0;
      for (std::size_t r = 0; r < num_r; ++r) {
        auto it = std::lower_bound(recall.begin(), recall.end(), recall_thr[r]);
        if (it == recall.end()) break;
        q_sum += precision[static_cast<std::size_t>(it - recall.begin())];
      }
      sum_per_t[t] += q_sum;
    }
  }

  ApResult result;
  result.per_threshold.assign(num_t, std::nullopt);
  if (included == 0) return result;
  const double denom_t = static_cast<double>(included * num_r);
  double total = 0.0;
  for (std::size_t t = 0; t < num_t; ++t) {
    result.per_threshold[t] = sum_per_t[t] / denom_t;
    total += sum_per_t[t];
  }
  result.ap = total / static_cast<double>(included * num_r * num_t);
  return result;
}

}  // namespace zoneeval
