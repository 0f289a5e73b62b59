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
#include "zoneeval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "text_util.hpp"
#include "zoneeval/errors.hpp"
#include "zoneeval/zone_partition.hpp"

namespace zoneeval {

namespace {

bool constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("pearson: inputs differ in length");
  if (x.size() < 2) throw InputError("pearson: need at least two observations");
  if (constant(x) || constant(y)) return std::nullopt;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    // positions i..j (0-based) share rank mean(i+1 .. j+1)
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("spearman: inputs differ in length");
  if (x.size() < 2) throw InputError("spearman: need at least two observations");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

CountMatrix center_counts(const Dataset& dataset, int rows, int cols) {
  const Partition grid(ZoneSpec::grid(rows, cols));
  CountMatrix m{rows, cols, std::vector<std::size_t>(grid.size(), 0)};
  for (std::size_t img = 0; img < dataset.images().size(); ++img) {
    const auto& info = dataset.images()[img];
    for (std::size_t gi : dataset.gts_of_image(img)) {
      ++m.counts[grid.zone_of_clamped(bbox_center(dataset.ground_truths()[gi].bbox), info)];
    }
  }
  return m;
}

std::string to_csv(const CountMatrix& counts) {
  std::ostringstream os;
  for (int r = 0; r < counts.rows; ++r) {
    for (int c = 0; c < counts.cols; ++c) {
      if (c) os << ",";
      os << counts.at(r, c);
    }
    os << "\n";
  }
  return os.str();
}

CorrelationCurve correlate_zp_distribution(const Heatmap& heatmap,
                                           const CountMatrix& counts) {
  if (heatmap.rows != counts.rows || heatmap.cols != counts.cols) {
    throw InputError("correlate: heatmap is " + std::to_string(heatmap.rows) + "x" +
                     std::to_string(heatmap.cols) + " but counts are " +
                     std::to_string(counts.rows) + "x" + std::to_string(counts.cols));
  }
  CorrelationCurve curve;
  curve.iou_thresholds = heatmap.iou_thresholds;
  std::vector<double> zp;
  std::vector<double> cnt;
  for (std::size_t t = 0; t < heatmap.per_threshold.size(); ++t) {
    zp.clear();
    cnt.clear();
    const auto& cells = heatmap.per_threshold[t];
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!cells[i]) continue;
      zp.push_back(*cells[i]);
      cnt.push_back(static_cast<double>(counts.counts[i]));
    }
    if (zp.size() < 2) {
      throw InputError("correlate: fewer than two defined cells at IoU " +
                       detail::format_number(heatmap.iou_thresholds[t]));
    }
    curve.pcc.push_back(pearson(zp, cnt));
    curve.scc.push_back(spearman(zp, cnt));
  }
  return curve;
}

std::string to_csv(const CorrelationCurve& curve) {
  std::ostringstream os;
  os << "iou,pcc,scc\n";
  for (std::size_t t = 0; t < curve.iou_thresholds.size(); ++t) {
    os << detail::format_number(curve.iou_thresholds[t]) << ","
       << detail::format_optional(curve.pcc[t]) << ","
       << detail::format_optional(curve.scc[t]) << "\n";
  }
  return os.str();
}

namespace {

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  throw InputError("feature split must be 'train' or 'test', got '" + s + "'");
}

ZoneTag parse_tag(const std::string& s) {
  if (s == "in") return ZoneTag::kIn;
  if (s == "out") return ZoneTag::kOut;
  throw InputError("feature zone_tag must be 'in' or 'out', got '" + s + "'");
}

}  // namespace

std::vector<FeatureRecord> parse_feature_lines(std::istream& in) {
  std::vector<FeatureRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "features line " + std::to_string(lineno);
    try {
      const auto j = nlohmann::json::parse(line);
      FeatureRecord r;
      r.split = parse_split(j.at("split").get<std::string>());
      r.zone_tag = parse_tag(j.at("zone_tag").get<std::string>());
      r.category = j.at("category_id").get<std::int64_t>();
      r.scale = j.at("area").get<double>();
      r.vector = j.at("vector").get<std::vector<double>>();
      if (!(r.scale > 0.0)) throw InputError("area must be positive");
      if (r.vector.empty()) throw InputError("vector must be non-empty");
      if (!out.empty() && out.front().vector.size() != r.vector.size()) {
        throw InputError("all vectors must share one length");
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  return out;
}

std::vector<FeatureRecord> load_features(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_feature_lines(in);
}

FeatureGroup parse_feature_group(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InputError("feature group must be split:tag, e.g. train:in");
  }
  return {parse_split(text.substr(0, colon)), parse_tag(text.substr(colon + 1))};
}

double pattern_distance(std::span<const FeatureRecord> records, const FeatureGroup& a,
                        const FeatureGroup& b, int num_bins, double bin_width) {
  if (num_bins < 1) throw InputError("pattern_distance: K must be >= 1");
  if (!(bin_width > 0.0)) throw InputError("pattern_distance: r must be positive");
  if (records.empty()) throw InputError("pattern_distance: no records");
  const std::size_t dims = records.front().vector.size();

  auto bin_of = [&](double area) {
    for (int k = 1; k < num_bins; ++k) {
      const double hi = k * bin_width;
      if (area < hi * hi) return k - 1;
    }
    return num_bins - 1;
  };

  struct Center {
    std::vector<double> sum;
    std::size_t n = 0;
  };
  using Key = std::pair<int, std::int64_t>;
  std::map<Key, Center> side[2];
  std::size_t side_count[2] = {0, 0};
  for (const auto& r : records) {
    if (r.vector.size() != dims) {
      throw InputError("pattern_distance: vectors differ in length");
    }
    for (int s = 0; s < 2; ++s) {
      const FeatureGroup& g = s == 0 ? a : b;
      if (r.split != g.split || r.zone_tag != g.zone_tag) continue;
      auto& c = side[s][{bin_of(r.scale), r.category}];
      if (c.sum.empty()) c.sum.assign(dims, 0.0);
      for (std::size_t m = 0; m < dims; ++m) c.sum[m] += r.vector[m];
      ++c.n;
      ++side_count[s];
    }
  }
  if (side_count[0] == 0 || side_count[1] == 0) {
    throw InputError("pattern_distance: both groups need at least one record");
  }

  double total = 0.0;
  std::size_t terms = 0;
  for (const auto& [key, ca] : side[0]) {
    auto it = side[1].find(key);
    if (it == side[1].end()) continue;
    const auto& cb = it->second;
    for (std::size_t m = 0; m < dims; ++m) {
      total += std::abs(ca.sum[m] / static_cast<double>(ca.n) -
                        cb.sum[m] / static_cast<double>(cb.n));
    }
    terms += dims;
  }
  if (terms == 0) {
    throw InputError("pattern_distance: no (scale bin, category) populated on both sides");
  }
  return total / static_cast<double>(terms);
}

}  // namespace zoneeval
