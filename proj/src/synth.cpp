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
#include "zoneeval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "zoneeval/equilibrium.hpp"
#include "zoneeval/errors.hpp"
#include "zoneeval/matching.hpp"

namespace zoneeval {

using nlohmann::json;

SudokuLayout sudoku_layout(const SudokuConfig& cfg) {
  if (cfg.objects.empty()) throw InputError("sudoku layout: no objects");
  if (!(cfg.canvas > 0.0)) throw InputError("sudoku layout: canvas must be positive");
  if (!(cfg.object_size > 0.0 && cfg.object_size < cfg.canvas / 3.0)) {
    throw InputError("sudoku layout: object size must lie in (0, canvas/3)");
  }
  std::vector<Category> categories = cfg.categories;
  if (categories.empty()) {
    std::set<std::int64_t> ids;
    for (const auto& o : cfg.objects) ids.insert(o.category_id);
    for (auto id : ids) categories.push_back({id, "category_" + std::to_string(id)});
  }

  std::vector<ImageInfo> images;
  std::vector<GroundTruth> gts;
  SudokuLayout layout;
  const double half = cfg.object_size / 2.0;
  for (std::size_t j = 0; j < cfg.objects.size(); ++j) {
    const auto image_id = static_cast<std::int64_t>(j / 9) + 1;
    if (j % 9 == 0) {
      char name[32];
      std::snprintf(name, sizeof(name), "sudoku_%06lld.jpg", static_cast<long long>(image_id));
      images.push_back({image_id, cfg.canvas, cfg.canvas, name});
    }
    const int cell = static_cast<int>(j % 9);
    const int row = cell / 3;
    const int col = cell % 3;
    const double cx = (2 * col + 1) * cfg.canvas / 6.0;
    const double cy = (2 * row + 1) * cfg.canvas / 6.0;
    GroundTruth gt;
    gt.id = static_cast<std::int64_t>(j) + 1;
    gt.image_id = image_id;
    gt.category_id = cfg.objects[j].category_id;
    gt.bbox = {cx - half, cy - half, cfg.object_size, cfg.object_size};
    gt.area = gt.bbox.area();
    gts.push_back(gt);
    layout.manifest.push_back({gt.id, image_id, cfg.objects[j].source_id, row, col});
  }
  layout.dataset = Dataset(std::move(images), std::move(categories), std::move(gts));
  return layout;
}

SudokuConfig sudoku_config_from_json(const json& doc, double canvas, double object_size) {
  SudokuConfig cfg;
  cfg.canvas = canvas;
  cfg.object_size = object_size;
  try {
    const json* objects = &doc;
    if (doc.is_object()) {
      objects = &doc.at("objects");
      if (auto it = doc.find("categories"); it != doc.end()) {
        for (const auto& c : *it) {
          cfg.categories.push_back({c.at("id").get<std::int64_t>(),
                                    c.value("name", std::string())});
        }
      }
    }
    if (!objects->is_array()) throw InputError("sudoku objects must be a list");
    for (const auto& o : *objects) {
      cfg.objects.push_back(
          {o.at("id").get<std::int64_t>(), o.at("category_id").get<std::int64_t>()});
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("sudoku objects: ") + e.what());
  }
  return cfg;
}

json manifest_json(const SudokuLayout& layout) {
  json out = json::array();
  for (const auto& p : layout.manifest) {
    out.push_back({{"annotation_id", p.annotation_id},
                   {"image_id", p.image_id},
                   {"source_id", p.source_id},
                   {"cell", {p.row, p.col}}});
  }
  return out;
}

namespace {

// Portable draws on top of mt19937_64 (the std distributions are
// implementation-defined, which would break cross-platform reproducibility).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * n); }
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

void check_quality(const ZoneQuality& q) {
  if (!(q.recall >= 0.0 && q.recall <= 1.0)) {
    throw InputError("quality profile: recall must lie in [0, 1]");
  }
  if (!(q.fp_per_tp >= 0.0)) throw InputError("quality profile: fp_per_tp must be >= 0");
  if (!(q.loc_jitter >= 0.0)) throw InputError("quality profile: loc_jitter must be >= 0");
}

ZoneQuality lerp(const ZoneQuality& a, const ZoneQuality& b, double t) {
  return {a.recall + (b.recall - a.recall) * t, a.fp_per_tp + (b.fp_per_tp - a.fp_per_tp) * t,
          a.loc_jitter + (b.loc_jitter - a.loc_jitter) * t};
}

BBox clip_box(double x0, double y0, double x1, double y1, double width, double height) {
  x0 = std::clamp(x0, 0.0, width);
  x1 = std::clamp(x1, 0.0, width);
  y0 = std::clamp(y0, 0.0, height);
  y1 = std::clamp(y1, 0.0, height);
  return {x0, y0, x1 - x0, y1 - y0};
}

Point random_point_in_zone(Rng& rng, const Zone& zone, double width, double height) {
  double total = 0.0;
  for (const auto& r : zone.rects) total += r.area();
  double pick = rng.uniform() * total;
  const NormRect* chosen = &zone.rects.back();
  for (const auto& r : zone.rects) {
    if (pick < r.area()) {
      chosen = &r;
      break;
    }
    pick -= r.area();
  }
  return {rng.uniform(chosen->x0, chosen->x1) * width,
          rng.uniform(chosen->y0, chosen->y1) * height};
}

}  // namespace

SyntheticBenchmark synthetic_benchmark(const BenchConfig& cfg, const Partition& partition,
                                       int recall_points) {
  if (cfg.num_images < 1) throw InputError("benchmark: images must be >= 1");
  if (cfg.min_objects < 0 || cfg.max_objects < cfg.min_objects) {
    throw InputError("benchmark: objects_per_image must satisfy 0 <= min <= max");
  }
  if (!(cfg.min_size > 0.0) || cfg.max_size < cfg.min_size) {
    throw InputError("benchmark: object_size must satisfy 0 < min <= max");
  }
  if (!(cfg.width > 0.0 && cfg.height > 0.0)) {
    throw InputError("benchmark: image size must be positive");
  }
  if (cfg.num_categories < 1) throw InputError("benchmark: categories must be >= 1");
  if (!(cfg.center_bias >= 0.0)) throw InputError("benchmark: center_bias must be >= 0");
  if (recall_points < 2) throw InputError("benchmark: recall_points must be >= 2");
  const auto& profile = cfg.profile;
  check_quality(profile.fallback);
  for (const auto& [id, q] : profile.zones) {
    if (!partition.find(id)) {
      throw InputError("quality profile: zone '" + id + "' is not in the partition");
    }
    check_quality(q);
  }
  if (profile.gradient) {
    check_quality(profile.gradient->center);
    check_quality(profile.gradient->border);
  }

  Rng rng(profile.seed);
  std::vector<ImageInfo> images;
  std::vector<Category> categories;
  for (int c = 1; c <= cfg.num_categories; ++c) {
    categories.push_back({c, "class_" + std::to_string(c)});
  }
  std::vector<GroundTruth> gts;
  for (int i = 1; i <= cfg.num_images; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "synth_%06d.jpg", i);
    images.push_back({i, cfg.width, cfg.height, name});
    const int n = cfg.min_objects +
                  static_cast<int>(rng.below(static_cast<std::uint64_t>(
                      cfg.max_objects - cfg.min_objects + 1)));
    for (int k = 0; k < n; ++k) {
      GroundTruth gt;
      gt.id = static_cast<std::int64_t>(gts.size()) + 1;
      gt.image_id = i;
      gt.category_id = 1 + static_cast<std::int64_t>(
                               rng.below(static_cast<std::uint64_t>(cfg.num_categories)));
      const double w = rng.uniform(cfg.min_size, cfg.max_size);
      const double h = rng.uniform(cfg.min_size, cfg.max_size);
      double cx = 0.0;
      double cy = 0.0;
      for (;;) {
        cx = rng.uniform(0.0, cfg.width);
        cy = rng.uniform(0.0, cfg.height);
        const double accept =
            std::exp(-cfg.center_bias * spatial_weight(cx, cy, cfg.width, cfg.height));
        if (rng.uniform() < accept) break;
      }
      gt.bbox = clip_box(cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0, cfg.width,
                         cfg.height);
      gt.area = gt.bbox.area();
      gts.push_back(gt);
    }
  }

  const ImageInfo frame{0, cfg.width, cfg.height, {}};
  std::vector<std::size_t> zone(gts.size());
  std::vector<ZoneQuality> quality(gts.size());
  for (std::size_t g = 0; g < gts.size(); ++g) {
    const Point c = bbox_center(gts[g].bbox);
    zone[g] = partition.zone_of_clamped(c, frame);
    if (profile.gradient) {
      quality[g] = lerp(profile.gradient->center, profile.gradient->border,
                        spatial_weight(c.x, c.y, cfg.width, cfg.height));
    } else {
      auto it = profile.zones.find(partition.zone(zone[g]).id);
      quality[g] = it == profile.zones.end() ? profile.fallback : it->second;
    }
  }

  // Matched subset: exact per (zone, category) counts, or Bernoulli draws
  // under a gradient profile.
  std::vector<char> matched(gts.size(), 0);
  std::map<std::pair<std::size_t, std::int64_t>, std::vector<std::size_t>> groups;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (profile.gradient) {
      matched[g] = rng.uniform() < quality[g].recall ? 1 : 0;
    } else {
      groups[{zone[g], gts[g].category_id}].push_back(g);
    }
  }
  for (auto& [key, members] : groups) {
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.below(i)]);
    }
    const auto k = static_cast<std::size_t>(
        std::floor(quality[members.front()].recall * static_cast<double>(members.size()) + 0.5));
    for (std::size_t i = 0; i < k && i < members.size(); ++i) matched[members[i]] = 1;
  }

  const bool tp_first = profile.score_law == ScoreLaw::kTpFirst;
  // gts are generated image by image; [first, last) of each one's image.
  std::vector<std::size_t> first(gts.size());
  std::vector<std::size_t> last(gts.size());
  for (std::size_t b = 0; b < gts.size();) {
    std::size_t e = b;
    while (e < gts.size() && gts[e].image_id == gts[b].image_id) ++e;
    for (std::size_t g = b; g < e; ++g) {
      first[g] = b;
      last[g] = e;
    }
    b = e;
  }
  std::vector<Detection> dets;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!matched[g]) continue;
    const auto& gt = gts[g];
    const auto& q = quality[g];
    double dx = 0.0;
    double dy = 0.0;
    if (q.loc_jitter > 0.0) {
      dx = rng.normal() * q.loc_jitter;
      dy = rng.normal() * q.loc_jitter;
    }
    Detection det;
    det.image_id = gt.image_id;
    det.category_id = gt.category_id;
    det.bbox = gt.bbox;
    if (dx != 0.0 || dy != 0.0) {
      BBox moved = clip_box(gt.bbox.x + dx, gt.bbox.y + dy, gt.bbox.x + gt.bbox.w + dx,
                            gt.bbox.y + gt.bbox.h + dy, cfg.width, cfg.height);
      if (moved.valid()) det.bbox = moved;
    }
    det.score = tp_first ? rng.uniform(0.5, 1.0) : rng.uniform();
    dets.push_back(det);

    int fps = static_cast<int>(std::floor(q.fp_per_tp));
    if (rng.uniform() < q.fp_per_tp - std::floor(q.fp_per_tp)) ++fps;
    for (int f = 0; f < fps; ++f) {
      Detection fp;
      fp.image_id = gt.image_id;
      fp.category_id = gt.category_id;
      fp.score = tp_first ? rng.uniform(0.0, 0.5) : rng.uniform();
      bool placed = false;
      for (int attempt = 0; attempt < 20 && !placed; ++attempt) {
        const Point p = random_point_in_zone(rng, partition.zone(zone[g]), cfg.width,
                                             cfg.height);
        const double w = rng.uniform(cfg.min_size, cfg.max_size);
        const double h = rng.uniform(cfg.min_size, cfg.max_size);
        const BBox box =
            clip_box(p.x - w / 2, p.y - h / 2, p.x + w / 2, p.y + h / 2, cfg.width, cfg.height);
        if (!box.valid()) continue;
        bool clear = true;
        for (std::size_t o = first[g]; o < last[g]; ++o) {
          const auto& other = gts[o];
          if (other.category_id == gt.category_id && iou(box, other.bbox) >= 0.3) {
            clear = false;
            break;
          }
        }
        if (clear) {
          fp.bbox = box;
          placed = true;
        }
      }
      if (!placed) {
        const Point p = random_point_in_zone(rng, partition.zone(zone[g]), cfg.width,
                                             cfg.height);
        fp.bbox = clip_box(p.x - 2, p.y - 2, p.x + 2, p.y + 2, cfg.width, cfg.height);
        if (!fp.bbox.valid()) fp.bbox = {std::max(0.0, p.x - 4), std::max(0.0, p.y - 4), 2, 2};
      }
      dets.push_back(fp);
    }
  }

  SyntheticBenchmark bench;
  bench.dataset = Dataset(std::move(images), std::move(categories), std::move(gts));
  bench.detections = DetectionSet(bench.dataset, std::move(dets));

  bool closed_form = tp_first && !profile.gradient && profile.fallback.loc_jitter == 0.0;
  for (const auto& [id, q] : profile.zones) closed_form = closed_form && q.loc_jitter == 0.0;
  if (closed_form) {
    const auto recall_thr = linspace(0.0, 1.0, recall_points);
    std::map<std::size_t, std::pair<double, std::size_t>> per_zone;  // sum, categories
    for (const auto& [key, members] : groups) {
      std::size_t k = 0;
      for (auto g : members) k += matched[g] ? 1 : 0;
      double fraction = 0.0;
      if (k > 0) {
        const double rc = static_cast<double>(k) / static_cast<double>(members.size());
        const auto hits = std::count_if(recall_thr.begin(), recall_thr.end(),
                                        [&](double r) { return r <= rc; });
        fraction = static_cast<double>(hits) / static_cast<double>(recall_points);
      }
      auto& acc = per_zone[key.first];
      acc.first += fraction;
      acc.second += 1;
    }
    std::vector<ExpectedZone> expected;
    std::vector<double> defined;
    for (std::size_t z = 0; z < partition.size(); ++z) {
      ExpectedZone ez{partition.zone(z).id, std::nullopt};
      if (auto it = per_zone.find(z); it != per_zone.end()) {
        ez.zp = 100.0 * it->second.first / static_cast<double>(it->second.second);
        defined.push_back(*ez.zp);
      }
      expected.push_back(ez);
    }
    bench.expected = std::move(expected);
    if (!defined.empty()) {
      double mean = 0.0;
      for (double v : defined) mean += v;
      mean /= static_cast<double>(defined.size());
      double var = 0.0;
      for (double v : defined) var += (v - mean) * (v - mean);
      bench.expected_variance = var / static_cast<double>(defined.size());
    }
  }
  return bench;
}

namespace {

ZoneQuality quality_from_json(const json& j, const ZoneQuality& base) {
  ZoneQuality q = base;
  q.recall = j.value("recall", q.recall);
  q.fp_per_tp = j.value("fp_per_tp", q.fp_per_tp);
  q.loc_jitter = j.value("loc_jitter", q.loc_jitter);
  return q;
}

}  // namespace

QualityProfile profile_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("quality profile must be a JSON object");
  try {
    QualityProfile p;
    if (auto it = doc.find("default"); it != doc.end()) {
      p.fallback = quality_from_json(*it, p.fallback);
    }
    if (auto it = doc.find("zones"); it != doc.end()) {
      for (const auto& [id, q] : it->items()) p.zones[id] = quality_from_json(q, p.fallback);
    }
    if (auto it = doc.find("gradient"); it != doc.end()) {
      p.gradient = QualityProfile::Gradient{quality_from_json(it->at("center"), p.fallback),
                                            quality_from_json(it->at("border"), p.fallback)};
    }
    const std::string law = doc.value("score_law", std::string("tp_first"));
    if (law == "tp_first") {
      p.score_law = ScoreLaw::kTpFirst;
    } else if (law == "uniform") {
      p.score_law = ScoreLaw::kUniform;
    } else {
      throw InputError("quality profile: unknown score_law '" + law + "'");
    }
    p.seed = doc.value("seed", std::uint64_t{0});
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("quality profile: ") + e.what());
  }
}

BenchConfig bench_config_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("benchmark config must be a JSON object");
  try {
    BenchConfig c;
    c.num_images = doc.value("images", c.num_images);
    c.width = doc.value("width", c.width);
    c.height = doc.value("height", c.height);
    if (auto it = doc.find("objects_per_image"); it != doc.end()) {
      c.min_objects = it->at(0).get<int>();
      c.max_objects = it->at(1).get<int>();
    }
    if (auto it = doc.find("object_size"); it != doc.end()) {
      c.min_size = it->at(0).get<double>();
      c.max_size = it->at(1).get<double>();
    }
    c.num_categories = doc.value("categories", c.num_categories);
    c.center_bias = doc.value("center_bias", c.center_bias);
    if (auto it = doc.find("profile"); it != doc.end()) c.profile = profile_from_json(*it);
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("benchmark config: ") + e.what());
  }
}

json expected_json(const SyntheticBenchmark& bench) {
  if (!bench.expected) return {{"closed_form", false}};
  json zones = json::array();
  for (const auto& z : *bench.expected) {
    zones.push_back({{"id", z.id}, {"zp", z.zp ? json(*z.zp) : json(nullptr)}});
  }
  return {{"closed_form", true},
          {"zones", std::move(zones)},
          {"variance", bench.expected_variance ? json(*bench.expected_variance) : json(nullptr)}};
}

}  // namespace zoneeval
