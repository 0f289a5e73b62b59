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
#include "zoneeval/coco_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "zoneeval/errors.hpp"

namespace zoneeval {

using nlohmann::json;

namespace {

std::string describe(const char* what, std::size_t index) {
  std::ostringstream os;
  os << what << "[" << index << "]";
  return os.str();
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw InputError(where + ": missing field '" + key + "'");
  }
  return *it;
}

double as_number(const json& v, const std::string& where, const char* key) {
  if (!v.is_number()) {
    throw InputError(where + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

std::int64_t as_id(const json& v, const std::string& where, const char* key) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::floor(d) == d && std::isfinite(d)) return static_cast<std::int64_t>(d);
  }
  throw InputError(where + ": field '" + key + "' must be an integer id");
}

BBox parse_bbox(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) {
    throw InputError(where + ": bbox must be [x, y, w, h]");
  }
  BBox b{as_number(v[0], where, "bbox"), as_number(v[1], where, "bbox"),
         as_number(v[2], where, "bbox"), as_number(v[3], where, "bbox")};
  if (!b.valid()) {
    throw InputError(where + ": bbox must have finite coordinates and w > 0, h > 0");
  }
  return b;
}

}  // namespace

bool BBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
         std::isfinite(h) && w > 0.0 && h > 0.0;
}

Point bbox_center(const BBox& b) { return {b.x + b.w / 2.0, b.y + b.h / 2.0}; }

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

Dataset::Dataset(std::vector<ImageInfo> images, std::vector<Category> categories,
                 std::vector<GroundTruth> ground_truths)
    : images_(std::move(images)),
      categories_(std::move(categories)),
      gts_(std::move(ground_truths)) {
  std::stable_sort(images_.begin(), images_.end(),
                   [](const auto& a, const auto& b) { return a.id < b.id; });
  std::stable_sort(categories_.begin(), categories_.end(),
                   [](const auto& a, const auto& b) { return a.id < b.id; });
  std::stable_sort(gts_.begin(), gts_.end(),
                   [](const auto& a, const auto& b) { return a.id < b.id; });

  for (std::size_t i = 0; i < images_.size(); ++i) {
    const auto& img = images_[i];
    if (!(img.width > 0.0) || !(img.height > 0.0) || !std::isfinite(img.width) ||
        !std::isfinite(img.height)) {
      throw InputError("image " + std::to_string(img.id) +
                       ": width and height must be positive");
    }
    if (!image_lookup_.emplace(img.id, i).second) {
      throw InputError("duplicate image id " + std::to_string(img.id));
    }
  }
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (!category_lookup_.emplace(categories_[i].id, i).second) {
      throw InputError("duplicate category id " + std::to_string(categories_[i].id));
    }
  }

  by_image_.resize(images_.size());
  by_category_.resize(categories_.size());
  for (std::size_t i = 0; i < gts_.size(); ++i) {
    const auto& gt = gts_[i];
    const std::string where = "annotation " + std::to_string(gt.id);
    if (i > 0 && gts_[i - 1].id == gt.id) {
      throw InputError("duplicate annotation id " + std::to_string(gt.id));
    }
    auto img = image_lookup_.find(gt.image_id);
    if (img == image_lookup_.end()) {
      throw InputError(where + ": unknown image_id " + std::to_string(gt.image_id));
    }
    auto cat = category_lookup_.find(gt.category_id);
    if (cat == category_lookup_.end()) {
      throw InputError(where + ": unknown category_id " +
                       std::to_string(gt.category_id));
    }
    if (!gt.bbox.valid()) {
      throw InputError(where + ": bbox must have finite coordinates and w > 0, h > 0");
    }
    if (!(gt.area > 0.0) || !std::isfinite(gt.area)) {
      throw InputError(where + ": area must be positive");
    }
    by_image_[img->second].push_back(i);
    by_category_[cat->second].push_back(i);
  }
}

std::optional<std::size_t> Dataset::image_index(std::int64_t image_id) const {
  auto it = image_lookup_.find(image_id);
  if (it == image_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Dataset::category_index(std::int64_t category_id) const {
  auto it = category_lookup_.find(category_id);
  if (it == category_lookup_.end()) return std::nullopt;
  return it->second;
}

DetectionSet::DetectionSet(const Dataset& dataset, std::vector<Detection> detections)
    : per_image_(dataset.images().size()), total_(detections.size()) {
  for (std::size_t i = 0; i < detections.size(); ++i) {
    auto& det = detections[i];
    const std::string where = describe("detection", i);
    auto img = dataset.image_index(det.image_id);
    if (!img) {
      throw InputError(where + ": unknown image_id " + std::to_string(det.image_id));
    }
    if (!dataset.category_index(det.category_id)) {
      throw InputError(where + ": unknown category_id " +
                       std::to_string(det.category_id));
    }
    if (!std::isfinite(det.score)) {
      throw InputError(where + ": score must be finite");
    }
    if (!det.bbox.valid()) {
      throw InputError(where + ": bbox must have finite coordinates and w > 0, h > 0");
    }
    per_image_[*img].push_back(det);
  }
  for (auto& list : per_image_) {
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.score > b.score; });
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": malformed JSON: " + e.what());
  }
}

Dataset parse_ground_truth(const json& doc) {
  if (!doc.is_object()) throw InputError("annotation file: expected a JSON object");

  std::vector<ImageInfo> images;
  const auto& jimages = require(doc, "images", "annotation file");
  if (!jimages.is_array()) throw InputError("annotation file: 'images' must be a list");
  for (std::size_t i = 0; i < jimages.size(); ++i) {
    const auto& j = jimages[i];
    const std::string where = describe("images", i);
    ImageInfo img;
    img.id = as_id(require(j, "id", where), where, "id");
    img.width = as_number(require(j, "width", where), where, "width");
    img.height = as_number(require(j, "height", where), where, "height");
    if (auto it = j.find("file_name"); it != j.end() && it->is_string()) {
      img.file_name = it->get<std::string>();
    }
    images.push_back(std::move(img));
  }

  std::vector<Category> categories;
  const auto& jcats = require(doc, "categories", "annotation file");
  if (!jcats.is_array()) {
    throw InputError("annotation file: 'categories' must be a list");
  }
  for (std::size_t i = 0; i < jcats.size(); ++i) {
    const auto& j = jcats[i];
    const std::string where = describe("categories", i);
    Category cat;
    cat.id = as_id(require(j, "id", where), where, "id");
    if (auto it = j.find("name"); it != j.end() && it->is_string()) {
      cat.name = it->get<std::string>();
    }
    categories.push_back(std::move(cat));
  }

  std::vector<GroundTruth> gts;
  const auto& janns = require(doc, "annotations", "annotation file");
  if (!janns.is_array()) {
    throw InputError("annotation file: 'annotations' must be a list");
  }
  for (std::size_t i = 0; i < janns.size(); ++i) {
    const auto& j = janns[i];
    std::string where = describe("annotations", i);
    GroundTruth gt;
    gt.id = as_id(require(j, "id", where), where, "id");
    where = "annotation " + std::to_string(gt.id);
    gt.image_id = as_id(require(j, "image_id", where), where, "image_id");
    gt.category_id = as_id(require(j, "category_id", where), where, "category_id");
    gt.bbox = parse_bbox(require(j, "bbox", where), where);
    if (auto it = j.find("area"); it != j.end() && !it->is_null()) {
      gt.area = as_number(*it, where, "area");
    } else {
      gt.area = gt.bbox.area();
    }
    if (auto it = j.find("iscrowd"); it != j.end() && !it->is_null()) {
      gt.ignore = it->is_boolean() ? it->get<bool>()
                                   : as_number(*it, where, "iscrowd") != 0.0;
    }
    if (auto it = j.find("ignore"); it != j.end() && !it->is_null()) {
      gt.ignore = gt.ignore || (it->is_boolean() ? it->get<bool>()
                                                 : as_number(*it, where, "ignore") != 0.0);
    }
    gts.push_back(gt);
  }
  return Dataset(std::move(images), std::move(categories), std::move(gts));
}

Dataset load_ground_truth(const std::filesystem::path& path) {
  try {
    return parse_ground_truth(read_json_file(path));
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw InputError(path.string() + ": " + msg);
  }
}

json to_json(const Dataset& dataset) {
  json images = json::array();
  for (const auto& img : dataset.images()) {
    images.push_back({{"id", img.id},
                      {"width", img.width},
                      {"height", img.height},
                      {"file_name", img.file_name}});
  }
  json anns = json::array();
  for (const auto& gt : dataset.ground_truths()) {
    anns.push_back({{"id", gt.id},
                    {"image_id", gt.image_id},
                    {"category_id", gt.category_id},
                    {"bbox", {gt.bbox.x, gt.bbox.y, gt.bbox.w, gt.bbox.h}},
                    {"area", gt.area},
                    {"iscrowd", gt.ignore ? 1 : 0}});
  }
  json cats = json::array();
  for (const auto& c : dataset.categories()) {
    cats.push_back({{"id", c.id}, {"name", c.name}});
  }
  return {{"images", std::move(images)},
          {"annotations", std::move(anns)},
          {"categories", std::move(cats)}};
}

DetectionSet parse_detections(const json& doc, const Dataset& dataset) {
  if (!doc.is_array()) throw InputError("results file: expected a JSON list");
  std::vector<Detection> dets;
  dets.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& j = doc[i];
    const std::string where = describe("detection", i);
    Detection d;
    d.image_id = as_id(require(j, "image_id", where), where, "image_id");
    d.category_id = as_id(require(j, "category_id", where), where, "category_id");
    d.bbox = parse_bbox(require(j, "bbox", where), where);
    const auto& s = require(j, "score", where);
    d.score = as_number(s, where, "score");
    dets.push_back(d);
  }
  return DetectionSet(dataset, std::move(dets));
}

DetectionSet load_detections(const std::filesystem::path& path, const Dataset& dataset) {
  try {
    return parse_detections(read_json_file(path), dataset);
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw InputError(path.string() + ": " + msg);
  }
}

json to_json(const DetectionSet& detections) {
  json out = json::array();
  for (std::size_t i = 0; i < detections.num_images(); ++i) {
    for (const auto& d : detections.of_image(i)) {
      out.push_back({{"image_id", d.image_id},
                     {"category_id", d.category_id},
                     {"bbox", {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h}},
                     {"score", d.score}});
    }
  }
  return out;
}

}  // namespace zoneeval
