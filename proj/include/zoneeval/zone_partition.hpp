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

// Zone partitions of the normalized image square [0,1)^2.
//
// Every zone is a union of half-open rectangles [x0,x1) x [y0,y1). Built-in
// partitions share boundary values bit-for-bit between neighbouring zones, so
// the half-open convention tiles the square with no gaps or overlaps. Points on
// the right/bottom image edge are clamped inward before lookup.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "zoneeval/coco_data.hpp"

namespace zoneeval {

// Exact non-negative rational, used for area fractions of built-in zones.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction make(std::int64_t num, std::int64_t den);
  Fraction operator+(const Fraction& o) const;
  bool operator==(const Fraction& o) const = default;
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct NormRect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  bool empty() const { return !(x0 < x1) || !(y0 < y1); }
  double area() const { return empty() ? 0.0 : (x1 - x0) * (y1 - y0); }
  bool contains(double x, double y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
};

struct Zone {
  std::string id;
  std::vector<NormRect> rects;  // pairwise disjoint
  std::optional<Fraction> exact_area;

  bool contains(double x, double y) const;
  double area_fraction() const;
};

enum class ZoneKind { kAnnular, kStripX, kStripY, kGrid, kCustom };

struct ZoneSpec {
  ZoneKind kind = ZoneKind::kAnnular;
  int n = 1;     // annular / strips
  int rows = 1;  // grid
  int cols = 1;
  std::vector<Zone> custom;  // kCustom only

  static ZoneSpec annular(int n);
  static ZoneSpec strip_x(int n);
  static ZoneSpec strip_y(int n);
  static ZoneSpec grid(int rows, int cols);
  static ZoneSpec custom_zones(std::vector<Zone> zones);

  // CLI form: "annular:5", "strip-x:5", "strip-y:5", "grid:11x11", "custom:@f".
  std::string to_string() const;
};

// Parses the CLI syntax. custom:@path reads a JSON list of
// {name, rects: [[x0,y0,x1,y1], ...]}.
ZoneSpec parse_zone_spec(std::string_view text);
ZoneSpec custom_spec_from_json(const nlohmann::json& doc);

// R_i = [i/2n, 1 - i/2n)^2. Empty for i == n. Throws InputError for i > n.
NormRect annular_rect(int i, int n);

class Partition {
 public:
  // Validates the spec; InputError on invalid counts or on custom zones that
  // overlap or leave gaps.
  explicit Partition(ZoneSpec spec);

  const ZoneSpec& spec() const { return spec_; }
  std::span<const Zone> zones() const { return zones_; }
  std::size_t size() const { return zones_.size(); }
  const Zone& zone(std::size_t index) const { return zones_.at(index); }

  std::optional<std::size_t> find(std::string_view zone_id) const;

  // Zone containing a normalized point, or nullopt outside [0,1]^2. A
  // coordinate of exactly 1 maps to the zone just inside the edge.
  std::optional<std::size_t> zone_of_normalized(double x, double y) const;
  // Zone containing a pixel point of `image`; nullopt when outside the image.
  std::optional<std::size_t> zone_of(Point p, const ImageInfo& image) const;
  // Same, clamping points outside the image onto its border first.
  std::size_t zone_of_clamped(Point p, const ImageInfo& image) const;

  // InputError for unknown ids.
  double area_fraction(std::string_view zone_id) const;
  // Area of a union of zones; exact rational sum when every zone has one.
  double area_fraction(std::span<const std::string> zone_ids) const;

 private:
  ZoneSpec spec_;
  std::vector<Zone> zones_;
};

Partition build_partition(const ZoneSpec& spec);

}  // namespace zoneeval
