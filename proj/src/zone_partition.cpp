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
#include "zoneeval/zone_partition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

#include "zoneeval/errors.hpp"

namespace zoneeval {

namespace {

constexpr int kCoverageSamples = 1000;

int parse_count(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 1) {
    throw InputError("invalid partition spec '" + std::string(whole) +
                     "': counts must be positive integers");
  }
  return value;
}

double boundary(int k, int denom) {
  return static_cast<double>(k) / static_cast<double>(denom);
}

}  // namespace

Fraction Fraction::make(std::int64_t num, std::int64_t den) {
  const std::int64_t g = std::gcd(num, den);
  return g == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
}

Fraction Fraction::operator+(const Fraction& o) const {
  const std::int64_t l = std::lcm(den, o.den);
  return make(num * (l / den) + o.num * (l / o.den), l);
}

bool Zone::contains(double x, double y) const {
  return std::any_of(rects.begin(), rects.end(),
                     [&](const NormRect& r) { return r.contains(x, y); });
}

double Zone::area_fraction() const {
  if (exact_area) return exact_area->to_double();
  double total = 0.0;
  for (const auto& r : rects) total += r.area();
  return total;
}

ZoneSpec ZoneSpec::annular(int n) { return {ZoneKind::kAnnular, n, 1, 1, {}}; }
ZoneSpec ZoneSpec::strip_x(int n) { return {ZoneKind::kStripX, n, 1, 1, {}}; }
ZoneSpec ZoneSpec::strip_y(int n) { return {ZoneKind::kStripY, n, 1, 1, {}}; }
ZoneSpec ZoneSpec::grid(int rows, int cols) {
  return {ZoneKind::kGrid, 1, rows, cols, {}};
}
ZoneSpec ZoneSpec::custom_zones(std::vector<Zone> zones) {
  return {ZoneKind::kCustom, 1, 1, 1, std::move(zones)};
}

std::string ZoneSpec::to_string() const {
  switch (kind) {
    case ZoneKind::kAnnular:
      return "annular:" + std::to_string(n);
    case ZoneKind::kStripX:
      return "strip-x:" + std::to_string(n);
    case ZoneKind::kStripY:
      return "strip-y:" + std::to_string(n);
    case ZoneKind::kGrid:
      return "grid:" + std::to_string(rows) + "x" + std::to_string(cols);
    case ZoneKind::kCustom:
      return "custom:" + std::to_string(custom.size());
  }
  return "";
}

ZoneSpec custom_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_array() || doc.empty()) {
    throw InputError("custom zones: expected a non-empty list of {name, rects}");
  }
  std::vector<Zone> zones;
  for (const auto& jz : doc) {
    if (!jz.is_object() || !jz.contains("name") || !jz["name"].is_string() ||
        !jz.contains("rects") || !jz["rects"].is_array()) {
      throw InputError("custom zones: each zone needs a string 'name' and 'rects'");
    }
    Zone z;
    z.id = jz["name"].get<std::string>();
    for (const auto& jr : jz["rects"]) {
      if (!jr.is_array() || jr.size() != 4 ||
          !std::all_of(jr.begin(), jr.end(), [](const auto& v) { return v.is_number(); })) {
        throw InputError("custom zone '" + z.id + "': rect must be [x0,y0,x1,y1]");
      }
      z.rects.push_back({jr[0].get<double>(), jr[1].get<double>(), jr[2].get<double>(),
                         jr[3].get<double>()});
    }
    zones.push_back(std::move(z));
  }
  return ZoneSpec::custom_zones(std::move(zones));
}

ZoneSpec parse_zone_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InputError("invalid partition spec '" + std::string(text) +
                     "': expected kind:args");
  }
  const auto kind = text.substr(0, colon);
  const auto args = text.substr(colon + 1);
  if (kind == "annular") return ZoneSpec::annular(parse_count(args, text));
  if (kind == "strip-x") return ZoneSpec::strip_x(parse_count(args, text));
  if (kind == "strip-y") return ZoneSpec::strip_y(parse_count(args, text));
  if (kind == "grid") {
    const auto x = args.find('x');
    if (x == std::string_view::npos) {
      const int n = parse_count(args, text);
      return ZoneSpec::grid(n, n);
    }
    return ZoneSpec::grid(parse_count(args.substr(0, x), text),
                          parse_count(args.substr(x + 1), text));
  }
  if (kind == "custom") {
    if (args.empty() || args.front() != '@') {
      throw InputError("invalid partition spec '" + std::string(text) +
                       "': expected custom:@zones.json");
    }
    return custom_spec_from_json(read_json_file(std::string(args.substr(1))));
  }
  throw InputError("unknown partition kind '" + std::string(kind) + "'");
}

NormRect annular_rect(int i, int n) {
  if (n < 1 || i < 0 || i > n) {
    throw InputError("annular_rect: index must satisfy 0 <= i <= n");
  }
  const double lo = boundary(i, 2 * n);
  const double hi = boundary(2 * n - i, 2 * n);
  return {lo, lo, hi, hi};
}

namespace {

std::vector<Zone> annular_zones(int n) {
  std::vector<Zone> zones;
  for (int i = 0; i < n; ++i) {
    const NormRect outer = annular_rect(i, n);
    const NormRect inner = annular_rect(i + 1, n);
    Zone z;
    z.id = "z" + std::to_string(i) + "," + std::to_string(i + 1);
    // Frame decomposition of outer \ inner: full-width top and bottom bands,
    // then left and right bands between them.
    const NormRect parts[] = {
        {outer.x0, outer.y0, outer.x1, inner.y0},
        {outer.x0, inner.y1, outer.x1, outer.y1},
        {outer.x0, inner.y0, inner.x0, inner.y1},
        {inner.x1, inner.y0, outer.x1, inner.y1},
    };
    for (const auto& r : parts) {
      if (!r.empty()) z.rects.push_back(r);
    }
    const std::int64_t a = n - i;
    const std::int64_t b = n - i - 1;
    z.exact_area = Fraction::make(a * a - b * b, static_cast<std::int64_t>(n) * n);
    zones.push_back(std::move(z));
  }
  return zones;
}

std::vector<Zone> grid_zones(int rows, int cols, const char* prefix, bool grid_names) {
  std::vector<Zone> zones;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Zone z;
      if (grid_names) {
        z.id = std::string(prefix) + std::to_string(r) + "_" + std::to_string(c);
      } else {
        z.id = std::string(prefix) + std::to_string(rows == 1 ? c : r);
      }
      z.rects.push_back({boundary(c, cols), boundary(r, rows), boundary(c + 1, cols),
                         boundary(r + 1, rows)});
      z.exact_area = Fraction::make(1, static_cast<std::int64_t>(rows) * cols);
      zones.push_back(std::move(z));
    }
  }
  return zones;
}

bool overlaps(const NormRect& a, const NormRect& b) {
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

void validate_custom(const std::vector<Zone>& zones) {
  if (zones.empty()) throw InputError("custom partition: no zones");
  std::set<std::string> names;
  std::vector<std::pair<std::size_t, NormRect>> all;
  for (std::size_t zi = 0; zi < zones.size(); ++zi) {
    const auto& z = zones[zi];
    if (z.id.empty() || !names.insert(z.id).second) {
      throw InputError("custom partition: zone names must be unique and non-empty");
    }
    if (z.rects.empty()) {
      throw InputError("custom zone '" + z.id + "': no rectangles");
    }
    for (const auto& r : z.rects) {
      if (r.empty() || r.x0 < 0.0 || r.y0 < 0.0 || r.x1 > 1.0 || r.y1 > 1.0) {
        throw InputError("custom zone '" + z.id +
                         "': rectangles must be non-empty and inside [0,1]^2");
      }
      all.emplace_back(zi, r);
    }
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (overlaps(all[i].second, all[j].second)) {
        throw InputError("custom partition: zones '" + zones[all[i].first].id +
                         "' and '" + zones[all[j].first].id + "' overlap");
      }
    }
  }
  for (int iy = 0; iy < kCoverageSamples; ++iy) {
    const double y = (iy + 0.5) / kCoverageSamples;
    for (int ix = 0; ix < kCoverageSamples; ++ix) {
      const double x = (ix + 0.5) / kCoverageSamples;
      const bool hit = std::any_of(all.begin(), all.end(),
                                   [&](const auto& e) { return e.second.contains(x, y); });
      if (!hit) {
        throw InputError("custom partition: point (" + std::to_string(x) + ", " +
                         std::to_string(y) + ") is not covered by any zone");
      }
    }
  }
}

}  // namespace

Partition::Partition(ZoneSpec spec) : spec_(std::move(spec)) {
  switch (spec_.kind) {
    case ZoneKind::kAnnular:
      if (spec_.n < 1) throw InputError("annular partition needs n >= 1");
      zones_ = annular_zones(spec_.n);
      break;
    case ZoneKind::kStripX:
      if (spec_.n < 1) throw InputError("strip partition needs n >= 1");
      zones_ = grid_zones(1, spec_.n, "x", false);
      break;
    case ZoneKind::kStripY:
      if (spec_.n < 1) throw InputError("strip partition needs n >= 1");
      zones_ = grid_zones(spec_.n, 1, "y", false);
      break;
    case ZoneKind::kGrid:
      if (spec_.rows < 1 || spec_.cols < 1) {
        throw InputError("grid partition needs rows, cols >= 1");
      }
      zones_ = grid_zones(spec_.rows, spec_.cols, "g", true);
      break;
    case ZoneKind::kCustom:
      validate_custom(spec_.custom);
      zones_ = spec_.custom;
      break;
  }
}

std::optional<std::size_t> Partition::find(std::string_view zone_id) const {
  for (std::size_t i = 0; i < zones_.size(); ++i) {
    if (zones_[i].id == zone_id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Partition::zone_of_normalized(double x, double y) const {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) return std::nullopt;
  constexpr double kInside = 0x1.fffffffffffffp-1;  // nextbelow(1.0)
  x = std::min(x, kInside);
  y = std::min(y, kInside);
  for (std::size_t i = 0; i < zones_.size(); ++i) {
    if (zones_[i].contains(x, y)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Partition::zone_of(Point p, const ImageInfo& image) const {
  if (!(p.x >= 0.0 && p.x <= image.width && p.y >= 0.0 && p.y <= image.height)) {
    return std::nullopt;
  }
  return zone_of_normalized(p.x / image.width, p.y / image.height);
}

std::size_t Partition::zone_of_clamped(Point p, const ImageInfo& image) const {
  const double x = std::clamp(p.x / image.width, 0.0, 1.0);
  const double y = std::clamp(p.y / image.height, 0.0, 1.0);
  auto z = zone_of_normalized(std::isnan(x) ? 0.0 : x, std::isnan(y) ? 0.0 : y);
  // A validated partition covers the whole square.
  return z.value_or(0);
}

double Partition::area_fraction(std::string_view zone_id) const {
  auto idx = find(zone_id);
  if (!idx) throw InputError("unknown zone id '" + std::string(zone_id) + "'");
  return zones_[*idx].area_fraction();
}

double Partition::area_fraction(std::span<const std::string> zone_ids) const {
  Fraction exact{0, 1};
  bool all_exact = true;
  double approx = 0.0;
  for (const auto& id : zone_ids) {
    auto idx = find(id);
    if (!idx) throw InputError("unknown zone id '" + id + "'");
    const auto& z = zones_[*idx];
    approx += z.area_fraction();
    if (z.exact_area) {
      exact = exact + *z.exact_area;
    } else {
      all_exact = false;
    }
  }
  return all_exact ? exact.to_double() : approx;
}

Partition build_partition(const ZoneSpec& spec) { return Partition(spec); }

}  // namespace zoneeval
