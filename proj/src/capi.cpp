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
#include "zoneeval/zone_eval.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "zoneeval/analysis.hpp"
#include "zoneeval/coco_data.hpp"
#include "zoneeval/equilibrium.hpp"
#include "zoneeval/errors.hpp"
#include "zoneeval/synth.hpp"
#include "zoneeval/zone_eval.hpp"
#include "zoneeval/zone_partition.hpp"

namespace ze = zoneeval;

struct ze_dataset {
  ze::Dataset value;
};

struct ze_detections {
  ze::DetectionSet value;
};

struct ze_partition {
  std::unique_ptr<ze::Partition> value;
};

struct ze_report {
  ze::ZoneReport value;
  ze::ZoneSpec spec;
};

namespace {

thread_local std::string g_last_error;

ze_status fail(ze_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
ze_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return ZE_OK;
  } catch (const ze::UndefinedError& e) {
    return fail(ZE_ERR_UNDEFINED, e.what());
  } catch (const ze::InputError& e) {
    return fail(ZE_ERR_INPUT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(ZE_ERR_INPUT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ZE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ZE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ZE_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ze::EvalConfig to_config(const ze_eval_options* opts) {
  ze_eval_options defaults;
  ze_eval_options_init(&defaults);
  if (!opts) opts = &defaults;
  ze::EvalConfig cfg;
  if (opts->iou_thresholds && *opts->iou_thresholds) {
    cfg.iou_thresholds = ze::parse_iou_thresholds(opts->iou_thresholds);
  }
  cfg.recall_points = opts->recall_points;
  cfg.max_dets = opts->max_dets;
  cfg.cap_after_zone = opts->cap_after_zone != 0;
  cfg.workers = opts->workers;
  if (opts->has_scale_range) cfg.scale_range = ze::ScaleRange{opts->scale_lo, opts->scale_hi};
  cfg.validate();
  return cfg;
}

}  // namespace

#define ZE_CHECK_ARG(p)                                                   \
  do {                                                                    \
    if (!(p)) return fail(ZE_ERR_ARGUMENT, #p " must not be NULL");       \
  } while (0)

extern "C" {

const char* ze_version(void) { return "1.0.0"; }

const char* ze_last_error(void) { return g_last_error.c_str(); }

void ze_free_string(char* s) { std::free(s); }

ze_status ze_dataset_load(const char* path, ze_dataset** out) {
  ZE_CHECK_ARG(path);
  ZE_CHECK_ARG(out);
  *out = nullptr;
  return guarded([&] { *out = new ze_dataset{ze::load_ground_truth(path)}; });
}

ze_status ze_dataset_parse(const char* json, ze_dataset** out) {
  ZE_CHECK_ARG(json);
  ZE_CHECK_ARG(out);
  *out = nullptr;
  return guarded([&] {
    *out = new ze_dataset{ze::parse_ground_truth(nlohmann::json::parse(json))};
  });
}

void ze_dataset_free(ze_dataset* ds) { delete ds; }

size_t ze_dataset_num_images(const ze_dataset* ds) {
  return ds ? ds->value.images().size() : 0;
}

size_t ze_dataset_num_annotations(const ze_dataset* ds) {
  return ds ? ds->value.ground_truths().size() : 0;
}

ze_status ze_dataset_to_json(const ze_dataset* ds, char** out) {
  ZE_CHECK_ARG(ds);
  ZE_CHECK_ARG(out);
  return guarded([&] { *out = dup_string(ze::to_json(ds->value).dump()); });
}

ze_status ze_detections_load(const ze_dataset* ds, const char* path, ze_detections** out) {
  ZE_CHECK_ARG(ds);
  ZE_CHECK_ARG(path);
  ZE_CHECK_ARG(out);
  *out = nullptr;
  return guarded([&] { *out = new ze_detections{ze::load_detections(path, ds->value)}; });
}

ze_status ze_detections_parse(const ze_dataset* ds, const char* json, ze_detections** out) {
  ZE_CHECK_ARG(ds);
  ZE_CHECK_ARG(json);
  ZE_CHECK_ARG(out);
  *out = nullptr;
  return guarded([&] {
    *out = new ze_detections{ze::parse_detections(nlohmann::json::parse(json), ds->value)};
  });
}

void ze_detections_free(ze_detections* dets) { delete dets; }

size_t ze_detections_count(const ze_detections* dets) {
  return dets ? dets->value.size() : 0;
}

ze_status ze_detections_to_json(const ze_detections* dets, char** out) {
  ZE_CHECK_ARG(dets);
  ZE_CHECK_ARG(out);
  return guarded([&] { *out = dup_string(ze::to_json(dets->value).dump()); });
}

ze_status ze_partition_create(const char* spec, ze_partition** out) {
  ZE_CHECK_ARG(spec);
  ZE_CHECK_ARG(out);
  *out = nullptr;
  return guarded([&] {
    *out = new ze_partition{std::make_unique<ze::Partition>(ze::parse_zone_spec(spec))};
  });
}

void ze_partition_free(ze_partition* p) { delete p; }

size_t ze_partition_size(const ze_partition* p) { return p ? p->value->size() : 0; }

ze_status ze_partition_zone_id(const ze_partition* p, size_t index, char** out) {
  ZE_CHECK_ARG(p);
  ZE_CHECK_ARG(out);
  if (index >= p->value->size()) return fail(ZE_ERR_ARGUMENT, "zone index out of range");
  return guarded([&] { *out = dup_string(p->value->zone(index).id); });
}

ze_status ze_partition_area(const ze_partition* p, const char* zone_id, double* out) {
  ZE_CHECK_ARG(p);
  ZE_CHECK_ARG(zone_id);
  ZE_CHECK_ARG(out);
  return guarded([&] { *out = p->value->area_fraction(std::string_view(zone_id)); });
}

ze_status ze_partition_union_area(const ze_partition* p, const char* const* zone_ids,
                                  double* out) {
  ZE_CHECK_ARG(p);
  ZE_CHECK_ARG(zone_ids);
  ZE_CHECK_ARG(out);
  return guarded([&] {
    std::vector<std::string> ids;
    for (const char* const* it = zone_ids; *it; ++it) ids.emplace_back(*it);
    *out = p->value->area_fraction(std::span<const std::string>(ids));
  });
}

ze_status ze_partition_zone_of(const ze_partition* p, double x, double y, double width,
                               double height, long* out) {
  ZE_CHECK_ARG(p);
  ZE_CHECK_ARG(out);
  if (!(width > 0.0 && height > 0.0)) {
    return fail(ZE_ERR_ARGUMENT, "image size must be positive");
  }
  return guarded([&] {
    const ze::ImageInfo image{0, width, height, {}};
    const auto z = p->value->zone_of({x, y}, image);
    *out = z ? static_cast<long>(*z) : -1;
  });
}

void ze_eval_options_init(ze_eval_options* opts) {
  if (!opts) return;
  *opts = ze_eval_options{};
  opts->iou_thresholds = nullptr;
  opts->recall_points = 101;
  opts->max_dets = 100;
  opts->cap_after_zone = 0;
  opts->workers = 1;
  opts->has_scale_range = 0;
}

ze_status ze_evaluate(const ze_dataset* ds, const ze_detections* dets, const ze_partition* p,
                      const ze_eval_options* opts, ze_report** out) {
  ZE_CHECK_ARG(ds);
  ZE_CHECK_ARG(dets);
  ZE_CHECK_ARG(p);
  ZE_CHECK_ARG(out);
  *out = nullptr;
  return guarded([&] {
    const auto cfg = to_config(opts);
    *out = new ze_report{ze::evaluate_zones(ds->value, dets->value, *p->value, cfg),
                         p->value->spec()};
  });
}

void ze_report_free(ze_report* r) { delete r; }

ze_status ze_report_to_json(const ze_report* r, char** out) {
  ZE_CHECK_ARG(r);
  ZE_CHECK_ARG(out);
  return guarded([&] { *out = dup_string(ze::to_json(r->value).dump(2) + "\n"); });
}

ze_status ze_report_to_csv(const ze_report* r, char** out) {
  ZE_CHECK_ARG(r);
  ZE_CHECK_ARG(out);
  return guarded([&] { *out = dup_string(ze::to_csv(r->value)); });
}

ze_status ze_report_table(const ze_report* r, char** out) {
  ZE_CHECK_ARG(r);
  ZE_CHECK_ARG(out);
  return guarded([&] { *out = dup_string(ze::format_table(r->value)); });
}

size_t ze_report_num_zones(const ze_report* r) { return r ? r->value.zones.size() : 0; }

ze_status ze_report_zone_zp(const ze_report* r, size_t index, double* zp, int* defined) {
  ZE_CHECK_ARG(r);
  ZE_CHECK_ARG(zp);
  ZE_CHECK_ARG(defined);
  if (index >= r->value.zones.size()) return fail(ZE_ERR_ARGUMENT, "zone index out of range");
  const auto& z = r->value.zones[index].zp;
  *defined = z ? 1 : 0;
  *zp = z.value_or(0.0);
  return ZE_OK;
}

ze_status ze_report_full_ap(const ze_report* r, double* ap) {
  ZE_CHECK_ARG(r);
  ZE_CHECK_ARG(ap);
  *ap = r->value.full_ap;
  return ZE_OK;
}

ze_status ze_report_variance(const ze_report* r, double* var, int* defined) {
  ZE_CHECK_ARG(r);
  ZE_CHECK_ARG(var);
  ZE_CHECK_ARG(defined);
  *defined = r->value.variance ? 1 : 0;
  *var = r->value.variance.value_or(0.0);
  return ZE_OK;
}

ze_status ze_report_undefined_zones(const ze_report* r, char** out) {
  ZE_CHECK_ARG(r);
  ZE_CHECK_ARG(out);
  return guarded([&] {
    std::string joined;
    for (const auto& id : r->value.undefined_zones) {
      if (!joined.empty()) joined += ";";
      joined += id;
    }
    *out = dup_string(joined);
  });
}

namespace {

ze::Heatmap report_heatmap(const ze_report* r) {
  if (r->spec.kind != ze::ZoneKind::kGrid) {
    throw ze::InputError("heatmaps need a grid partition, got " + r->spec.to_string());
  }
  return ze::heatmap_from_report(r->value, r->spec.rows, r->spec.cols);
}

}  // namespace

ze_status ze_report_heatmap_csv(const ze_report* r, int panel, char** out) {
  ZE_CHECK_ARG(r);
  ZE_CHECK_ARG(out);
  if (panel < -1 || panel >= static_cast<int>(r->value.config.iou_thresholds.size())) {
    return fail(ZE_ERR_ARGUMENT, "heatmap panel out of range");
  }
  return guarded([&] { *out = dup_string(ze::heatmap_csv(report_heatmap(r), panel)); });
}

ze_status ze_report_heatmap_json(const ze_report* r, char** out) {
  ZE_CHECK_ARG(r);
  ZE_CHECK_ARG(out);
  return guarded([&] { *out = dup_string(ze::to_json(report_heatmap(r)).dump(2) + "\n"); });
}

ze_status ze_scale_study_json(const ze_dataset* ds, const ze_detections* dets,
                              const ze_partition* p, const ze_eval_options* opts, char** out) {
  ZE_CHECK_ARG(ds);
  ZE_CHECK_ARG(dets);
  ZE_CHECK_ARG(p);
  ZE_CHECK_ARG(out);
  return guarded([&] {
    const auto report = ze::scale_study(ds->value, dets->value, *p->value, to_config(opts));
    *out = dup_string(ze::to_json(report).dump(2) + "\n");
  });
}

ze_status ze_correlate_csv(const char* heatmap_json, const ze_dataset* ds, char** out) {
  ZE_CHECK_ARG(heatmap_json);
  ZE_CHECK_ARG(ds);
  ZE_CHECK_ARG(out);
  return guarded([&] {
    const auto heatmap = ze::heatmap_from_json(nlohmann::json::parse(heatmap_json));
    const auto counts = ze::center_counts(ds->value, heatmap.rows, heatmap.cols);
    *out = dup_string(ze::to_csv(ze::correlate_zp_distribution(heatmap, counts)));
  });
}

ze_status ze_center_counts_csv(const ze_dataset* ds, int rows, int cols, char** out) {
  ZE_CHECK_ARG(ds);
  ZE_CHECK_ARG(out);
  if (rows < 1 || cols < 1) return fail(ZE_ERR_ARGUMENT, "grid needs rows, cols >= 1");
  return guarded([&] { *out = dup_string(ze::to_csv(ze::center_counts(ds->value, rows, cols))); });
}

namespace {

std::string render(const ze::DensityReport& report, ze_format format) {
  return format == ZE_FORMAT_CSV ? ze::to_csv(report) : ze::to_json(report).dump(2) + "\n";
}

}  // namespace

ze_status ze_object_density(const ze_dataset* ds, const ze_partition* p, int absolute_area,
                            ze_format format, char** out) {
  ZE_CHECK_ARG(ds);
  ZE_CHECK_ARG(p);
  ZE_CHECK_ARG(out);
  return guarded([&] {
    *out = dup_string(render(ze::object_density(ds->value, *p->value, absolute_area != 0), format));
  });
}

void ze_assign_options_init(ze_assign_options* opts) {
  if (!opts) return;
  *opts = ze_assign_options{};
  opts->grid_rows = 8;
  opts->grid_cols = 8;
  opts->scales = nullptr;
  opts->num_scales = 0;
  opts->t = 0.5;
  opts->gamma = 0.0;
  opts->use_beta = 0;
  opts->alpha_pos = 0.5;
  opts->beta = 0.0;
  opts->beta_zone = nullptr;
}

ze_status ze_assignment_density(const ze_dataset* ds, const ze_partition* p,
                                const ze_assign_options* opts, int absolute_area,
                                ze_format format, char** out, int* warning) {
  ZE_CHECK_ARG(ds);
  ZE_CHECK_ARG(p);
  ZE_CHECK_ARG(opts);
  ZE_CHECK_ARG(out);
  if (opts->num_scales > 0 && !opts->scales) {
    return fail(ZE_ERR_ARGUMENT, "scales must not be NULL when num_scales > 0");
  }
  if (opts->use_beta && !opts->beta_zone) {
    return fail(ZE_ERR_ARGUMENT, "beta_zone is required with use_beta");
  }
  return guarded([&] {
    ze::AnchorGridSpec grid;
    grid.rows = opts->grid_rows;
    grid.cols = opts->grid_cols;
    if (opts->num_scales > 0) grid.scales.assign(opts->scales, opts->scales + opts->num_scales);
    ze::AssignConfig cfg;
    cfg.sela = ze::SelaRule{opts->t, opts->gamma};
    if (opts->use_beta) cfg.beta = ze::BetaRule{opts->alpha_pos, opts->beta, opts->beta_zone};
    const auto report =
        ze::assignment_density(ds->value, *p->value, grid, cfg, absolute_area != 0);
    if (warning) *warning = report.in_zone_impossible ? 1 : 0;
    *out = dup_string(render(report, format));
  });
}

ze_status ze_synth_sudoku(const char* objects_json, double canvas, double object_size,
                          char** gt_json, char** manifest_json) {
  ZE_CHECK_ARG(objects_json);
  ZE_CHECK_ARG(gt_json);
  return guarded([&] {
    const auto cfg =
        ze::sudoku_config_from_json(nlohmann::json::parse(objects_json), canvas, object_size);
    const auto layout = ze::sudoku_layout(cfg);
    std::unique_ptr<char, decltype(&std::free)> gt(
        dup_string(ze::to_json(layout.dataset).dump(2) + "\n"), &std::free);
    if (manifest_json) *manifest_json = dup_string(ze::manifest_json(layout).dump(2) + "\n");
    *gt_json = gt.release();
  });
}

void ze_bench_options_init(ze_bench_options* opts) {
  if (!opts) return;
  *opts = ze_bench_options{};
  opts->config_json = nullptr;
  opts->profile_json = nullptr;
  opts->recall_points = 101;
}

ze_status ze_synth_bench(const ze_bench_options* opts, const ze_partition* p, char** gt_json,
                         char** dt_json, char** expected_json) {
  ZE_CHECK_ARG(opts);
  ZE_CHECK_ARG(p);
  ZE_CHECK_ARG(gt_json);
  ZE_CHECK_ARG(dt_json);
  return guarded([&] {
    ze::BenchConfig cfg;
    if (opts->config_json && *opts->config_json) {
      cfg = ze::bench_config_from_json(nlohmann::json::parse(opts->config_json));
    }
    if (opts->profile_json && *opts->profile_json) {
      cfg.profile = ze::profile_from_json(nlohmann::json::parse(opts->profile_json));
    }
    if (opts->has_seed) cfg.profile.seed = opts->seed;
    if (opts->has_center_bias) cfg.center_bias = opts->center_bias;
    if (opts->images > 0) cfg.num_images = opts->images;
    const auto bench = ze::synthetic_benchmark(cfg, *p->value, opts->recall_points);
    using Owned = std::unique_ptr<char, decltype(&std::free)>;
    Owned gt(dup_string(ze::to_json(bench.dataset).dump() + "\n"), &std::free);
    Owned dt(dup_string(ze::to_json(bench.detections).dump() + "\n"), &std::free);
    if (expected_json) *expected_json = dup_string(ze::expected_json(bench).dump(2) + "\n");
    *gt_json = gt.release();
    *dt_json = dt.release();
  });
}

ze_status ze_pattern_distance(const char* features_path, const char* group_a,
                              const char* group_b, int num_bins, double bin_width,
                              double* out) {
  ZE_CHECK_ARG(features_path);
  ZE_CHECK_ARG(group_a);
  ZE_CHECK_ARG(group_b);
  ZE_CHECK_ARG(out);
  return guarded([&] {
    const auto records = ze::load_features(features_path);
    *out = ze::pattern_distance(records, ze::parse_feature_group(group_a),
                                ze::parse_feature_group(group_b), num_bins, bin_width);
  });
}

ze_status ze_spatial_weight(double x, double y, double width, double height, double* out) {
  ZE_CHECK_ARG(out);
  return guarded([&] { *out = ze::spatial_weight(x, y, width, height); });
}

ze_status ze_se_loss_weight(double x, double y, double width, double height, double gamma,
                            double* out) {
  ZE_CHECK_ARG(out);
  return guarded([&] { *out = ze::se_loss_weight(x, y, width, height, gamma); });
}

}  // extern "C"

namespace {

template <typename F>
ze_status correlation(F f, const double* x, const double* y, size_t n, double* out,
                      int* defined) {
  ZE_CHECK_ARG(out);
  ZE_CHECK_ARG(defined);
  if (n > 0 && (!x || !y)) return fail(ZE_ERR_ARGUMENT, "x and y must not be NULL");
  return guarded([&] {
    const auto r = f(std::span<const double>(x, n), std::span<const double>(y, n));
    *defined = r ? 1 : 0;
    *out = r.value_or(0.0);
  });
}

}  // namespace

extern "C" {

ze_status ze_pearson(const double* x, const double* y, size_t n, double* out, int* defined) {
  return correlation(ze::pearson, x, y, n, out, defined);
}

ze_status ze_spearman(const double* x, const double* y, size_t n, double* out, int* defined) {
  return correlation(ze::spearman, x, y, n, out, defined);
}

}  // extern "C"
