/* Copyright 2026 The zone-eval Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef ZONEEVAL_ZONE_EVAL_H_
#define ZONEEVAL_ZONE_EVAL_H_

/* C interface to libzoneeval.
 *
 * Every fallible call returns a ze_status; on failure ze_last_error() holds a
 * message for the calling thread. Strings returned through char** outputs are
 * owned by the caller and released with ze_free_string(). Handles are released
 * with their matching *_free function, which accepts NULL. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(ZONEEVAL_BUILDING_LIBRARY)
#define ZEVAL_API __declspec(dllexport)
#else
#define ZEVAL_API __declspec(dllimport)
#endif
#else
#define ZEVAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ze_status {
  ZE_OK = 0,
  ZE_ERR_INPUT = 1,     /* malformed or inconsistent input */
  ZE_ERR_UNDEFINED = 2, /* metric undefined, e.g. no positive ground truth */
  ZE_ERR_ARGUMENT = 3,  /* NULL handle or out-of-range argument */
  ZE_ERR_INTERNAL = 4
} ze_status;

typedef struct ze_dataset ze_dataset;
typedef struct ze_detections ze_detections;
typedef struct ze_partition ze_partition;
typedef struct ze_report ze_report;

ZEVAL_API const char* ze_version(void);
ZEVAL_API const char* ze_last_error(void);
ZEVAL_API void ze_free_string(char* s);

/* Ground truth (COCO instances JSON). */
ZEVAL_API ze_status ze_dataset_load(const char* path, ze_dataset** out);
ZEVAL_API ze_status ze_dataset_parse(const char* json, ze_dataset** out);
ZEVAL_API void ze_dataset_free(ze_dataset* ds);
ZEVAL_API size_t ze_dataset_num_images(const ze_dataset* ds);
ZEVAL_API size_t ze_dataset_num_annotations(const ze_dataset* ds);
ZEVAL_API ze_status ze_dataset_to_json(const ze_dataset* ds, char** out);

/* Detections (COCO results JSON), resolved against a dataset. */
ZEVAL_API ze_status ze_detections_load(const ze_dataset* ds, const char* path,
                                       ze_detections** out);
ZEVAL_API ze_status ze_detections_parse(const ze_dataset* ds, const char* json,
                                        ze_detections** out);
ZEVAL_API void ze_detections_free(ze_detections* dets);
ZEVAL_API size_t ze_detections_count(const ze_detections* dets);
ZEVAL_API ze_status ze_detections_to_json(const ze_detections* dets, char** out);

/* Partitions: "annular:5", "strip-x:5", "strip-y:5", "grid:11x11",
 * "custom:@zones.json". */
ZEVAL_API ze_status ze_partition_create(const char* spec, ze_partition** out);
ZEVAL_API void ze_partition_free(ze_partition* p);
ZEVAL_API size_t ze_partition_size(const ze_partition* p);
ZEVAL_API ze_status ze_partition_zone_id(const ze_partition* p, size_t index, char** out);
ZEVAL_API ze_status ze_partition_area(const ze_partition* p, const char* zone_id, double* out);
/* zone_ids is NULL-terminated. */
ZEVAL_API ze_status ze_partition_union_area(const ze_partition* p, const char* const* zone_ids,
                                            double* out);
/* Zone index of a pixel point of a width x height image; -1 outside. */
ZEVAL_API ze_status ze_partition_zone_of(const ze_partition* p, double x, double y,
                                         double width, double height, long* out);

typedef struct ze_eval_options {
  const char* iou_thresholds; /* "0.5:0.95:0.05", "0.5" or "0.5,0.75"; NULL = default */
  int recall_points;          /* default 101 */
  int max_dets;               /* default 100 */
  int cap_after_zone;         /* nonzero: cap detections within each zone */
  int workers;                /* default 1 */
  int has_scale_range;
  double scale_lo; /* half-open [lo, hi) on ground-truth area */
  double scale_hi;
} ze_eval_options;

ZEVAL_API void ze_eval_options_init(ze_eval_options* opts);

/* ZE_ERR_UNDEFINED when the dataset has no positive ground truth. */
ZEVAL_API ze_status ze_evaluate(const ze_dataset* ds, const ze_detections* dets,
                                const ze_partition* p, const ze_eval_options* opts,
                                ze_report** out);
ZEVAL_API void ze_report_free(ze_report* r);
ZEVAL_API ze_status ze_report_to_json(const ze_report* r, char** out);
ZEVAL_API ze_status ze_report_to_csv(const ze_report* r, char** out);
ZEVAL_API ze_status ze_report_table(const ze_report* r, char** out);
ZEVAL_API size_t ze_report_num_zones(const ze_report* r);
/* Percent values; *defined is set to 0 for zones without positive GT. */
ZEVAL_API ze_status ze_report_zone_zp(const ze_report* r, size_t index, double* zp,
                                      int* defined);
ZEVAL_API ze_status ze_report_full_ap(const ze_report* r, double* ap);
ZEVAL_API ze_status ze_report_variance(const ze_report* r, double* var, int* defined);
/* Semicolon-separated ids of zones without positive GT (ids may contain
 * commas); empty when all are defined. */
ZEVAL_API ze_status ze_report_undefined_zones(const ze_report* r, char** out);
/* Heatmap of a grid-partition report: CSV (panel -1 = mean over thresholds)
 * or JSON with every per-threshold panel. */
ZEVAL_API ze_status ze_report_heatmap_csv(const ze_report* r, int panel, char** out);
ZEVAL_API ze_status ze_report_heatmap_json(const ze_report* r, char** out);

ZEVAL_API ze_status ze_scale_study_json(const ze_dataset* ds, const ze_detections* dets,
                                        const ze_partition* p, const ze_eval_options* opts,
                                        char** out);

/* Correlation of a stored heatmap JSON with the dataset's center counts. */
ZEVAL_API ze_status ze_correlate_csv(const char* heatmap_json, const ze_dataset* ds,
                                     char** out);
ZEVAL_API ze_status ze_center_counts_csv(const ze_dataset* ds, int rows, int cols, char** out);

typedef enum ze_format { ZE_FORMAT_JSON = 0, ZE_FORMAT_CSV = 1 } ze_format;

ZEVAL_API ze_status ze_object_density(const ze_dataset* ds, const ze_partition* p,
                                      int absolute_area, ze_format format, char** out);

typedef struct ze_assign_options {
  int grid_rows; /* default 8 */
  int grid_cols; /* default 8 */
  const double* scales;
  size_t num_scales; /* 0: single scale 1.0 */
  double t;          /* default 0.5 */
  double gamma;      /* default 0 */
  int use_beta;
  double alpha_pos;
  double beta;
  const char* beta_zone;
} ze_assign_options;

ZEVAL_API void ze_assign_options_init(ze_assign_options* opts);
/* *warning is set nonzero when alpha_pos + beta > 1. */
ZEVAL_API ze_status ze_assignment_density(const ze_dataset* ds, const ze_partition* p,
                                          const ze_assign_options* opts, int absolute_area,
                                          ze_format format, char** out, int* warning);

ZEVAL_API ze_status ze_synth_sudoku(const char* objects_json, double canvas,
                                    double object_size, char** gt_json, char** manifest_json);

typedef struct ze_bench_options {
  const char* config_json;  /* dataset shape and "profile"; NULL = defaults */
  const char* profile_json; /* replaces the config's profile when set */
  int has_seed;
  uint64_t seed;
  int has_center_bias;
  double center_bias;
  int images; /* > 0 overrides the config */
  int recall_points;
} ze_bench_options;

ZEVAL_API void ze_bench_options_init(ze_bench_options* opts);
ZEVAL_API ze_status ze_synth_bench(const ze_bench_options* opts, const ze_partition* p,
                                   char** gt_json, char** dt_json, char** expected_json);

/* Feature records as JSON lines; groups are "train:in", "test:out", ... */
ZEVAL_API ze_status ze_pattern_distance(const char* features_path, const char* group_a,
                                        const char* group_b, int num_bins, double bin_width,
                                        double* out);

ZEVAL_API ze_status ze_spatial_weight(double x, double y, double width, double height,
                                      double* out);
ZEVAL_API ze_status ze_se_loss_weight(double x, double y, double width, double height,
                                      double gamma, double* out);
ZEVAL_API ze_status ze_pearson(const double* x, const double* y, size_t n, double* out,
                               int* defined);
ZEVAL_API ze_status ze_spearman(const double* x, const double* y, size_t n, double* out,
                                int* defined);

#ifdef __cplusplus
}
#endif

#endif /* ZONEEVAL_ZONE_EVAL_H_ */
