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

// zone-eval: zone-by-zone detection evaluation and spatial-bias analysis.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zoneeval/zone_eval.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitUndefined = 2;

// Carries an exit code out of a subcommand.
struct Failure {
  int code;
  std::string message;
};

void check(ze_status status) {
  if (status == ZE_OK) return;
  throw Failure{status == ZE_ERR_UNDEFINED ? kExitUndefined : kExitInput, ze_last_error()};
}

struct StringDeleter {
  void operator()(char* s) const { ze_free_string(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

template <typename T, void (*Free)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { Free(p); }
};
using Dataset = std::unique_ptr<ze_dataset, HandleDeleter<ze_dataset, ze_dataset_free>>;
using Detections =
    std::unique_ptr<ze_detections, HandleDeleter<ze_detections, ze_detections_free>>;
using Partition = std::unique_ptr<ze_partition, HandleDeleter<ze_partition, ze_partition_free>>;
using Report = std::unique_ptr<ze_report, HandleDeleter<ze_report, ze_report_free>>;

Dataset load_dataset(const std::string& path) {
  ze_dataset* ds = nullptr;
  check(ze_dataset_load(path.c_str(), &ds));
  return Dataset(ds);
}

Partition make_partition(const std::string& spec) {
  ze_partition* p = nullptr;
  check(ze_partition_create(spec.c_str(), &p));
  return Partition(p);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitInput, "cannot open " + path};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// "-" or empty writes to stdout.
void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitInput, "cannot write " + path};
  out << text;
  if (!out) throw Failure{kExitInput, "error writing " + path};
}

// Parses "8x8" into rows and cols.
std::pair<int, int> parse_dims(const std::string& text) {
  const auto x = text.find('x');
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      const int n = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {n, n};
    }
    const int rows = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string tail = text.substr(x + 1);
    const int cols = std::stoi(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(text);
    return {rows, cols};
  } catch (const std::logic_error&) {
    throw Failure{kExitInput, "expected ROWSxCOLS, got '" + text + "'"};
  }
}

struct EvalArgs {
  std::string gt;
  std::string dt;
  std::string partition = "annular:5";
  std::string iou = "0.5:0.95:0.05";
  int max_dets = 100;
  int recall_points = 101;
  bool cap_after_zone = false;
  int workers = 0;
  std::string scale_range;
  std::string out;
  std::string format = "json";
  std::string heatmap;
  std::string heatmap_json;
  std::string scale_study;
};

int workers_or_env(int workers) {
  if (workers > 0) return workers;
  if (const char* env = std::getenv("ZONE_EVAL_WORKERS"); env && *env) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(env, &used);
      if (used == std::strlen(env) && n > 0) return n;
    } catch (const std::logic_error&) {
    }
    throw Failure{kExitInput, std::string("ZONE_EVAL_WORKERS must be a positive integer, got '") +
                                  env + "'"};
  }
  return 1;
}

ze_eval_options eval_options(const EvalArgs& a) {
  ze_eval_options opts;
  ze_eval_options_init(&opts);
  opts.iou_thresholds = a.iou.c_str();
  opts.recall_points = a.recall_points;
  opts.max_dets = a.max_dets;
  opts.cap_after_zone = a.cap_after_zone ? 1 : 0;
  opts.workers = workers_or_env(a.workers);
  if (!a.scale_range.empty()) {
    const auto colon = a.scale_range.find(':');
    if (colon == std::string::npos) throw Failure{kExitInput, "--scale-range expects LO:HI"};
    try {
      opts.scale_lo = std::stod(a.scale_range.substr(0, colon));
      const std::string hi = a.scale_range.substr(colon + 1);
      opts.scale_hi = hi == "inf" ? HUGE_VAL : std::stod(hi);
    } catch (const std::logic_error&) {
      throw Failure{kExitInput, "--scale-range expects LO:HI, got '" + a.scale_range + "'"};
    }
    opts.has_scale_range = 1;
  }
  return opts;
}

int run_eval(const EvalArgs& a) {
  const auto opts = eval_options(a);
  auto ds = load_dataset(a.gt);
  ze_detections* raw = nullptr;
  check(ze_detections_load(ds.get(), a.dt.c_str(), &raw));
  Detections dets(raw);
  auto part = make_partition(a.partition);

  ze_report* rep = nullptr;
  check(ze_evaluate(ds.get(), dets.get(), part.get(), &opts, &rep));
  Report report(rep);

  char* s = nullptr;
  check(ze_report_undefined_zones(report.get(), &s));
  OwnedString undefined(s);
  if (*undefined) {
    std::cerr << "warning: ZP undefined (no positive ground truth) in zones: " << undefined.get()
              << "\n";
  }

  if (!a.out.empty()) {
    check(a.format == "csv" ? ze_report_to_csv(report.get(), &s)
                            : ze_report_to_json(report.get(), &s));
    OwnedString text(s);
    write_text(a.out, text.get());
  }
  if (!a.heatmap.empty()) {
    check(ze_report_heatmap_csv(report.get(), -1, &s));
    OwnedString text(s);
    write_text(a.heatmap, text.get());
  }
  if (!a.heatmap_json.empty()) {
    check(ze_report_heatmap_json(report.get(), &s));
    OwnedString text(s);
    write_text(a.heatmap_json, text.get());
  }
  if (!a.scale_study.empty()) {
    check(ze_scale_study_json(ds.get(), dets.get(), part.get(), &opts, &s));
    OwnedString text(s);
    write_text(a.scale_study, text.get());
  }
  if (a.out != "-") {
    check(ze_report_table(report.get(), &s));
    OwnedString table(s);
    std::cout << table.get();
  }
  return kExitOk;
}

ze_format parse_format(const std::string& f) { return f == "json" ? ZE_FORMAT_JSON : ZE_FORMAT_CSV; }

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* cmd = app.add_subcommand("eval", "Zone precision per zone, ZP variance and AP");
  cmd->add_option("--gt", a.gt, "COCO ground-truth JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--dt", a.dt, "COCO detection results JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--partition", a.partition,
                  "annular:N, strip-x:N, strip-y:N, grid:RxC or custom:@zones.json")
      ->capture_default_str();
  cmd->add_option("--iou", a.iou, "IoU thresholds: lo:hi:step, a value, or a comma list")
      ->capture_default_str();
  cmd->add_option("--max-dets", a.max_dets, "Detections kept per image and category")
      ->capture_default_str();
  cmd->add_option("--recall-points", a.recall_points, "Interpolation points on [0,1]")
      ->capture_default_str();
  cmd->add_flag("--cap-after-zone", a.cap_after_zone,
                "Apply --max-dets within each zone instead of per image");
  cmd->add_option("--workers", a.workers,
                  "Worker threads (default: $ZONE_EVAL_WORKERS or 1)");
  cmd->add_option("--scale-range", a.scale_range,
                  "Restrict to ground-truth areas in [LO, HI); HI may be inf");
  cmd->add_option("--out", a.out, "Write the report here ('-' for stdout)");
  cmd->add_option("--format", a.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--heatmap", a.heatmap, "Grid partitions: write the mean ZP matrix as CSV");
  cmd->add_option("--heatmap-json", a.heatmap_json,
                  "Grid partitions: write per-threshold ZP matrices as JSON");
  cmd->add_option("--scale-study", a.scale_study, "Write the scale-range study as JSON");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zone-eval: zone-by-zone evaluation of object detectors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ze_version()));

  EvalArgs eval;
  add_eval(app, eval);

  struct {
    std::string gt, partition = "annular:5", format = "csv", out;
    bool absolute = false;
  } density;
  auto* density_cmd = app.add_subcommand("density", "Ground-truth center density per zone");
  density_cmd->add_option("--gt", density.gt, "COCO ground-truth JSON")
      ->required()
      ->check(CLI::ExistingFile);
  density_cmd->add_option("--partition", density.partition, "Zone partition")
      ->capture_default_str();
  density_cmd->add_flag("--absolute-area", density.absolute,
                        "Divide by zone area in pixels (all images must share one size)");
  density_cmd->add_option("--format", density.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  density_cmd->add_option("--out", density.out, "Output file (default stdout)");

  struct {
    std::string gt, grid = "11x11", out;
  } counts;
  auto* counts_cmd = app.add_subcommand("counts", "Ground-truth center counts on a grid (CSV)");
  counts_cmd->add_option("--gt", counts.gt, "COCO ground-truth JSON")
      ->required()
      ->check(CLI::ExistingFile);
  counts_cmd->add_option("--grid", counts.grid, "Grid size ROWSxCOLS")->capture_default_str();
  counts_cmd->add_option("--out", counts.out, "Output file (default stdout)");

  struct {
    std::string heatmap, gt, out;
  } corr;
  auto* corr_cmd = app.add_subcommand(
      "correlate", "PCC/SCC between grid ZP heatmaps and ground-truth center counts");
  corr_cmd->add_option("--heatmap", corr.heatmap, "Heatmap JSON from eval --heatmap-json")
      ->required()
      ->check(CLI::ExistingFile);
  corr_cmd->add_option("--gt", corr.gt, "COCO ground-truth JSON")
      ->required()
      ->check(CLI::ExistingFile);
  corr_cmd->add_option("--out", corr.out, "Output CSV (default stdout)");

  struct {
    std::string gt, partition = "annular:5", grid = "8x8", scales = "1", format = "csv", out,
                    beta_zone;
    double t = 0.5, gamma = 0.0, alpha_pos = 0.5, beta = 0.0;
    bool absolute = false;
  } sela;
  auto* sela_cmd =
      app.add_subcommand("sela", "Positive-anchor density per zone under SELA or beta rules");
  sela_cmd->add_option("--gt", sela.gt, "COCO ground-truth JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sela_cmd->add_option("--partition", sela.partition, "Zone partition")->capture_default_str();
  sela_cmd->add_option("--anchor-grid", sela.grid, "Anchor grid ROWSxCOLS per image")
      ->capture_default_str();
  sela_cmd->add_option("--anchor-scales", sela.scales,
                       "Comma list of anchor sizes relative to a grid cell")
      ->capture_default_str();
  sela_cmd->add_option("--t", sela.t, "IoU threshold at the image center")
      ->capture_default_str();
  sela_cmd->add_option("--gamma", sela.gamma, "Threshold relaxation toward the border")
      ->capture_default_str();
  auto* beta_opt = sela_cmd->add_option("--beta", sela.beta,
                                        "Use the beta rule: alpha_pos + beta inside --beta-zone");
  sela_cmd->add_option("--alpha-pos", sela.alpha_pos, "Base threshold of the beta rule")
      ->capture_default_str();
  sela_cmd->add_option("--beta-zone", sela.beta_zone, "Zone id receiving the beta offset")
      ->needs(beta_opt);
  beta_opt->needs("--beta-zone");
  sela_cmd->add_flag("--absolute-area", sela.absolute, "Divide by zone area in pixels");
  sela_cmd->add_option("--format", sela.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sela_cmd->add_option("--out", sela.out, "Output file (default stdout)");

  auto* synth_cmd = app.add_subcommand("synth", "Synthetic annotation generators");
  synth_cmd->require_subcommand(1);
  struct {
    std::string objects, out_gt, out_manifest;
    double canvas = 600, size = 128;
  } sudoku;
  auto* sudoku_cmd = synth_cmd->add_subcommand("sudoku", "Place objects on a 3x3 grid canvas");
  sudoku_cmd->add_option("--objects", sudoku.objects,
                         "JSON list of {id, category_id} (or {objects, categories})")
      ->required()
      ->check(CLI::ExistingFile);
  sudoku_cmd->add_option("--canvas", sudoku.canvas, "Canvas side, pixels")->capture_default_str();
  sudoku_cmd->add_option("--size", sudoku.size, "Object box side, pixels")->capture_default_str();
  sudoku_cmd->add_option("--out-gt", sudoku.out_gt, "COCO ground-truth output")->required();
  sudoku_cmd->add_option("--out-manifest", sudoku.out_manifest, "Placement manifest output");

  struct {
    std::string config, profile, partition = "annular:5", out_gt, out_dt, out_expected;
    std::uint64_t seed = 0;
    double center_bias = 0;
    int images = 0;
    int recall_points = 101;
  } bench;
  auto* bench_cmd =
      synth_cmd->add_subcommand("bench", "Benchmark with controlled per-zone detection quality");
  bench_cmd->add_option("--config", bench.config, "Dataset shape JSON")
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--profile", bench.profile, "Quality profile JSON")
      ->check(CLI::ExistingFile);
  auto* seed_opt = bench_cmd->add_option("--seed", bench.seed, "Random seed");
  auto* bias_opt =
      bench_cmd->add_option("--center-bias", bench.center_bias, "Concentrate objects centrally");
  bench_cmd->add_option("--images", bench.images, "Number of images");
  bench_cmd->add_option("--partition", bench.partition, "Partition the profile refers to")
      ->capture_default_str();
  bench_cmd->add_option("--recall-points", bench.recall_points,
                        "Interpolation points for the expected ZPs")
      ->capture_default_str();
  bench_cmd->add_option("--out-gt", bench.out_gt, "COCO ground-truth output")->required();
  bench_cmd->add_option("--out-dt", bench.out_dt, "COCO detections output")->required();
  bench_cmd->add_option("--out-expected", bench.out_expected, "Closed-form expected ZPs");

  struct {
    std::string features, pair = "train:in,train:out";
    int k = 9;
    double r = 32;
  } pd;
  auto* pd_cmd = app.add_subcommand("pattern-distance",
                                    "Scale- and category-aware feature-center distance");
  pd_cmd->add_option("--features", pd.features, "JSON lines of feature records")
      ->required()
      ->check(CLI::ExistingFile);
  pd_cmd->add_option("--pair", pd.pair, "Two groups, e.g. train:in,test:in")
      ->capture_default_str();
  pd_cmd->add_option("--K", pd.k, "Number of scale bins")->capture_default_str();
  pd_cmd->add_option("--r", pd.r, "Scale bin width, pixels")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    char* s = nullptr;
    if (app.got_subcommand("eval")) return run_eval(eval);

    if (app.got_subcommand("density")) {
      auto ds = load_dataset(density.gt);
      auto part = make_partition(density.partition);
      check(ze_object_density(ds.get(), part.get(), density.absolute ? 1 : 0,
                              parse_format(density.format), &s));
      OwnedString text(s);
      write_text(density.out, text.get());
      return kExitOk;
    }

    if (app.got_subcommand("counts")) {
      const auto [rows, cols] = parse_dims(counts.grid);
      auto ds = load_dataset(counts.gt);
      check(ze_center_counts_csv(ds.get(), rows, cols, &s));
      OwnedString text(s);
      write_text(counts.out, text.get());
      return kExitOk;
    }

    if (app.got_subcommand("correlate")) {
      const std::string heatmap = read_text(corr.heatmap);
      auto ds = load_dataset(corr.gt);
      check(ze_correlate_csv(heatmap.c_str(), ds.get(), &s));
      OwnedString text(s);
      write_text(corr.out, text.get());
      return kExitOk;
    }

    if (app.got_subcommand("sela")) {
      const auto [rows, cols] = parse_dims(sela.grid);
      std::vector<double> scales;
      std::stringstream list(sela.scales);
      for (std::string item; std::getline(list, item, ',');) {
        try {
          scales.push_back(std::stod(item));
        } catch (const std::logic_error&) {
          throw Failure{kExitInput, "--anchor-scales: not a number: '" + item + "'"};
        }
      }
      ze_assign_options opts;
      ze_assign_options_init(&opts);
      opts.grid_rows = rows;
      opts.grid_cols = cols;
      opts.scales = scales.data();
      opts.num_scales = scales.size();
      opts.t = sela.t;
      opts.gamma = sela.gamma;
      if (*beta_opt) {
        opts.use_beta = 1;
        opts.alpha_pos = sela.alpha_pos;
        opts.beta = sela.beta;
        opts.beta_zone = sela.beta_zone.c_str();
      }
      auto ds = load_dataset(sela.gt);
      auto part = make_partition(sela.partition);
      int warning = 0;
      check(ze_assignment_density(ds.get(), part.get(), &opts, sela.absolute ? 1 : 0,
                                  parse_format(sela.format), &s, &warning));
      OwnedString text(s);
      if (warning) {
        std::cerr << "warning: alpha_pos + beta > 1, no anchor inside the zone can be positive\n";
      }
      write_text(sela.out, text.get());
      return kExitOk;
    }

    if (sudoku_cmd->parsed()) {
      const std::string objects = read_text(sudoku.objects);
      char* manifest = nullptr;
      check(ze_synth_sudoku(objects.c_str(), sudoku.canvas, sudoku.size, &s,
                            sudoku.out_manifest.empty() ? nullptr : &manifest));
      OwnedString gt(s);
      OwnedString man(manifest);
      write_text(sudoku.out_gt, gt.get());
      if (man) write_text(sudoku.out_manifest, man.get());
      return kExitOk;
    }

    if (bench_cmd->parsed()) {
      const std::string config = bench.config.empty() ? "" : read_text(bench.config);
      const std::string profile = bench.profile.empty() ? "" : read_text(bench.profile);
      ze_bench_options opts;
      ze_bench_options_init(&opts);
      opts.config_json = config.c_str();
      opts.profile_json = profile.c_str();
      if (*seed_opt) {
        opts.has_seed = 1;
        opts.seed = bench.seed;
      }
      if (*bias_opt) {
        opts.has_center_bias = 1;
        opts.center_bias = bench.center_bias;
      }
      opts.images = bench.images;
      opts.recall_points = bench.recall_points;
      auto part = make_partition(bench.partition);
      char* dt = nullptr;
      char* expected = nullptr;
      check(ze_synth_bench(&opts, part.get(), &s, &dt,
                           bench.out_expected.empty() ? nullptr : &expected));
      OwnedString gt_text(s);
      OwnedString dt_text(dt);
      OwnedString expected_text(expected);
      write_text(bench.out_gt, gt_text.get());
      write_text(bench.out_dt, dt_text.get());
      if (expected_text) write_text(bench.out_expected, expected_text.get());
      return kExitOk;
    }

    if (app.got_subcommand("pattern-distance")) {
      const auto comma = pd.pair.find(',');
      if (comma == std::string::npos) {
        throw Failure{kExitInput, "--pair expects two groups, e.g. train:in,test:in"};
      }
      const std::string a = pd.pair.substr(0, comma);
      const std::string b = pd.pair.substr(comma + 1);
      double value = 0.0;
      check(ze_pattern_distance(pd.features.c_str(), a.c_str(), b.c_str(), pd.k, pd.r, &value));
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g\n", value);
      std::cout << buf;
      return kExitOk;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return kExitInput;
}
