#include <trunkgauge/trunkgauge.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csv.hpp"
#include "image_io.hpp"

namespace fs = std::filesystem;
using tgcli::format_double;

namespace {

/* ---------------------------------------------------------------- */
/* Plumbing                                                          */

struct CliError : std::runtime_error {
  int exit_code;
  CliError(int code, const std::string& message)
      : std::runtime_error(message), exit_code(code) {}
};

// 0 ok, 2 usage/input error, 3 training failure, 4 measurement failure.
int exit_for(tg_status status) {
  switch (status) {
    case TG_OK:
      return 0;
    case TG_ERROR_INVALID_ARGUMENT:
    case TG_ERROR_INSUFFICIENT_TRAINING_DATA:
    case TG_ERROR_PARSE:
      return 2;
    case TG_ERROR_DEGENERATE_DATA:
    case TG_ERROR_FIT_FAILURE:
      return 3;
    default:
      return 4;
  }
}

void check(tg_status status, const std::string& what) {
  if (status != TG_OK)
    throw CliError(exit_for(status),
                   what + ": " + std::string(tg_last_error()));
}

// CampaignRow status vocabulary.
std::string row_status(tg_status status) {
  switch (status) {
    case TG_OK:
      return "ok";
    case TG_ERROR_INVALID_ARGUMENT:
      return "invalid-argument";
    case TG_ERROR_DEGENERATE_DATA:
      return "degenerate-data";
    case TG_ERROR_FIT_FAILURE:
      return "fit-failure";
    case TG_ERROR_INSUFFICIENT_TRAINING_DATA:
      return "insufficient-training-data";
    case TG_ERROR_PADS_NOT_FOUND:
      return "pads-not-found";
    case TG_ERROR_AMBIGUOUS_AXIS:
      return "ambiguous-axis";
    case TG_ERROR_GEOMETRY:
      return "geometry-error";
    case TG_ERROR_PARSE:
      return "parse-error";
    default:
      return "unknown-error";
  }
}

template <typename T, void (*Destroy)(T*)>
class Handle {
 public:
  Handle() = default;
  explicit Handle(T* ptr) : ptr_(ptr) {}
  Handle(Handle&& other) noexcept : ptr_(other.ptr_) { other.ptr_ = nullptr; }
  Handle& operator=(Handle&& other) noexcept {
    if (this != &other) {
      reset();
      ptr_ = other.ptr_;
      other.ptr_ = nullptr;
    }
    return *this;
  }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { reset(); }

  void reset() {
    if (ptr_) Destroy(ptr_);
    ptr_ = nullptr;
  }
  T* get() const { return ptr_; }
  T** out() {
    reset();
    return &ptr_;
  }

 private:
  T* ptr_ = nullptr;
};

using ImagePtr = Handle<tg_image, tg_image_destroy>;
using MaskPtr = Handle<tg_mask, tg_mask_destroy>;
using ModelPtr = Handle<tg_classifier, tg_classifier_destroy>;

ImagePtr load_image(const fs::path& path) {
  const tgcli::ImageData data = tgcli::read_image(path.string());
  ImagePtr image;
  check(tg_image_create(data.width, data.height, data.rgb.data(), image.out()),
        path.string());
  return image;
}

MaskPtr load_mask(const fs::path& path) {
  const tgcli::ImageData data = tgcli::read_image(path.string());
  const auto labels = tgcli::rgb_to_mask_labels(data);
  MaskPtr mask;
  check(tg_mask_create(data.width, data.height, labels.data(), mask.out()),
        path.string());
  return mask;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(2, path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(2, path.string() + ": cannot open for writing");
  out << content;
  if (!out) throw CliError(2, path.string() + ": write failed");
}

ModelPtr load_model(const fs::path& path) {
  std::string json;
  try {
    json = read_text_file(path);
  } catch (const std::exception& e) {
    throw CliError(2, std::string("unreadable model: ") + e.what());
  }
  ModelPtr model;
  const tg_status st = tg_classifier_from_json(json.c_str(), model.out());
  if (st != TG_OK)
    throw CliError(2, "unreadable model " + path.string() + ": " +
                          std::string(tg_last_error()));
  return model;
}

bool has_image_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && has_image_extension(entry.path()))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  return files;
}

std::uint64_t splitmix_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/* ---------------------------------------------------------------- */
/* train                                                             */

struct TrainArgs {
  std::string images_dir, masks_dir, out_path;
  std::int32_t pads_modes = 2;
  std::int32_t bg_modes = 3;
  std::int64_t cap = 200000;
  double rel_tol = 1e-6;
  std::int32_t max_iters = 500;
  std::uint64_t seed = 0;
};

int cmd_train(const TrainArgs& args) {
  const auto image_files = list_images(args.images_dir);
  const auto mask_files = list_images(args.masks_dir);

  std::map<std::string, fs::path> masks_by_stem;
  for (const auto& m : mask_files) masks_by_stem[m.stem().string()] = m;
  std::map<std::string, fs::path> images_by_stem;
  for (const auto& i : image_files) images_by_stem[i.stem().string()] = i;

  std::vector<std::string> unmatched;
  for (const auto& [stem, path] : images_by_stem)
    if (!masks_by_stem.count(stem))
      unmatched.push_back("no mask for image: " + path.string());
  for (const auto& [stem, path] : masks_by_stem)
    if (!images_by_stem.count(stem))
      unmatched.push_back("no image for mask: " + path.string());
  if (!unmatched.empty()) {
    for (const auto& line : unmatched) std::cerr << line << "\n";
    throw CliError(2, "unmatched image/mask files");
  }
  if (images_by_stem.empty())
    throw CliError(2, "no images found in " + args.images_dir);

  std::vector<ImagePtr> images;
  std::vector<MaskPtr> masks;
  std::vector<const tg_image*> image_ptrs;
  std::vector<const tg_mask*> mask_ptrs;
  for (const auto& [stem, path] : images_by_stem) {
    images.push_back(load_image(path));
    masks.push_back(load_mask(masks_by_stem.at(stem)));
    image_ptrs.push_back(images.back().get());
    mask_ptrs.push_back(masks.back().get());
  }

  tg_train_config cfg;
  tg_train_config_init(&cfg);
  cfg.pads_modes = args.pads_modes;
  cfg.background_modes = args.bg_modes;
  cfg.cap_per_class = args.cap;
  cfg.rel_tol = args.rel_tol;
  cfg.max_iters = args.max_iters;
  cfg.seed = args.seed;

  ModelPtr model;
  check(tg_train(image_ptrs.data(), mask_ptrs.data(),
                 static_cast<std::int32_t>(image_ptrs.size()), &cfg,
                 model.out()),
        "training");

  const char* class_names[2] = {"pads", "background"};
  const std::int32_t modes[2] = {args.pads_modes, args.bg_modes};
  for (std::int32_t c = 0; c < 2; ++c) {
    tg_fit_info info;
    check(tg_classifier_fit_info(model.get(), c, &info), "fit info");
    std::cout << class_names[c] << ": modes=" << modes[c] << " points="
              << info.points_used << "/" << info.points_total
              << " iters=" << info.iterations
              << " converged=" << (info.converged ? "yes" : "no")
              << " reinits=" << info.reinitializations
              << " logL=" << format_double(info.final_log_likelihood) << "\n";
  }

  char* json = nullptr;
  check(tg_classifier_to_json(model.get(), &json), "serializing model");
  const std::string text(json);
  tg_string_destroy(json);
  write_text_file(args.out_path, text);
  std::cout << "wrote model: " << args.out_path << "\n";
  return 0;
}

/* ---------------------------------------------------------------- */
/* segment                                                           */

struct SegmentArgs {
  std::string model_path, image_path, out_path;
};

int cmd_segment(const SegmentArgs& args) {
  ModelPtr model = load_model(args.model_path);
  ImagePtr image = load_image(args.image_path);
  MaskPtr mask;
  check(tg_classify_image(model.get(), image.get(), mask.out()),
        "segmentation");
  tgcli::write_png_gray(args.out_path, tg_mask_width(mask.get()),
                        tg_mask_height(mask.get()),
                        tg_mask_pixels_const(mask.get()));
  std::cout << "wrote mask: " << args.out_path << "\n";
  return 0;
}

/* ---------------------------------------------------------------- */
/* measure                                                           */

struct MeasureArgs {
  std::string model_path, input_path, out_path;
  double pad_height_mm = 0;
  std::int32_t scanlines = 50;
  bool no_trim = false;
  double min_area_frac = 0.0005;
};

int cmd_measure(const MeasureArgs& args) {
  ModelPtr model = load_model(args.model_path);
  if (!(args.pad_height_mm > 0))
    throw CliError(2, "--pad-height-mm must be positive");

  std::vector<fs::path> inputs;
  if (fs::is_directory(args.input_path)) {
    inputs = list_images(args.input_path);
    if (inputs.empty())
      throw CliError(2, "no images found in " + args.input_path);
  } else {
    inputs.push_back(args.input_path);
  }

  tg_measure_config cfg;
  tg_measure_config_init(&cfg);
  cfg.stations = args.scanlines;
  cfg.trim_enabled = args.no_trim ? 0 : 1;
  cfg.min_area_frac = args.min_area_frac;

  std::ofstream out(args.out_path, std::ios::binary);
  if (!out) throw CliError(2, args.out_path + ": cannot open for writing");
  tgcli::write_csv_row(out, {"image_id", "status", "gap_px", "pad_height_px",
                             "pad_height_mm", "diameter_mm", "samples_used",
                             "samples_trimmed"});

  std::size_t ok_count = 0;
  for (const auto& path : inputs) {
    const std::string id = path.stem().string();
    std::string status;
    tg_measurement m{};
    try {
      ImagePtr image = load_image(path);
      const tg_status st = tg_measure_image(model.get(), image.get(),
                                            args.pad_height_mm, &cfg, &m);
      status = row_status(st);
      if (st != TG_OK)
        std::cerr << id << ": " << tg_last_error() << "\n";
    } catch (const std::exception& e) {
      status = "read-error";
      std::cerr << id << ": " << e.what() << "\n";
    }
    if (status == "ok") {
      ++ok_count;
      tgcli::write_csv_row(
          out, {id, status, format_double(m.gap_px),
                format_double(m.pad_height_px), format_double(m.pad_height_mm),
                format_double(m.diameter_mm), std::to_string(m.samples_used),
                std::to_string(m.samples_trimmed)});
    } else {
      tgcli::write_csv_row(out, {id, status, "", "", "", "", "", ""});
    }
  }
  out.flush();
  if (!out) throw CliError(2, args.out_path + ": write failed");

  std::cout << "measured " << ok_count << "/" << inputs.size() << " ok -> "
            << args.out_path << "\n";
  return ok_count == 0 ? 4 : 0;
}

/* ---------------------------------------------------------------- */
/* evaluate                                                          */

struct EvaluateArgs {
  std::string pred_path, ref_path, out_path, rounds_path;
  double hist_bin = 0.2;
};

int cmd_evaluate(const EvaluateArgs& args) {
  const tgcli::CsvTable pred = tgcli::read_csv(args.pred_path);
  const tgcli::CsvTable ref = tgcli::read_csv(args.ref_path);

  const int pred_id = pred.require_column("image_id");
  const int pred_status = pred.column("status");
  const int pred_diam = pred.require_column("diameter_mm");
  const int ref_id = ref.require_column("image_id");
  const int ref_status = ref.column("status");
  const int ref_diam = ref.require_column("diameter_mm");

  std::map<std::string, double> ref_by_id;
  for (std::size_t r = 0; r < ref.rows.size(); ++r) {
    if (ref_status >= 0 && ref.cell(r, ref_status) != "ok") continue;
    const std::string& id = ref.cell(r, ref_id);
    if (ref_by_id.count(id))
      throw CliError(2, "duplicate image_id in reference: " + id);
    ref_by_id[id] = tgcli::parse_double(ref.cell(r, ref_diam));
  }

  std::vector<std::string> ids;
  std::vector<double> measured, reference, abs_errors;
  std::size_t failed_rows = 0;
  for (std::size_t r = 0; r < pred.rows.size(); ++r) {
    if (pred_status >= 0 && pred.cell(r, pred_status) != "ok") {
      ++failed_rows;
      continue;
    }
    const std::string& id = pred.cell(r, pred_id);
    const auto it = ref_by_id.find(id);
    if (it == ref_by_id.end())
      throw CliError(2, "identifier mismatch: '" + id +
                            "' not present in reference file");
    ids.push_back(id);
    measured.push_back(tgcli::parse_double(pred.cell(r, pred_diam)));
    reference.push_back(it->second);
    abs_errors.push_back(std::fabs(measured.back() - reference.back()));
  }
  if (measured.empty()) throw CliError(2, "no ok rows to evaluate");
  const auto n = static_cast<std::int64_t>(measured.size());

  tg_error_stats stats;
  check(tg_compute_error_stats(measured.data(), reference.data(), n, &stats),
        "error stats");

  std::ostringstream report;
  report << "measurements: " << stats.count << "\n";
  report << "failed_rows_excluded: " << failed_rows << "\n";
  report << "mean_abs_error_mm: " << format_double(stats.mean_abs) << "\n";
  report << "std_abs_error_mm: " << format_double(stats.std_abs) << "\n";
  report << "max_abs_error_mm: " << format_double(stats.max_abs) << "\n";
  for (const double threshold : {0.1, 0.2, 0.5, 1.0}) {
    double fraction = 0;
    check(tg_fraction_below(measured.data(), reference.data(), n, threshold,
                            &fraction),
          "fraction below");
    report << "fraction_below_" << format_double(threshold)
           << "mm: " << format_double(fraction) << "\n";
  }

  std::int32_t bins = 0;
  check(tg_error_histogram(abs_errors.data(), n, args.hist_bin, nullptr, 0,
                           &bins),
        "histogram");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
  check(tg_error_histogram(abs_errors.data(), n, args.hist_bin, counts.data(),
                           bins, &bins),
        "histogram");
  report << "histogram_bin_mm: " << format_double(args.hist_bin) << "\n";
  for (std::int32_t b = 0; b < bins; ++b) {
    char lo[32], hi[32];
    std::snprintf(lo, sizeof(lo), "%.6g", args.hist_bin * b);
    std::snprintf(hi, sizeof(hi), "%.6g", args.hist_bin * (b + 1));
    report << "  [" << lo << "," << hi
           << "): " << counts[static_cast<std::size_t>(b)] << "\n";
  }

  if (!args.rounds_path.empty()) {
    const tgcli::CsvTable rounds = tgcli::read_csv(args.rounds_path);
    const int rid = rounds.require_column("image_id");
    const int rlabel = rounds.require_column("round");
    std::map<std::string, std::string> round_of;
    for (std::size_t r = 0; r < rounds.rows.size(); ++r)
      round_of[rounds.cell(r, rid)] = rounds.cell(r, rlabel);

    // Group evaluated pairs by round label, first-appearance order.
    std::vector<std::string> labels;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
        groups;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto it = round_of.find(ids[i]);
      if (it == round_of.end())
        throw CliError(2, "identifier mismatch: '" + ids[i] +
                              "' not present in rounds file");
      if (!groups.count(it->second)) labels.push_back(it->second);
      auto& g = groups[it->second];
      g.first.push_back(measured[i]);
      g.second.push_back(reference[i]);
    }

    struct RoundRow {
      std::string label;
      tg_error_stats stats;
    };
    std::vector<RoundRow> table;
    for (const auto& label : labels) {
      const auto& g = groups.at(label);
      tg_error_stats rs;
      check(tg_compute_error_stats(g.first.data(), g.second.data(),
                                   static_cast<std::int64_t>(g.first.size()),
                                   &rs),
            "round stats");
      table.push_back({label, rs});
    }
    std::stable_sort(table.begin(), table.end(),
                     [](const RoundRow& a, const RoundRow& b) {
                       if (a.stats.mean_abs != b.stats.mean_abs)
                         return a.stats.mean_abs > b.stats.mean_abs;
                       return a.stats.std_abs > b.stats.std_abs;
                     });
    report << "rounds:\n";
    for (const auto& row : table)
      report << "  " << row.label << ": n=" << row.stats.count
             << " mean_abs=" << format_double(row.stats.mean_abs)
             << " std_abs=" << format_double(row.stats.std_abs)
             << " max_abs=" << format_double(row.stats.max_abs) << "\n";
  }

  write_text_file(args.out_path, report.str());
  std::cout << "wrote report: " << args.out_path << "\n";
  return 0;
}

/* ---------------------------------------------------------------- */
/* synth                                                             */

struct SynthArgs {
  std::int32_t count = 0;
  std::string out_dir;
  double gap_px = 300;
  double pad_h_px = 200;
  double tilt_deg = 0;
  double edge_jitter = 0;
  double brightness = 1.0;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& args) {
  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "masks");

  tg_scene_spec spec;
  tg_scene_spec_init(&spec);
  spec.gap_px = args.gap_px;
  spec.pad_height_px = args.pad_h_px;
  spec.tilt_deg = args.tilt_deg;
  spec.edge_jitter_px = args.edge_jitter;
  spec.brightness = args.brightness;

  std::ofstream manifest(out_dir / "manifest.csv", std::ios::binary);
  if (!manifest)
    throw CliError(2, (out_dir / "manifest.csv").string() +
                          ": cannot open for writing");
  tgcli::write_csv_row(manifest,
                       {"image_id", "seed", "gap_px", "pad_height_px",
                        "pad_height_mm", "diameter_mm", "tilt_deg",
                        "edge_jitter_px", "brightness"});

  std::uint64_t stream = args.seed;
  for (std::int32_t i = 0; i < args.count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04d", i);
    spec.seed = splitmix_next(stream);

    ImagePtr image;
    MaskPtr mask;
    tg_scene_truth truth;
    check(tg_synth_scene(&spec, image.out(), mask.out(), &truth),
          std::string(name));

    tgcli::write_png_rgb((out_dir / "images" / (std::string(name) + ".png")).string(),
                         tg_image_width(image.get()),
                         tg_image_height(image.get()),
                         tg_image_pixels_const(image.get()));
    tgcli::write_png_gray((out_dir / "masks" / (std::string(name) + ".png")).string(),
                          tg_mask_width(mask.get()),
                          tg_mask_height(mask.get()),
                          tg_mask_pixels_const(mask.get()));
    tgcli::write_csv_row(
        manifest,
        {name, std::to_string(spec.seed), format_double(truth.gap_px),
         format_double(truth.pad_height_px),
         format_double(truth.pad_height_mm), format_double(truth.diameter_mm),
         format_double(spec.tilt_deg), format_double(spec.edge_jitter_px),
         format_double(spec.brightness)});
  }
  manifest.flush();
  if (!manifest)
    throw CliError(2, (out_dir / "manifest.csv").string() + ": write failed");

  std::cout << "wrote " << args.count << " scenes -> " << args.out_dir << "\n";
  return 0;
}

/* ---------------------------------------------------------------- */
/* luminosity                                                        */

struct LuminosityArgs {
  std::string bright_dir, dim_dir, out_path;
  std::int32_t train_count = 4;
  std::uint64_t seed = 0;
};

struct SceneSet {
  std::vector<ImagePtr> images;
  std::vector<MaskPtr> masks;
  std::vector<const tg_image*> image_ptrs;
  std::vector<const tg_mask*> mask_ptrs;
  std::vector<double> pad_height_mm;
};

SceneSet load_scene_set(const fs::path& dir) {
  tgcli::CsvTable manifest;
  try {
    manifest = tgcli::read_csv((dir / "manifest.csv").string());
  } catch (const std::exception& e) {
    throw CliError(2, e.what());
  }
  const int id_col = manifest.require_column("image_id");
  const int mm_col = manifest.require_column("pad_height_mm");

  SceneSet set;
  for (std::size_t r = 0; r < manifest.rows.size(); ++r) {
    const std::string& id = manifest.cell(r, id_col);
    set.images.push_back(load_image(dir / "images" / (id + ".png")));
    set.masks.push_back(load_mask(dir / "masks" / (id + ".png")));
    set.pad_height_mm.push_back(tgcli::parse_double(manifest.cell(r, mm_col)));
  }
  for (const auto& i : set.images) set.image_ptrs.push_back(i.get());
  for (const auto& m : set.masks) set.mask_ptrs.push_back(m.get());
  return set;
}

int cmd_luminosity(const LuminosityArgs& args) {
  const SceneSet bright = load_scene_set(args.bright_dir);
  const SceneSet dim = load_scene_set(args.dim_dir);

  const auto count_a = static_cast<std::int32_t>(bright.images.size());
  const auto count_b = static_cast<std::int32_t>(dim.images.size());
  if (count_a <= args.train_count || count_b <= args.train_count)
    throw CliError(2, "insufficient scenes: need more than " +
                          std::to_string(args.train_count) +
                          " per condition, got " + std::to_string(count_a) +
                          " bright and " + std::to_string(count_b) + " dim");

  tg_train_config train_cfg;
  tg_train_config_init(&train_cfg);
  tg_measure_config measure_cfg;
  tg_measure_config_init(&measure_cfg);

  tg_condition_row rows[2];
  check(tg_luminosity_experiment(
            bright.image_ptrs.data(), bright.mask_ptrs.data(),
            bright.pad_height_mm.data(), count_a, dim.image_ptrs.data(),
            dim.mask_ptrs.data(), dim.pad_height_mm.data(), count_b,
            args.train_count, &train_cfg, &measure_cfg, args.seed, rows,
            nullptr, nullptr, nullptr, nullptr),
        "luminosity experiment");

  std::ofstream out(args.out_path, std::ios::binary);
  if (!out) throw CliError(2, args.out_path + ": cannot open for writing");
  tgcli::write_csv_row(out, {"condition", "tests", "pairs", "failures",
                             "mean_abs_diff_mm", "std_abs_diff_mm"});
  const char* names[2] = {"bright", "dim"};
  for (int c = 0; c < 2; ++c) {
    tgcli::write_csv_row(
        out, {names[c], std::to_string(rows[c].tests),
              std::to_string(rows[c].pairs), std::to_string(rows[c].failures),
              format_double(rows[c].mean_abs_diff_mm),
              format_double(rows[c].std_abs_diff_mm)});
    std::cout << names[c] << ": tests=" << rows[c].tests
              << " pairs=" << rows[c].pairs << " failures=" << rows[c].failures
              << " mean_abs_diff_mm=" << format_double(rows[c].mean_abs_diff_mm)
              << " std_abs_diff_mm=" << format_double(rows[c].std_abs_diff_mm)
              << "\n";
  }
  out.flush();
  if (!out) throw CliError(2, args.out_path + ": write failed");
  std::cout << "wrote table: " << args.out_path << "\n";
  return 0;
}

}  // namespace

/* ------------------------------------------------------------------ */

int main(int argc, char** argv) {
  CLI::App app{"trunkgauge: trunk diameter from clamp photographs"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand(
      "train", "Fit the pads/background color classifier from labeled images");
  train->add_option("--images", train_args.images_dir, "Directory of training images")
      ->required()
      ->check(CLI::ExistingDirectory);
  train->add_option("--masks", train_args.masks_dir,
                    "Directory of masks with matching basenames")
      ->required()
      ->check(CLI::ExistingDirectory);
  train->add_option("--out", train_args.out_path, "Output model JSON path")
      ->required();
  train->add_option("--pads-modes", train_args.pads_modes, "Pads mixture size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--bg-modes", train_args.bg_modes, "Background mixture size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--cap", train_args.cap, "Training pixel cap per class")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--rel-tol", train_args.rel_tol, "EM convergence tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--max-iters", train_args.max_iters, "EM iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--seed", train_args.seed, "RNG seed")
      ->capture_default_str();

  SegmentArgs segment_args;
  auto* segment =
      app.add_subcommand("segment", "Write the pads mask for one image");
  segment->add_option("--model", segment_args.model_path, "Model JSON path")
      ->required()
      ->check(CLI::ExistingFile);
  segment->add_option("--image", segment_args.image_path, "Input image")
      ->required()
      ->check(CLI::ExistingFile);
  segment->add_option("--out", segment_args.out_path, "Output mask PNG")
      ->required();

  MeasureArgs measure_args;
  auto* measure = app.add_subcommand(
      "measure", "Measure trunk diameter for an image or a directory");
  measure->add_option("--model", measure_args.model_path, "Model JSON path")
      ->required()
      ->check(CLI::ExistingFile);
  measure->add_option("--input", measure_args.input_path,
                      "Image file or directory of images")
      ->required()
      ->check(CLI::ExistingPath);
  measure
      ->add_option("--pad-height-mm", measure_args.pad_height_mm,
                   "True pad height in millimeters (calibration)")
      ->required()
      ->check(CLI::PositiveNumber);
  measure->add_option("--scanlines", measure_args.scanlines,
                      "Edge sampling stations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  measure->add_flag("--no-trim", measure_args.no_trim,
                    "Disable MAD outlier trimming (plain mean)");
  measure
      ->add_option("--min-area-frac", measure_args.min_area_frac,
                   "Minimum pad area as a fraction of image pixels")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  measure->add_option("--out", measure_args.out_path, "Output results CSV")
      ->required();

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Compare measured diameters against reference values");
  evaluate->add_option("--pred", evaluate_args.pred_path, "Measured CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate
      ->add_option("--ref", evaluate_args.ref_path,
                   "Reference CSV (e.g. a generator manifest)")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate
      ->add_option("--hist-bin", evaluate_args.hist_bin,
                   "Histogram bin width in mm")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate
      ->add_option("--rounds", evaluate_args.rounds_path,
                   "Optional CSV mapping image_id to a round label")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--out", evaluate_args.out_path, "Output report path")
      ->required();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand(
      "synth", "Generate synthetic clamp scenes with ground truth");
  synth->add_option("--count", synth_args.count, "Number of scenes")
      ->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--out", synth_args.out_dir, "Output directory")
      ->required();
  synth->add_option("--gap-px", synth_args.gap_px, "True pad gap in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--pad-h-px", synth_args.pad_h_px, "Pad height in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth
      ->add_option("--tilt-deg", synth_args.tilt_deg,
                   "Clamp tilt in degrees, applied to every scene")
      ->capture_default_str();
  synth
      ->add_option("--edge-jitter", synth_args.edge_jitter,
                   "Inner-edge jitter amplitude in pixels")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth->add_option("--brightness", synth_args.brightness, "Brightness factor")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "Batch RNG seed")
      ->capture_default_str();

  LuminosityArgs luminosity_args;
  auto* luminosity = app.add_subcommand(
      "luminosity",
      "Cross-condition robustness table from two generated scene sets");
  luminosity
      ->add_option("--bright", luminosity_args.bright_dir,
                   "Bright-condition scene directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  luminosity
      ->add_option("--dim", luminosity_args.dim_dir,
                   "Dim-condition scene directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  luminosity
      ->add_option("--train-count", luminosity_args.train_count,
                   "Training scenes per condition")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  luminosity->add_option("--out", luminosity_args.out_path, "Output table CSV")
      ->required();
  luminosity->add_option("--seed", luminosity_args.seed, "Split/RNG seed")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(train)) return cmd_train(train_args);
    if (app.got_subcommand(segment)) return cmd_segment(segment_args);
    if (app.got_subcommand(measure)) return cmd_measure(measure_args);
    if (app.got_subcommand(evaluate)) return cmd_evaluate(evaluate_args);
    if (app.got_subcommand(synth)) return cmd_synth(synth_args);
    if (app.got_subcommand(luminosity)) return cmd_luminosity(luminosity_args);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
