#include "egotext/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>
#include <opencv2/imgproc.hpp>
#include <opencv2/videoio.hpp>

#include "egotext/analysis.hpp"
#include "egotext/csv.hpp"
#include "egotext/dataset.hpp"
#include "egotext/error.hpp"
#include "egotext/fsutil.hpp"
#include "egotext/photometry.hpp"

#ifndef EGOTEXT_VERSION
#define EGOTEXT_VERSION "0.0.0"
#endif

namespace egotext {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view version() { return EGOTEXT_VERSION; }

json CommandReport::to_json(std::string_view command) const {
  return {{"command", command}, {"status", "ok"}, {"items", items}, {"warnings", warnings.size()},
          {"outputs", outputs}};
}

std::string error_json(std::string_view kind, int exit_code, std::string_view message) {
  return json{{"error", {{"kind", kind}, {"exit_code", exit_code}, {"message", message}}}}.dump();
}

namespace {

json box_json(const Box& b) { return json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

json region_json(const TextRegion& r) {
  json j = {{"box", box_json(r.box)},
            {"text", r.text},
            {"detection_confidence", r.detection_confidence},
            {"recognition_confidence", r.recognition_confidence}};
  if (r.error) j["error"] = r.error_message.empty() ? "recognizer failed" : r.error_message;
  if (r.truncated) j["truncated"] = true;
  return j;
}

json provenance(std::string_view command, const RunConfig& config, const Detector& det, const Recognizer& rec) {
  return {{"tool", "egotext"},
          {"version", version()},
          {"command", command},
          {"seed", config.seed},
          {"engines", {{"detector", det.name()}, {"recognizer", rec.name()}}},
          {"opencv", CV_VERSION},
          {"config", run_config_to_json(config)}};
}

std::shared_ptr<MockLibrary> mock_library(std::span<const GroundTruthEntry> entries, const RunConfig& config) {
  auto lib = std::make_shared<MockLibrary>();
  for (const GroundTruthEntry& e : entries) {
    MockSpec s;
    s.ground_truth = e.regions;
    s.drop_rate = config.detector.drop_rate;
    s.jitter_px = config.detector.jitter_px;
    s.char_error_rate = config.recognizer.char_error_rate;
    s.alphabet = config.recognizer.alphabet;
    s.seed = config.seed;
    (*lib)[e.id] = std::move(s);
  }
  return lib;
}

struct Engines {
  std::shared_ptr<Detector> detector;
  std::shared_ptr<Recognizer> recognizer;
};

Engines make_engines(const RunConfig& config, std::shared_ptr<const MockLibrary> lib) {
  Engines e{make_detector(config.detector, lib), make_recognizer(config.recognizer, lib)};
  if (!e.detector->reentrant()) e.detector = std::make_shared<SerializedDetector>(e.detector);
  if (!e.recognizer->reentrant()) e.recognizer = std::make_shared<SerializedRecognizer>(e.recognizer);
  return e;
}

// Calls fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

std::string describe(const std::exception& e) { return e.what(); }

}  // namespace

CommandReport synth_command(const fs::path& spec_path, const fs::path& out_dir) {
  if (!fs::exists(spec_path)) throw ConfigError("spec file not found: " + spec_path.string());
  json doc;
  try {
    doc = json::parse(read_file(spec_path));
  } catch (const json::parse_error& e) {
    throw ConfigError("spec " + spec_path.string() + ": " + e.what());
  }
  const auto entries = generate_synthetic(synthetic_spec_from_json(doc), out_dir);
  CommandReport report;
  report.items = entries.size();
  report.outputs = {(out_dir / "manifest.json").string(), (out_dir / "images").string()};
  return report;
}

CommandReport stats_command(const fs::path& manifest, const fs::path& out_csv) {
  const auto entries = load_manifest(manifest);
  struct Row {
    std::optional<LightingStats> stats;
    int width = 0;
    int height = 0;
    std::string error;
  };
  std::vector<Row> rows(entries.size());
  parallel_for(entries.size(), 0, [&](std::size_t i) {
    try {
      const Image img = load_image(entries[i].image_path);
      rows[i] = {lighting_stats(img), img.width(), img.height(), {}};
    } catch (const std::exception& e) {
      rows[i].error = describe(e);
    }
  });
  CommandReport report;
  std::string csv = "image_id,width,height,mean_brightness,std_brightness,global_luminance,contrast,error\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    csv += csv_field(entries[i].id);
    if (r.stats) {
      csv += "," + std::to_string(r.width) + "," + std::to_string(r.height) + "," +
             format_double(r.stats->mean_brightness) + "," + format_double(r.stats->std_brightness) + "," +
             format_double(r.stats->global_luminance) + "," + format_double(r.stats->contrast) + ",\n";
    } else {
      csv += ",,,,,,," + csv_field(r.error) + "\n";
      report.warnings.push_back(entries[i].id + ": " + r.error);
    }
  }
  if (out_csv.has_parent_path()) fs::create_directories(out_csv.parent_path());
  write_file_atomic(out_csv, csv);
  report.items = entries.size();
  report.outputs = {out_csv.string()};
  return report;
}

CommandReport run_command(const fs::path& manifest, const fs::path& config_path, const fs::path& out_dir,
                          const RunOptions& options) {
  const RunConfig config = load_run_config(config_path);
  const auto entries = load_manifest(manifest);
  const Engines engines = make_engines(config, mock_library(entries, config));
  const PipelineOptions pipeline = config.pipeline_options();

  struct Outcome {
    EvalRecord record;
    std::vector<TextRegion> regions;
    int recognizer_failures = 0;
    std::string error;
  };
  std::vector<Outcome> out(entries.size());
  parallel_for(entries.size(), options.jobs, [&](std::size_t i) {
    const GroundTruthEntry& e = entries[i];
    Outcome& o = out[i];
    o.record = e.skeleton();
    try {
      Frame frame{load_image(e.image_path), e.id};
      o.record.lighting = lighting_stats(frame.image);
      PipelineResult res = run_pipeline(frame, *engines.detector, *engines.recognizer, pipeline);
      auto [det, rec] = score_regions(e.regions, res.regions, config.iou_threshold, config.normalization);
      o.record.detection = det;
      o.record.recognition = rec;
      o.regions = std::move(res.regions);
      o.recognizer_failures = res.recognizer_failures;
    } catch (const EngineUnavailable&) {
      throw;
    } catch (const std::exception& e2) {
      o.error = describe(e2);
    }
  });

  CommandReport report;
  std::vector<EvalRecord> records;
  json predictions = json::array();
  json failures = json::array();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Outcome& o = out[i];
    records.push_back(o.record);
    json regions = json::array();
    for (const TextRegion& r : o.regions) regions.push_back(region_json(r));
    json item = {{"image_id", entries[i].id}, {"regions", regions}};
    if (!o.error.empty()) {
      item["error"] = o.error;
      report.warnings.push_back(entries[i].id + ": " + o.error);
      failures.push_back({{"image_id", entries[i].id}, {"error", o.error}});
    } else if (o.recognizer_failures > 0) {
      report.warnings.push_back(entries[i].id + ": " + std::to_string(o.recognizer_failures) +
                                " recognizer failure(s)");
    }
    predictions.push_back(std::move(item));
  }

  json run = provenance("run", config, *engines.detector, *engines.recognizer);
  run["manifest"] = manifest.generic_string();
  run["images"] = entries.size();
  run["failures"] = failures;

  json summary = json::object();
  std::vector<EvalRecord> scored;
  std::copy_if(records.begin(), records.end(), std::back_inserter(scored),
               [](const EvalRecord& r) { return r.detection.has_value(); });
  if (!scored.empty()) {
    const AggregateSummary agg = aggregate(scored);
    summary["count"] = agg.count;
    for (const auto& [name, s] : agg.metrics) {
      summary["metrics"][name] = {{"mean", s.mean}, {"median", s.median}, {"min", s.min}, {"max", s.max}};
    }
    if (agg.pooled_cer) summary["pooled_cer"] = *agg.pooled_cer;
  } else {
    summary["count"] = 0;
  }

  fs::create_directories(out_dir);
  write_file_atomic(out_dir / "records.csv", records_to_csv(records));
  write_file_atomic(out_dir / "predictions.json", predictions.dump(2) + "\n");
  write_file_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
  write_file_atomic(out_dir / "run.json", run.dump(2) + "\n");
  report.items = entries.size();
  for (const char* f : {"run.json", "records.csv", "predictions.json", "summary.json"}) {
    report.outputs.push_back((out_dir / f).string());
  }
  return report;
}

namespace {

struct FrameSource {
  std::vector<FrameEntry> entries;
  std::vector<cv::Mat> decoded;  // filled for video input, parallel to entries
};

FrameSource open_frames(const fs::path& frames, double fps) {
  FrameSource src;
  if (fs::is_directory(frames)) {
    src.entries = load_frame_index(frames / "frames.csv");
    return src;
  }
  if (!fs::exists(frames)) throw DataError("frames not found: " + frames.string());
  if (frames.extension() == ".csv") {
    src.entries = load_frame_index(frames);
    return src;
  }
  cv::VideoCapture cap(frames.string());
  if (!cap.isOpened()) throw DataError("cannot open video: " + frames.string());
  cv::Mat m;
  for (std::int64_t i = 0; cap.read(m); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "frame_%06lld", static_cast<long long>(i));
    const auto ts = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * 1e9 / fps));
    src.entries.push_back({id, ts, frames});
    cv::Mat bgr;
    if (m.channels() == 4) {
      cv::cvtColor(m, bgr, cv::COLOR_BGRA2BGR);
    } else {
      bgr = m.clone();
    }
    src.decoded.push_back(std::move(bgr));
  }
  if (src.entries.empty()) throw DataError("video has no frames: " + frames.string());
  return src;
}

}  // namespace

CommandReport gaze_run_command(const fs::path& frames, const fs::path& gaze_csv, const fs::path& config_path,
                               const fs::path& out_dir, const GazeRunOptions& options) {
  const RunConfig config = load_run_config(config_path);
  const FrameSource src = open_frames(frames, config.gaze.video_fps);
  const auto track = load_gaze_csv(gaze_csv);
  for (std::size_t i = 1; i < track.size(); ++i) {
    if (track[i].timestamp_ns <= track[i - 1].timestamp_ns) {
      throw DataError(gaze_csv.string() + ": timestamps must be strictly increasing");
    }
  }

  std::vector<GroundTruthEntry> gt;
  CommandReport report;
  if (options.ground_truth) {
    GroundTruthFile file = load_ground_truth(*options.ground_truth);
    for (const EntryError& err : file.errors) {
      report.warnings.push_back("ground truth entry " + std::to_string(err.entry) + ": " + err.message);
    }
    gt = std::move(file.entries);
  }
  const Engines engines = make_engines(config, mock_library(gt, config));
  const PipelineOptions pipeline = config.pipeline_options();

  std::vector<FrameStamp> stamps;
  for (const FrameEntry& f : src.entries) stamps.push_back({f.frame_id, f.timestamp_ns});
  const auto aligned = align_gaze(stamps, track, config.gaze.tolerance_ns);

  struct Outcome {
    std::optional<GazeRunResult> result;
    int frame_w = 0;
    int frame_h = 0;
    std::string error;
  };
  std::vector<Outcome> out(src.entries.size());
  parallel_for(src.entries.size(), 0, [&](std::size_t i) {
    Outcome& o = out[i];
    try {
      Frame frame{src.decoded.empty() ? load_image(src.entries[i].path) : Image(src.decoded[i]),
                  src.entries[i].frame_id};
      o.frame_w = frame.image.width();
      o.frame_h = frame.image.height();
      if (!aligned[i].gaze) return;
      o.result = gaze_run(frame, *aligned[i].gaze, config.gaze.roi, *engines.detector, *engines.recognizer,
                          pipeline);
    } catch (const EngineUnavailable&) {
      throw;
    } catch (const std::exception& e) {
      o.error = describe(e);
    }
  });

  std::string csv =
      "frame_id,timestamp_ns,gaze_x_px,gaze_y_px,window_x_min,window_y_min,window_x_max,window_y_max,"
      "detector_pixels,frame_pixels,regions,status\n";
  json frames_json = json::array();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Outcome& o = out[i];
    const FrameEntry& f = src.entries[i];
    std::string status = "ok";
    if (!o.error.empty()) {
      status = "error";
      report.warnings.push_back(f.frame_id + ": " + o.error);
    } else if (!aligned[i].gaze) {
      status = "no_gaze";
    }
    csv += csv_field(f.frame_id) + "," + std::to_string(f.timestamp_ns) + ",";
    json item = {{"frame_id", f.frame_id}, {"timestamp_ns", f.timestamp_ns}, {"status", status}};
    if (aligned[i].gaze) {
      csv += format_double(aligned[i].gaze->x) + "," + format_double(aligned[i].gaze->y) + ",";
      item["gaze"] = {aligned[i].gaze->x, aligned[i].gaze->y};
    } else {
      csv += ",,";
    }
    if (o.result) {
      const Box& w = o.result->window;
      csv += format_double(w.x_min) + "," + format_double(w.y_min) + "," + format_double(w.x_max) + "," +
             format_double(w.y_max) + "," + std::to_string(o.result->detector_pixels) + ",";
      json regions = json::array();
      for (const TextRegion& r : o.result->regions) regions.push_back(region_json(r));
      item["window"] = box_json(w);
      item["detector_pixels"] = o.result->detector_pixels;
      item["regions"] = regions;
    } else {
      csv += ",,,,,";
    }
    csv += std::to_string(static_cast<std::int64_t>(o.frame_w) * o.frame_h) + "," +
           std::to_string(o.result ? o.result->regions.size() : 0) + "," + status + "\n";
    if (!o.error.empty()) item["error"] = o.error;
    frames_json.push_back(std::move(item));
  }

  json run = provenance("gaze-run", config, *engines.detector, *engines.recognizer);
  run["frames"] = frames.generic_string();
  run["gaze"] = gaze_csv.generic_string();
  run["frame_count"] = src.entries.size();
  if (options.ground_truth) run["ground_truth"] = options.ground_truth->generic_string();

  fs::create_directories(out_dir);
  write_file_atomic(out_dir / "gaze_frames.csv", csv);
  write_file_atomic(out_dir / "gaze_regions.json", frames_json.dump(2) + "\n");
  write_file_atomic(out_dir / "run.json", run.dump(2) + "\n");
  report.items = src.entries.size();
  for (const char* f : {"run.json", "gaze_frames.csv", "gaze_regions.json"}) {
    report.outputs.push_back((out_dir / f).string());
  }
  return report;
}

CommandReport analyze_command(const fs::path& records_csv, const fs::path& out_dir) {
  const auto records = load_records_csv(records_csv);
  const Analyses analyses = analyze(records);
  CommandReport report;
  for (const fs::path& p : emit_report(records, analyses, out_dir)) report.outputs.push_back(p.string());
  report.items = records.size();
  return report;
}

}  // namespace egotext
