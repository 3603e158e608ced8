#include "egotext/config.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "egotext/error.hpp"
#include "egotext/fsutil.hpp"

namespace egotext {

using nlohmann::json;

namespace {

// Reads fields of one JSON object, rejecting keys nobody asked for.
class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) fail("expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      fail(std::string("'") + key + "' has the wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) fail("unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where_ + ": " + what); }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

EngineConfig parse_engine(const json& doc, const std::string& where) {
  EngineConfig e;
  Reader r(doc, where);
  r.get("name", e.name);
  r.get("model_path", e.model_path);
  r.get("score_threshold", e.score_threshold);
  r.get("nms_threshold", e.nms_threshold);
  r.get("device", e.device);
  r.get("input_width", e.input_width);
  r.get("input_height", e.input_height);
  r.get("vocabulary_path", e.vocabulary_path);
  r.get("page_segmentation", e.page_segmentation);
  r.get("language", e.language);
  r.get("drop_rate", e.drop_rate);
  r.get("jitter_px", e.jitter_px);
  r.get("char_error_rate", e.char_error_rate);
  r.get("alphabet", e.alphabet);
  r.finish();
  if (!(e.score_threshold >= 0 && e.score_threshold <= 1)) r.fail("score_threshold must lie in [0, 1]");
  if (!(e.nms_threshold > 0 && e.nms_threshold <= 1)) r.fail("nms_threshold must lie in (0, 1]");
  if (e.input_width < 32 || e.input_height < 32) r.fail("input size must be at least 32");
  if (!(e.drop_rate >= 0 && e.drop_rate <= 1)) r.fail("drop_rate must lie in [0, 1]");
  if (!(e.jitter_px >= 0) || !std::isfinite(e.jitter_px)) r.fail("jitter_px must be >= 0");
  if (!(e.char_error_rate >= 0 && e.char_error_rate <= 1)) r.fail("char_error_rate must lie in [0, 1]");
  if (e.alphabet.size() < 2) r.fail("alphabet needs at least two characters");
  return e;
}

json engine_to_json(const EngineConfig& e) {
  return {{"name", e.name},
          {"model_path", e.model_path},
          {"score_threshold", e.score_threshold},
          {"nms_threshold", e.nms_threshold},
          {"device", e.device},
          {"input_width", e.input_width},
          {"input_height", e.input_height},
          {"vocabulary_path", e.vocabulary_path},
          {"page_segmentation", e.page_segmentation},
          {"language", e.language},
          {"drop_rate", e.drop_rate},
          {"jitter_px", e.jitter_px},
          {"char_error_rate", e.char_error_rate},
          {"alphabet", e.alphabet}};
}

MergeParams parse_merge(const json& doc) {
  Reader r(doc, "merge");
  std::string mode = "relative";
  MergeParams m;
  r.get("mode", mode);
  r.get("epsilon_y", m.epsilon_y);
  r.get("epsilon_x", m.epsilon_x);
  r.finish();
  if (mode == "relative") {
    m.mode = MergeParams::Mode::kRelativeToMedianHeight;
  } else if (mode == "absolute") {
    m.mode = MergeParams::Mode::kAbsolute;
  } else {
    r.fail("mode must be 'relative' or 'absolute'");
  }
  if (!m.valid()) r.fail("epsilons must be finite and non-negative");
  return m;
}

std::optional<PreprocessChain> parse_preprocess(const json& doc) {
  if (doc.is_string()) return parse_preprocess(json{{"chain", doc}});
  Reader r(doc, "preprocess");
  std::string chain = "none";
  std::string interpolation = "bicubic";
  int factor = 2;
  PreprocessChain c;
  c.gain = 1.5;
  r.get("chain", chain);
  r.get("upscale_factor", factor);
  r.get("interpolation", interpolation);
  r.get("gain", c.gain);
  r.get("offset", c.offset);
  r.get("low_light_threshold", c.low_light_threshold);
  r.finish();
  if (chain != "none" && chain != "upscale" && chain != "brightness" && chain != "both") {
    r.fail("chain must be one of none, upscale, brightness, both");
  }
  if (interpolation == "bicubic") {
    c.interpolation = Interpolation::kBicubic;
  } else if (interpolation == "nearest") {
    c.interpolation = Interpolation::kNearest;
  } else {
    r.fail("interpolation must be 'bicubic' or 'nearest'");
  }
  if (factor < 1 || factor > 8) r.fail("upscale_factor must lie in [1, 8]");
  if (!(c.gain > 0) || !std::isfinite(c.gain)) r.fail("gain must be positive");
  if (!std::isfinite(c.offset)) r.fail("offset must be finite");
  if (chain == "none") return std::nullopt;
  if (chain == "upscale" || chain == "both") c.upscale_factor = factor;
  c.brighten = chain == "brightness" || chain == "both";
  return c;
}

json preprocess_to_json(const std::optional<PreprocessChain>& c) {
  if (!c) return {{"chain", "none"}};
  return {{"chain", c->label()},
          {"upscale_factor", c->upscale_factor.value_or(2)},
          {"interpolation", c->interpolation == Interpolation::kNearest ? "nearest" : "bicubic"},
          {"gain", c->gain},
          {"offset", c->offset},
          {"low_light_threshold", c->low_light_threshold}};
}

}  // namespace

PipelineOptions RunConfig::pipeline_options() const {
  return PipelineOptions{merge, preprocess, crop_padding_px};
}

RunConfig parse_run_config(const json& doc) {
  RunConfig c;
  Reader r(doc, "config");
  r.get("seed", c.seed);
  r.get("iou_threshold", c.iou_threshold);
  r.get("crop_padding_px", c.crop_padding_px);
  if (const json* d = r.child("detector")) c.detector = parse_engine(*d, "detector");
  if (const json* d = r.child("recognizer")) c.recognizer = parse_engine(*d, "recognizer");
  if (const json* d = r.child("merge")) c.merge = parse_merge(*d);
  if (const json* d = r.child("preprocess")) c.preprocess = parse_preprocess(*d);
  if (const json* d = r.child("normalization")) {
    Reader n(*d, "normalization");
    n.get("collapse_whitespace", c.normalization.collapse_whitespace);
    n.get("trim", c.normalization.trim);
    n.get("case_sensitive", c.normalization.case_sensitive);
    n.finish();
  }
  if (const json* d = r.child("gaze")) {
    Reader g(*d, "gaze");
    g.get("roi_fraction", c.gaze.roi.fraction);
    g.get("tolerance_ns", c.gaze.tolerance_ns);
    g.get("video_fps", c.gaze.video_fps);
    g.finish();
    if (!(c.gaze.roi.fraction > 0 && c.gaze.roi.fraction <= 1)) g.fail("roi_fraction must lie in (0, 1]");
    if (c.gaze.tolerance_ns < 0) g.fail("tolerance_ns must be >= 0");
    if (!(c.gaze.video_fps > 0) || !std::isfinite(c.gaze.video_fps)) g.fail("video_fps must be positive");
  }
  r.finish();
  if (!(c.iou_threshold > 0 && c.iou_threshold <= 1)) r.fail("iou_threshold must lie in (0, 1]");
  if (c.crop_padding_px < 0) r.fail("crop_padding_px must be >= 0");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_run_config(doc);
}

json run_config_to_json(const RunConfig& c) {
  return {{"seed", c.seed},
          {"detector", engine_to_json(c.detector)},
          {"recognizer", engine_to_json(c.recognizer)},
          {"merge",
           {{"mode", c.merge.mode == MergeParams::Mode::kAbsolute ? "absolute" : "relative"},
            {"epsilon_y", c.merge.epsilon_y},
            {"epsilon_x", c.merge.epsilon_x}}},
          {"preprocess", preprocess_to_json(c.preprocess)},
          {"normalization",
           {{"collapse_whitespace", c.normalization.collapse_whitespace},
            {"trim", c.normalization.trim},
            {"case_sensitive", c.normalization.case_sensitive}}},
          {"iou_threshold", c.iou_threshold},
          {"crop_padding_px", c.crop_padding_px},
          {"gaze",
           {{"roi_fraction", c.gaze.roi.fraction},
            {"tolerance_ns", c.gaze.tolerance_ns},
            {"video_fps", c.gaze.video_fps}}}};
}

}  // namespace egotext
