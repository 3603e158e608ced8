#include "egotext/engines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "egotext/fsutil.hpp"
#include "egotext/utf8.hpp"

namespace egotext {

Box Frame::to_source(const Box& px) const {
  return {px.x_min / scale + offset_x, px.y_min / scale + offset_y, px.x_max / scale + offset_x,
          px.y_max / scale + offset_y};
}

Box Frame::from_source(const Box& src) const {
  return {(src.x_min - offset_x) * scale, (src.y_min - offset_y) * scale, (src.x_max - offset_x) * scale,
          (src.y_max - offset_y) * scale};
}

Frame Frame::cropped(const cv::Rect& rect) const {
  const cv::Rect r = rect & cv::Rect(0, 0, image.width(), image.height());
  Frame f;
  f.image = image.crop(r);
  f.id = id;
  f.scale = scale;
  f.offset_x = offset_x + r.x / scale;
  f.offset_y = offset_y + r.y / scale;
  return f;
}

Frame Frame::rescaled(Image upscaled, int factor) const {
  Frame f;
  f.image = std::move(upscaled);
  f.id = id;
  f.scale = scale * factor;
  f.offset_x = offset_x;
  f.offset_y = offset_y;
  return f;
}

bool MockSpec::valid() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  return unit(drop_rate) && unit(char_error_rate) && jitter_px >= 0.0 && std::isfinite(jitter_px);
}

std::vector<ScoredBox> mock_detect(const Frame& frame, const MockSpec& spec) {
  if (!spec.valid()) throw std::invalid_argument("invalid mock spec");
  std::mt19937_64 rng(stable_hash(frame.id, spec.seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double w = frame.image.width();
  const double h = frame.image.height();

  std::vector<ScoredBox> out;
  for (const GroundTruthRegion& gt : spec.ground_truth) {
    // Draws happen for every region so streams do not shift with drops.
    const bool drop = unit(rng) < spec.drop_rate;
    double d[4] = {0, 0, 0, 0};
    for (double& v : d) v = spec.jitter_px * (2.0 * unit(rng) - 1.0);
    if (drop) continue;

    Box b = frame.from_source(gt.box);
    if (spec.jitter_px > 0.0) {
      b = {b.x_min + d[0], b.y_min + d[1], b.x_max + d[2], b.y_max + d[3]};
      if (b.x_min > b.x_max) std::swap(b.x_min, b.x_max);
      if (b.y_min > b.y_max) std::swap(b.y_min, b.y_max);
    }
    b = b.clipped(w, h);
    if (b.width() <= 0.0 || b.height() <= 0.0) continue;
    out.push_back({b, 1.0});
  }
  return out;
}

std::string mock_recognize(const Frame& region, const MockSpec& spec) {
  if (!spec.valid()) throw std::invalid_argument("invalid mock spec");
  const Box query = region.to_source(Box{0, 0, static_cast<double>(region.image.width()),
                                         static_cast<double>(region.image.height())});
  const GroundTruthRegion* best = nullptr;
  double best_iou = 0.0;
  for (const GroundTruthRegion& gt : spec.ground_truth) {
    const double v = iou(query, gt.box);
    if (v > best_iou) {
      best_iou = v;
      best = &gt;
    }
  }
  if (best == nullptr) return "";
  if (spec.char_error_rate == 0.0) return best->text;

  const std::string stream_key = region.id + "|" + format_double(best->box.x_min) + "," +
                                 format_double(best->box.y_min) + "|" + best->text;
  std::mt19937_64 rng(stable_hash(stream_key, spec.seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::u32string alphabet = decode_utf8(spec.alphabet);

  std::u32string text = decode_utf8(best->text);
  for (char32_t& c : text) {
    if (unit(rng) >= spec.char_error_rate) continue;
    std::u32string pool;
    for (char32_t a : alphabet) {
      if (a != c) pool.push_back(a);
    }
    if (pool.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    c = pool[pick(rng)];
  }
  return encode_utf8(text);
}

namespace {

const MockSpec& lookup(const MockLibrary& library, const std::string& id) {
  static const MockSpec kEmpty{};
  auto it = library.find(id);
  return it == library.end() ? kEmpty : it->second;
}

}  // namespace

std::vector<ScoredBox> MockDetector::detect(const Frame& frame) {
  return mock_detect(frame, lookup(*library_, frame.id));
}

Recognition MockRecognizer::recognize(const Frame& region) {
  std::string text = mock_recognize(region, lookup(*library_, region.id));
  const double confidence = text.empty() ? 0.0 : 1.0;
  return {std::move(text), confidence};
}

std::vector<ScoredBox> SerializedDetector::detect(const Frame& frame) {
  std::lock_guard lock(mutex_);
  return inner_->detect(frame);
}

Recognition SerializedRecognizer::recognize(const Frame& region) {
  std::lock_guard lock(mutex_);
  return inner_->recognize(region);
}

PipelineResult run_pipeline(const Frame& frame, Detector& detector, Recognizer& recognizer,
                            const PipelineOptions& options) {
  PipelineResult result;
  if (frame.image.empty()) return result;

  Frame view = frame;
  if (options.preprocess && !options.preprocess->empty()) {
    PreprocessOutput pre = apply_chain(frame.image, *options.preprocess);
    result.scale = pre.scale;
    view = frame.rescaled(std::move(pre.image), pre.scale);
  }
  const double vw = view.image.width();
  const double vh = view.image.height();

  result.detector_pixels = view.image.pixel_count();
  std::vector<ScoredBox> detections = detector.detect(view);
  result.raw_detections = detections.size();

  std::vector<Box> boxes;
  boxes.reserve(detections.size());
  for (const ScoredBox& d : detections) boxes.push_back(d.box.clipped(vw, vh));
  const MergeResult merged = merge_boxes_grouped(boxes, options.merge);

  const double inv = 1.0 / result.scale;
  const double ow = frame.image.width();
  const double oh = frame.image.height();
  const int pad = std::max(0, options.crop_padding_px);

  for (std::size_t i = 0; i < merged.boxes.size(); ++i) {
    const Box& box = merged.boxes[i];
    TextRegion region;
    region.box = box.scaled(inv, inv).clipped(ow, oh);
    region.detection_confidence = 0.0;
    for (int m : merged.members[i]) {
      region.detection_confidence = std::max(region.detection_confidence, detections[m].confidence);
    }

    const int x0 = static_cast<int>(std::floor(box.x_min)) - pad;
    const int y0 = static_cast<int>(std::floor(box.y_min)) - pad;
    const int x1 = static_cast<int>(std::ceil(box.x_max)) + pad;
    const int y1 = static_cast<int>(std::ceil(box.y_max)) + pad;
    const Frame crop = view.cropped(cv::Rect(x0, y0, x1 - x0, y1 - y0));
    if (!crop.image.empty()) {
      try {
        Recognition rec = recognizer.recognize(crop);
        region.text = std::move(rec.text);
        region.recognition_confidence = std::clamp(rec.confidence, 0.0, 1.0);
      } catch (const std::exception& e) {
        region.text.clear();
        region.error = true;
        region.error_message = e.what();
        ++result.recognizer_failures;
      }
    }
    result.regions.push_back(std::move(region));
  }
  return result;
}

std::vector<TextRegion> run_pipeline(const Image& img, Detector& detector, const MergeParams& merge,
                                     Recognizer& recognizer, const std::optional<PreprocessChain>& preprocess) {
  Frame frame;
  frame.image = img;
  PipelineOptions options;
  options.merge = merge;
  options.preprocess = preprocess;
  return run_pipeline(frame, detector, recognizer, options).regions;
}

}  // namespace egotext
