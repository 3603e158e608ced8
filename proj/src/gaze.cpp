#include "egotext/gaze.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "egotext/csv.hpp"
#include "egotext/error.hpp"
#include "egotext/fsutil.hpp"

namespace egotext {

namespace fs = std::filesystem;

std::vector<AlignedGaze> align_gaze(std::span<const FrameStamp> frames, std::span<const GazeSample> track,
                                    std::int64_t tolerance_ns) {
  for (std::size_t i = 1; i < track.size(); ++i) {
    if (track[i].timestamp_ns <= track[i - 1].timestamp_ns) {
      throw std::invalid_argument("gaze track timestamps must be strictly increasing");
    }
  }
  std::vector<AlignedGaze> out;
  out.reserve(frames.size());
  for (const FrameStamp& f : frames) {
    AlignedGaze a{f.frame_id, std::nullopt};
    if (!track.empty()) {
      auto it = std::lower_bound(track.begin(), track.end(), f.timestamp_ns,
                                 [](const GazeSample& g, std::int64_t t) { return g.timestamp_ns < t; });
      const GazeSample* best = nullptr;
      std::int64_t best_gap = std::numeric_limits<std::int64_t>::max();
      if (it != track.begin()) {
        const GazeSample& before = *std::prev(it);
        best = &before;
        best_gap = f.timestamp_ns - before.timestamp_ns;
      }
      if (it != track.end() && it->timestamp_ns - f.timestamp_ns < best_gap) {
        best = &*it;
        best_gap = it->timestamp_ns - f.timestamp_ns;
      }
      if (best != nullptr && best_gap <= tolerance_ns) a.gaze = *best;
    }
    out.push_back(std::move(a));
  }
  return out;
}

int gaze_window_side(int frame_w, const RoiParams& params) {
  if (frame_w <= 0) throw std::invalid_argument("frame width must be positive");
  if (!(params.fraction > 0.0 && params.fraction <= 1.0)) {
    throw std::invalid_argument("gaze window fraction must lie in (0, 1]");
  }
  return std::max(1, static_cast<int>(std::lround(frame_w * params.fraction)));
}

Box gaze_window(const GazeSample& gaze, int frame_w, int frame_h, const RoiParams& params) {
  if (frame_w <= 0 || frame_h <= 0) throw std::invalid_argument("frame dimensions must be positive");
  const int side = gaze_window_side(frame_w, params);
  const int sx = std::min(side, frame_w);
  const int sy = std::min(side, frame_h);
  const auto place = [](double centre, int extent, int limit) {
    const long start = std::lround(centre - extent / 2.0);
    return static_cast<double>(std::clamp<long>(start, 0, limit - extent));
  };
  const double x0 = place(gaze.x, sx, frame_w);
  const double y0 = place(gaze.y, sy, frame_h);
  return {x0, y0, x0 + sx, y0 + sy};
}

GazeRunResult gaze_run(const Frame& frame, const GazeSample& gaze, const RoiParams& params, Detector& detector,
                       Recognizer& recognizer, const PipelineOptions& options) {
  const int fw = frame.image.width();
  const int fh = frame.image.height();
  GazeRunResult result;
  result.window = gaze_window(gaze, fw, fh, params);
  const Box& w = result.window;
  const cv::Rect rect(static_cast<int>(w.x_min), static_cast<int>(w.y_min), static_cast<int>(w.width()),
                      static_cast<int>(w.height()));
  const Frame crop = frame.cropped(rect);

  PipelineResult inner = run_pipeline(crop, detector, recognizer, options);
  result.detector_pixels = inner.detector_pixels;
  result.recognizer_failures = inner.recognizer_failures;

  const double cw = crop.image.width();
  const double ch = crop.image.height();
  for (TextRegion& r : inner.regions) {
    const bool cut_left = r.box.x_min <= 0.0 && w.x_min > 0.0;
    const bool cut_top = r.box.y_min <= 0.0 && w.y_min > 0.0;
    const bool cut_right = r.box.x_max >= cw && w.x_max < fw;
    const bool cut_bottom = r.box.y_max >= ch && w.y_max < fh;
    r.truncated = r.truncated || cut_left || cut_top || cut_right || cut_bottom;
    r.box = r.box.translated(w.x_min, w.y_min);
    result.regions.push_back(std::move(r));
  }
  return result;
}

namespace {

template <typename T>
T parse_number(const std::string& s, const fs::path& path, std::size_t line) {
  T value{};
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError(path.string() + ":" + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return value;
}

CsvTable read_table(const fs::path& path, std::initializer_list<std::string_view> columns) {
  if (!fs::exists(path)) throw DataError("file not found: " + path.string());
  CsvTable t = parse_csv(read_file(path));
  for (std::string_view c : columns) {
    if (t.column(c) < 0) throw DataError(path.string() + ": missing column '" + std::string(c) + "'");
  }
  return t;
}

}  // namespace

std::vector<GazeSample> load_gaze_csv(const fs::path& path) {
  const CsvTable t = read_table(path, {"timestamp_ns", "gaze_x_px", "gaze_y_px"});
  const int ct = t.column("timestamp_ns");
  const int cx = t.column("gaze_x_px");
  const int cy = t.column("gaze_y_px");
  std::vector<GazeSample> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (row.size() < t.header.size()) throw DataError(path.string() + ":" + std::to_string(i + 2) + ": short row");
    out.push_back({parse_number<std::int64_t>(row[ct], path, i + 2), parse_number<double>(row[cx], path, i + 2),
                   parse_number<double>(row[cy], path, i + 2)});
  }
  return out;
}

std::vector<FrameEntry> load_frame_index(const fs::path& path) {
  const CsvTable t = read_table(path, {"frame_id", "timestamp_ns", "path"});
  const int ci = t.column("frame_id");
  const int ct = t.column("timestamp_ns");
  const int cp = t.column("path");
  const fs::path base = path.parent_path();
  std::vector<FrameEntry> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (row.size() < t.header.size()) throw DataError(path.string() + ":" + std::to_string(i + 2) + ": short row");
    out.push_back({row[ci], parse_number<std::int64_t>(row[ct], path, i + 2), base / row[cp]});
  }
  return out;
}

}  // namespace egotext
