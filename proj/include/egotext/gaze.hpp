#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egotext/engines.hpp"
#include "egotext/geometry.hpp"

namespace egotext {

// Gaze point already projected into frame pixels.
struct GazeSample {
  std::int64_t timestamp_ns = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

struct RoiParams {
  double fraction = 1.0 / 16.0;  // window side as a fraction of frame width, in (0, 1]
};

struct FrameStamp {
  std::string frame_id;
  std::int64_t timestamp_ns = 0;
};

struct AlignedGaze {
  std::string frame_id;
  std::optional<GazeSample> gaze;
};

// Pairs each frame with the nearest-in-time sample (earlier sample wins a
// tie), or none when the gap exceeds `tolerance_ns`. Throws
// std::invalid_argument if the track is not strictly increasing in time.
std::vector<AlignedGaze> align_gaze(std::span<const FrameStamp> frames, std::span<const GazeSample> track,
                                    std::int64_t tolerance_ns);

// Side length in pixels: round(frame_w * fraction), at least 1.
int gaze_window_side(int frame_w, const RoiParams& params);

/// Square window of side round(frame_w * fraction) centred on the gaze
/// point, shifted (never shrunk) to lie inside the frame. A side larger than
/// a frame dimension is clipped to that dimension. Corners are integral.
/// Throws std::invalid_argument for non-positive frame dimensions or a
/// fraction outside (0, 1].
Box gaze_window(const GazeSample& gaze, int frame_w, int frame_h, const RoiParams& params);

struct GazeRunResult {
  Box window;
  std::vector<TextRegion> regions;  // full-frame coordinates
  std::size_t detector_pixels = 0;
  int recognizer_failures = 0;
};

/// Runs the pipeline inside the gaze window and maps results back to full
/// frame coordinates. Regions touching a window edge that is not also a
/// frame edge are flagged truncated.
GazeRunResult gaze_run(const Frame& frame, const GazeSample& gaze, const RoiParams& params, Detector& detector,
                       Recognizer& recognizer, const PipelineOptions& options);

// Gaze CSV: header timestamp_ns,gaze_x_px,gaze_y_px. Throws DataError.
std::vector<GazeSample> load_gaze_csv(const std::filesystem::path& path);

struct FrameEntry {
  std::string frame_id;
  std::int64_t timestamp_ns = 0;
  std::filesystem::path path;  // resolved against the index location
};

// Frame index CSV: header frame_id,timestamp_ns,path. Throws DataError.
std::vector<FrameEntry> load_frame_index(const std::filesystem::path& path);

}  // namespace egotext
