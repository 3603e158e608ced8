#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <nlohmann/json_fwd.hpp>

#include "egotext/adapters.hpp"
#include "egotext/evaluation.hpp"
#include "egotext/gaze.hpp"
#include "egotext/geometry.hpp"
#include "egotext/preprocess.hpp"

namespace egotext {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct GazeConfig {
  RoiParams roi;
  std::int64_t tolerance_ns = 50'000'000;  // one frame at 20 fps
  double video_fps = 20.0;                 // timestamps for frames read from a video file
};

// One run configuration document. See docs/config.schema.json.
struct RunConfig {
  std::uint64_t seed = kDefaultSeed;
  EngineConfig detector;
  EngineConfig recognizer;
  MergeParams merge;
  std::optional<PreprocessChain> preprocess;
  NormalizationPolicy normalization;
  double iou_threshold = kDefaultIouThreshold;
  int crop_padding_px = 0;
  GazeConfig gaze;

  PipelineOptions pipeline_options() const;
};

// Unknown keys and out-of-range values raise ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

// Fully populated document; parse_run_config(run_config_to_json(c)) == c.
nlohmann::json run_config_to_json(const RunConfig& config);

}  // namespace egotext
