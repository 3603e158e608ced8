#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "egotext/conditions.hpp"
#include "egotext/evaluation.hpp"
#include "egotext/image.hpp"
#include "egotext/regions.hpp"

namespace egotext {

// ---------------------------------------------------------------------------
// Ground truth and manifests.
//
// One entry:
//   {"id": "...", "image": "<path relative to the file>",
//    "regions": [{"points": [[x,y],[x,y],[x,y],[x,y]] | "box": [x0,y0,x1,y1],
//                 "text": "..."}],
//    "conditions": {"lighting": "...", "distance_m": n, "width": n, "height": n}}
// A file holds a single entry, an array of entries, or {"entries": [...]}.

struct GroundTruthEntry {
  std::string id;                 // explicit "id", else the image file stem
  std::string image;              // as written in the file
  std::filesystem::path image_path;  // resolved against the file's directory
  std::vector<GroundTruthRegion> regions;
  std::optional<ConditionMetadata> conditions;

  EvalRecord skeleton() const;

  friend bool operator==(const GroundTruthEntry&, const GroundTruthEntry&) = default;
};

struct EntryError {
  std::size_t entry = 0;
  std::optional<std::size_t> region;  // set when only one region was rejected
  std::string message;
};

struct GroundTruthFile {
  std::vector<GroundTruthEntry> entries;
  std::vector<EntryError> errors;
};

// Lenient loader: malformed regions and entries are skipped and reported.
// Throws DataError for a missing file or a document that is not one of the
// accepted shapes.
GroundTruthFile load_ground_truth(const std::filesystem::path& path);
GroundTruthFile parse_ground_truth(const nlohmann::json& doc, const std::filesystem::path& base_dir);

nlohmann::json ground_truth_to_json(const GroundTruthEntry& entry);
// Writes {"entries": [...]} atomically.
void write_ground_truth(std::span<const GroundTruthEntry> entries, const std::filesystem::path& path);

// Strict loader for run manifests: any rejected entry or region, or a
// repeated id, throws DataError.
std::vector<GroundTruthEntry> load_manifest(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic poster generation.

namespace degrade {

struct Blur {
  double sigma = 0.0;
};
// Shrinks by `factor`; with `restore` the image is enlarged back to its
// previous size (resolution loss at constant raster size).
struct Downscale {
  double factor = 1.0;
  bool restore = false;
};
struct Brightness {
  double gain = 1.0;
  double offset = 0.0;
};
struct Noise {
  double sigma = 0.0;
};
struct Resize {
  int width = 0;
  int height = 0;
};

}  // namespace degrade

using DegradationStep =
    std::variant<degrade::Blur, degrade::Downscale, degrade::Brightness, degrade::Noise, degrade::Resize>;

struct Degraded {
  Image image;
  std::vector<GroundTruthRegion> regions;
};

// Applies steps in order, carrying annotations through geometric steps.
// Noise draws from a generator seeded with `seed`.
Degraded apply_degradations(const Image& image, std::vector<GroundTruthRegion> regions,
                            std::span<const DegradationStep> steps, std::uint64_t seed);

inline constexpr std::string_view kPosterText = "Hello world! This is Joseph testing the Meta glasses";

struct LightingProfile {
  Lighting lighting = Lighting::kNatural;
  double gain = 1.0;
  double offset = 0.0;
};

struct DistanceProfile {
  double distance_m = 0.5;
  double blur_sigma = 0.0;
  double downscale = 1.0;  // applied with restore
};

struct ResolutionProfile {
  int width = 0;
  int height = 0;
};

struct SyntheticSpec {
  std::string text = std::string(kPosterText);
  int font_px = 80;  // line cell height on the canvas
  int canvas_width = 1440;
  int canvas_height = 1440;
  std::vector<LightingProfile> lightings;
  std::vector<DistanceProfile> distances;
  std::vector<ResolutionProfile> resolutions;
  double noise_sigma = 0.0;
  std::uint64_t seed = 42;

  // Four lightings x two distances x two resolutions.
  static SyntheticSpec standard();

  // Throws ConfigError when invalid.
  void validate() const;
};

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SyntheticSpec& spec);

struct PosterLayout {
  int cell_width = 0;
  int cell_height = 0;
  int line_pitch = 0;
  int margin = 0;
  std::vector<GroundTruthRegion> lines;  // one region per text line
};

// Monospaced layout: words wrap onto lines that fit the canvas; each line's
// box spans its character cells exactly.
PosterLayout layout_poster(const SyntheticSpec& spec);

// White canvas with black glyphs drawn cell by cell; glyph ink is clipped to
// its cell, so every dark pixel lies inside its line's box.
Degraded render_poster(const SyntheticSpec& spec);

// Steps simulating one condition cell: blur and restored downscale for
// distance, gain/offset for lighting, optional noise, final raster size.
std::vector<DegradationStep> condition_chain(const SyntheticSpec& spec, const LightingProfile& lighting,
                                             const DistanceProfile& distance, const ResolutionProfile& resolution);

/// Renders the poster, emits one PNG per cell of the lighting x distance x
/// resolution cross-product under out_dir/images and writes
/// out_dir/manifest.json. Returns the manifest entries in generation order.
std::vector<GroundTruthEntry> generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

}  // namespace egotext
