#pragma once

#include <optional>
#include <string>
#include <vector>

#include "egotext/image.hpp"
#include "egotext/photometry.hpp"

namespace egotext {

enum class Interpolation { kBicubic, kNearest };

// Enlarges both dimensions by an integer factor. Factor 1 returns a copy.
// Throws std::invalid_argument when factor < 1.
Image upscale(const Image& img, int factor, Interpolation interp = Interpolation::kBicubic);

// value' = clamp(round(gain * value + offset), 0, 255) on every channel.
// Throws std::invalid_argument unless gain > 0.
Image adjust_brightness(const Image& img, double gain, double offset);

// True when the image is darker than the gate.
bool select_low_light(const LightingStats& stats, double threshold);

inline constexpr double kDefaultLowLightThreshold = 60.0;

// The configurable chain applied ahead of detection.
struct PreprocessChain {
  std::optional<int> upscale_factor;  // none: no upscaling
  Interpolation interpolation = Interpolation::kBicubic;

  bool brighten = false;
  double gain = 1.0;
  double offset = 0.0;
  // Brightness is applied only when mean brightness is below this gate.
  double low_light_threshold = kDefaultLowLightThreshold;

  bool empty() const { return !upscale_factor && !brighten; }
  int scale() const { return upscale_factor.value_or(1); }

  // "none", "upscale", "brightness" or "both".
  std::string label() const;
};

struct PreprocessOutput {
  Image image;
  int scale = 1;            // output pixel = original pixel * scale
  bool brightened = false;  // whether the low-light gate fired
};

// Brightness gating uses statistics of the input image; upscaling follows.
PreprocessOutput apply_chain(const Image& img, const PreprocessChain& chain);

}  // namespace egotext
