#pragma once

#include "egotext/image.hpp"

namespace egotext {

// Per-image lighting summary, all on the 8-bit [0, 255] scale.
struct LightingStats {
  double mean_brightness = 0.0;   // mean of luma
  double std_brightness = 0.0;    // population standard deviation of luma
  double global_luminance = 0.0;  // mean of the per-pixel max channel
  double contrast = 0.0;          // luma max - luma min
};

/// Computes lighting statistics for `img`.
///
/// Luma is 0.299 R + 0.587 G + 0.114 B, evaluated in exact fixed point
/// (thousandths), so standard deviation and contrast are exactly invariant to
/// pixel shifts and permutations. Grayscale input is its own luma and its
/// global luminance equals its mean brightness. Throws std::invalid_argument
/// for an empty image.
LightingStats lighting_stats(const Image& img);

}  // namespace egotext
