#include "egotext/photometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace egotext {

namespace {

constexpr std::int64_t kLumaR = 299;
constexpr std::int64_t kLumaG = 587;
constexpr std::int64_t kLumaB = 114;
constexpr double kLumaScale = 1000.0;

}  // namespace

LightingStats lighting_stats(const Image& img) {
  if (img.empty() || img.pixel_count() == 0) throw std::invalid_argument("zero-size image");

  const cv::Mat& m = img.mat();
  const bool gray = img.channels() == Image::Channels::kGray;
  const std::int64_t scale = gray ? 1 : static_cast<std::int64_t>(kLumaScale);

  // Luma is accumulated as an integer in units of 1/scale.
  std::int64_t sum = 0;
  __int128 sum_sq = 0;
  std::int64_t value_sum = 0;
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();

  for (int r = 0; r < m.rows; ++r) {
    const unsigned char* row = m.ptr<unsigned char>(r);
    for (int c = 0; c < m.cols; ++c) {
      std::int64_t luma;
      if (gray) {
        luma = row[c];
        value_sum += row[c];
      } else {
        const unsigned char b = row[3 * c];
        const unsigned char g = row[3 * c + 1];
        const unsigned char rr = row[3 * c + 2];
        luma = kLumaR * rr + kLumaG * g + kLumaB * b;
        value_sum += std::max({b, g, rr});
      }
      sum += luma;
      sum_sq += static_cast<__int128>(luma) * luma;
      lo = std::min(lo, luma);
      hi = std::max(hi, luma);
    }
  }

  const auto n = static_cast<std::int64_t>(img.pixel_count());
  const double dn = static_cast<double>(n);
  const double ds = static_cast<double>(scale);

  // n * sum_sq - sum^2 is exact and shift-invariant.
  const __int128 var_num = static_cast<__int128>(n) * sum_sq - static_cast<__int128>(sum) * sum;

  LightingStats s;
  s.mean_brightness = static_cast<double>(sum) / (dn * ds);
  s.std_brightness = std::sqrt(static_cast<double>(var_num)) / (dn * ds);
  s.global_luminance = static_cast<double>(value_sum) / dn;
  s.contrast = static_cast<double>(hi - lo) / ds;
  return s;
}

}  // namespace egotext
