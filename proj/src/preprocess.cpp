#include "egotext/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

namespace egotext {

Image upscale(const Image& img, int factor, Interpolation interp) {
  if (factor < 1) throw std::invalid_argument("upscale factor must be >= 1");
  if (factor == 1) return img.clone();
  cv::Mat out;
  const int flag = interp == Interpolation::kNearest ? cv::INTER_NEAREST : cv::INTER_CUBIC;
  cv::resize(img.mat(), out, cv::Size(img.width() * factor, img.height() * factor), 0, 0, flag);
  return Image(std::move(out));
}

Image adjust_brightness(const Image& img, double gain, double offset) {
  if (!(gain > 0.0) || !std::isfinite(gain) || !std::isfinite(offset)) {
    throw std::invalid_argument("brightness gain must be positive and finite");
  }
  cv::Mat lut(1, 256, CV_8UC1);
  for (int v = 0; v < 256; ++v) {
    const double mapped = std::round(gain * v + offset);
    lut.at<unsigned char>(v) = static_cast<unsigned char>(std::clamp(mapped, 0.0, 255.0));
  }
  cv::Mat out;
  cv::LUT(img.mat(), lut, out);
  return Image(std::move(out));
}

bool select_low_light(const LightingStats& stats, double threshold) {
  return stats.mean_brightness < threshold;
}

std::string PreprocessChain::label() const {
  if (upscale_factor && brighten) return "both";
  if (upscale_factor) return "upscale";
  if (brighten) return "brightness";
  return "none";
}

PreprocessOutput apply_chain(const Image& img, const PreprocessChain& chain) {
  PreprocessOutput out;
  out.image = img;
  if (chain.brighten && select_low_light(lighting_stats(img), chain.low_light_threshold)) {
    out.image = adjust_brightness(out.image, chain.gain, chain.offset);
    out.brightened = true;
  }
  if (chain.upscale_factor) {
    out.image = upscale(out.image, *chain.upscale_factor, chain.interpolation);
    out.scale = *chain.upscale_factor;
  }
  return out;
}

}  // namespace egotext
