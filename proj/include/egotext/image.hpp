#pragma once

#include <filesystem>
#include <string>

#include <opencv2/core.hpp>

namespace egotext {

// 8-bit raster, either single-channel grayscale or three-channel colour.
// Colour data follows the OpenCV convention: channels are stored B, G, R.
class Image {
 public:
  enum class Channels { kGray = 1, kColor = 3 };

  Image() = default;
  // Wraps (without copying) a CV_8UC1 or CV_8UC3 matrix.
  explicit Image(cv::Mat mat);

  static Image gray(int width, int height, unsigned char fill = 0);
  static Image color(int width, int height, cv::Scalar bgr = {0, 0, 0});

  int width() const { return mat_.cols; }
  int height() const { return mat_.rows; }
  Channels channels() const { return mat_.channels() == 1 ? Channels::kGray : Channels::kColor; }
  bool empty() const { return mat_.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(mat_.total()); }

  const cv::Mat& mat() const { return mat_; }
  cv::Mat& mat() { return mat_; }

  Image clone() const { return Image(mat_.clone()); }
  // Deep copy of a rectangle; the rectangle is intersected with the image.
  Image crop(const cv::Rect& rect) const;

  // Bitwise equality of dimensions, channel count and pixel data.
  bool identical(const Image& other) const;

 private:
  cv::Mat mat_;
};

// Reads PNG/JPEG (or anything imgcodecs handles); grayscale files stay
// single-channel. Throws DataError when the file cannot be decoded.
Image load_image(const std::filesystem::path& path);

// Writes through a temporary file and a rename. Throws DataError on failure.
void save_image(const Image& image, const std::filesystem::path& path);

}  // namespace egotext
