#include "egotext/image.hpp"

#include <stdexcept>
#include <vector>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "egotext/error.hpp"
#include "egotext/fsutil.hpp"

namespace egotext {

namespace fs = std::filesystem;

Image::Image(cv::Mat mat) : mat_(std::move(mat)) {
  if (!mat_.empty() && mat_.type() != CV_8UC1 && mat_.type() != CV_8UC3) {
    throw std::invalid_argument("Image requires an 8-bit, 1- or 3-channel matrix");
  }
}

Image Image::gray(int width, int height, unsigned char fill) {
  return Image(cv::Mat(height, width, CV_8UC1, cv::Scalar(fill)));
}

Image Image::color(int width, int height, cv::Scalar bgr) {
  return Image(cv::Mat(height, width, CV_8UC3, bgr));
}

Image Image::crop(const cv::Rect& rect) const {
  const cv::Rect clipped = rect & cv::Rect(0, 0, width(), height());
  if (clipped.empty()) return Image();
  return Image(mat_(clipped).clone());
}

bool Image::identical(const Image& other) const {
  if (mat_.size() != other.mat_.size() || mat_.type() != other.mat_.type()) return false;
  if (mat_.empty()) return true;
  return cv::norm(mat_, other.mat_, cv::NORM_INF) == 0.0;
}

Image load_image(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("image not found: " + path.string());
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (mat.empty()) throw DataError("cannot decode image: " + path.string());
  if (mat.depth() != CV_8U) throw DataError("only 8-bit images are supported: " + path.string());
  if (mat.channels() == 4) {
    cv::Mat bgr;
    cv::cvtColor(mat, bgr, cv::COLOR_BGRA2BGR);
    mat = bgr;
  }
  return Image(std::move(mat));
}

void save_image(const Image& image, const fs::path& path) {
  if (image.empty()) throw DataError("refusing to write an empty image: " + path.string());
  std::vector<unsigned char> buf;
  std::string ext = path.extension().string();
  if (ext.empty()) ext = ".png";
  if (!cv::imencode(ext, image.mat(), buf)) throw DataError("cannot encode image: " + path.string());
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(buf.data()), buf.size()));
}

}  // namespace egotext
