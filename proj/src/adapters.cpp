#include "egotext/adapters.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <opencv2/dnn.hpp>
#include <opencv2/imgproc.hpp>

#include "egotext/error.hpp"

namespace egotext {

namespace fs = std::filesystem;

std::vector<ScoredBox> decode_east(const cv::Mat& scores, const cv::Mat& geometry, double score_threshold) {
  if (scores.dims != 4 || geometry.dims != 4 || scores.size[0] != 1 || geometry.size[0] != 1 ||
      scores.size[1] != 1 || geometry.size[1] != 5 || scores.size[2] != geometry.size[2] ||
      scores.size[3] != geometry.size[3]) {
    throw std::invalid_argument("EAST outputs must be 1x1xHxW scores and 1x5xHxW geometry");
  }
  const int height = scores.size[2];
  const int width = scores.size[3];
  std::vector<ScoredBox> out;
  for (int y = 0; y < height; ++y) {
    const float* score_row = scores.ptr<float>(0, 0, y);
    const float* top = geometry.ptr<float>(0, 0, y);
    const float* right = geometry.ptr<float>(0, 1, y);
    const float* bottom = geometry.ptr<float>(0, 2, y);
    const float* left = geometry.ptr<float>(0, 3, y);
    const float* angles = geometry.ptr<float>(0, 4, y);
    for (int x = 0; x < width; ++x) {
      const double score = score_row[x];
      if (score < score_threshold) continue;

      const double ox = x * 4.0;
      const double oy = y * 4.0;
      const double angle = angles[x];
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      const double h = top[x] + bottom[x];
      const double w = right[x] + left[x];

      // Corner at the bottom-right edge intersection, then the two
      // neighbouring corners along the rotated axes.
      const cv::Point2d offset(ox + c * right[x] + s * bottom[x], oy - s * right[x] + c * bottom[x]);
      const cv::Point2d p1 = cv::Point2d(-s * h, -c * h) + offset;
      const cv::Point2d p3 = cv::Point2d(-c * w, s * w) + offset;
      const cv::Point2f center(static_cast<float>(0.5 * (p1.x + p3.x)), static_cast<float>(0.5 * (p1.y + p3.y)));
      const cv::RotatedRect rect(center, cv::Size2f(static_cast<float>(w), static_cast<float>(h)),
                                 static_cast<float>(-angle * 180.0 / CV_PI));
      cv::Point2f corners[4];
      rect.points(corners);
      Box b{corners[0].x, corners[0].y, corners[0].x, corners[0].y};
      for (const cv::Point2f& p : corners) {
        b.x_min = std::min<double>(b.x_min, p.x);
        b.y_min = std::min<double>(b.y_min, p.y);
        b.x_max = std::max<double>(b.x_max, p.x);
        b.y_max = std::max<double>(b.y_max, p.y);
      }
      out.push_back({b, std::clamp(score, 0.0, 1.0)});
    }
  }
  return out;
}

std::vector<ScoredBox> non_max_suppression(std::span<const ScoredBox> boxes, double iou_threshold) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (boxes[a].confidence != boxes[b].confidence) return boxes[a].confidence > boxes[b].confidence;
    return reading_order_less(boxes[a].box, boxes[b].box);
  });
  std::vector<ScoredBox> kept;
  for (std::size_t i : order) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const ScoredBox& k) {
      return iou(k.box, boxes[i].box) > iou_threshold;
    });
    if (!suppressed) kept.push_back(boxes[i]);
  }
  return kept;
}

CtcDecoded ctc_greedy_decode(const cv::Mat& steps, std::span<const std::string> vocabulary) {
  if (steps.dims != 2 || steps.type() != CV_32F) throw std::invalid_argument("CTC input must be a 2-D float matrix");
  CtcDecoded out;
  int previous = 0;
  double conf_sum = 0.0;
  int emitted = 0;
  for (int t = 0; t < steps.rows; ++t) {
    const float* row = steps.ptr<float>(t);
    const int best = static_cast<int>(std::max_element(row, row + steps.cols) - row);
    if (best != 0 && best != previous && best - 1 < static_cast<int>(vocabulary.size())) {
      out.text += vocabulary[best - 1];
      conf_sum += row[best];
      ++emitted;
    }
    previous = best;
  }
  out.confidence = emitted ? std::clamp(conf_sum / emitted, 0.0, 1.0) : 0.0;
  return out;
}

std::vector<std::string> load_vocabulary(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw EngineUnavailable("vocabulary not found: " + path.string());
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  return vocab;
}

namespace {

cv::Mat as_bgr(const Image& img) {
  if (img.channels() == Image::Channels::kColor) return img.mat();
  cv::Mat bgr;
  cv::cvtColor(img.mat(), bgr, cv::COLOR_GRAY2BGR);
  return bgr;
}

cv::dnn::Net load_net(const EngineConfig& config) {
  if (config.model_path.empty() || !fs::exists(config.model_path)) {
    throw EngineUnavailable(config.name + ": model not found at '" + config.model_path + "'");
  }
  try {
    cv::dnn::Net net = cv::dnn::readNet(config.model_path);
    if (config.device == "cuda") {
      net.setPreferableBackend(cv::dnn::DNN_BACKEND_CUDA);
      net.setPreferableTarget(cv::dnn::DNN_TARGET_CUDA);
    }
    return net;
  } catch (const cv::Exception& e) {
    throw EngineUnavailable(config.name + ": cannot load model: " + e.what());
  }
}

}  // namespace

struct EastDetector::Impl {
  EngineConfig config;
  cv::dnn::Net net;
};

EastDetector::EastDetector(const EngineConfig& config) : impl_(std::make_unique<Impl>()) {
  impl_->config = config;
  impl_->net = load_net(config);
}

EastDetector::~EastDetector() = default;

std::vector<ScoredBox> EastDetector::detect(const Frame& frame) {
  const int in_w = std::max(32, impl_->config.input_width / 32 * 32);
  const int in_h = std::max(32, impl_->config.input_height / 32 * 32);
  cv::Mat blob = cv::dnn::blobFromImage(as_bgr(frame.image), 1.0, cv::Size(in_w, in_h),
                                        cv::Scalar(123.68, 116.78, 103.94), true, false);
  impl_->net.setInput(blob);
  std::vector<cv::Mat> outs;
  impl_->net.forward(outs, std::vector<cv::String>{"feature_fusion/Conv_7/Sigmoid", "feature_fusion/concat_3"});

  std::vector<ScoredBox> raw = decode_east(outs[0], outs[1], impl_->config.score_threshold);
  const double sx = static_cast<double>(frame.image.width()) / in_w;
  const double sy = static_cast<double>(frame.image.height()) / in_h;
  for (ScoredBox& b : raw) b.box = b.box.scaled(sx, sy).clipped(frame.image.width(), frame.image.height());
  return non_max_suppression(raw, impl_->config.nms_threshold);
}

struct CrnnRecognizer::Impl {
  EngineConfig config;
  cv::dnn::Net net;
  std::vector<std::string> vocabulary;
};

CrnnRecognizer::CrnnRecognizer(const EngineConfig& config) : impl_(std::make_unique<Impl>()) {
  impl_->config = config;
  impl_->vocabulary = load_vocabulary(config.vocabulary_path);
  impl_->net = load_net(config);
}

CrnnRecognizer::~CrnnRecognizer() = default;

Recognition CrnnRecognizer::recognize(const Frame& region) {
  cv::Mat gray;
  if (region.image.channels() == Image::Channels::kColor) {
    cv::cvtColor(region.image.mat(), gray, cv::COLOR_BGR2GRAY);
  } else {
    gray = region.image.mat();
  }
  cv::Mat blob = cv::dnn::blobFromImage(gray, 1.0 / 127.5, cv::Size(100, 32), cv::Scalar(127.5));
  impl_->net.setInput(blob);
  cv::Mat out = impl_->net.forward();
  // [T, 1, C] -> [T, C]
  cv::Mat steps(out.size[0], out.size[2], CV_32F, out.ptr<float>());
  CtcDecoded d = ctc_greedy_decode(steps, impl_->vocabulary);
  return {std::move(d.text), d.confidence};
}

namespace {

std::string find_tesseract() {
  if (const char* env = std::getenv("EGOTEXT_TESSERACT"); env && *env) {
    return fs::exists(env) ? std::string(env) : std::string();
  }
  const char* path = std::getenv("PATH");
  if (!path) return {};
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    const fs::path candidate = fs::path(dir) / "tesseract";
    if (fs::exists(candidate) && ::access(candidate.c_str(), X_OK) == 0) return candidate.string();
  }
  return {};
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

bool TesseractRecognizer::available() { return !find_tesseract().empty(); }

TesseractRecognizer::TesseractRecognizer(const EngineConfig& config) : binary_(find_tesseract()), config_(config) {
  if (binary_.empty()) throw EngineUnavailable("tesseract: executable not found (set EGOTEXT_TESSERACT or PATH)");
}

Recognition TesseractRecognizer::recognize(const Frame& region) {
  static std::atomic<unsigned> counter{0};
  const fs::path tmp = fs::temp_directory_path() /
                       ("egotext-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".png");
  save_image(region.image, tmp);
  const std::string cmd = shell_quote(binary_) + " " + shell_quote(tmp.string()) + " stdout --psm " +
                          std::to_string(config_.page_segmentation) + " -l " + shell_quote(config_.language) +
                          " 2>/dev/null";
  std::string text;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    fs::remove(tmp);
    throw std::runtime_error("tesseract: cannot start process");
  }
  char buf[512];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) text.append(buf, n);
  const int status = ::pclose(pipe);
  std::error_code ec;
  fs::remove(tmp, ec);
  if (status != 0) throw std::runtime_error("tesseract: exited with status " + std::to_string(status));
  while (!text.empty() && (text.back() == '\n' || text.back() == '\f' || text.back() == ' ')) text.pop_back();
  for (char& c : text) {
    if (c == '\n') c = ' ';
  }
  return {text, text.empty() ? 0.0 : 1.0};
}

std::shared_ptr<Detector> make_detector(const EngineConfig& config, std::shared_ptr<const MockLibrary> library) {
  if (config.name == "mock") return std::make_shared<MockDetector>(std::move(library));
  if (config.name == "east") return std::make_shared<EastDetector>(config);
  throw ConfigError("unknown detector engine: " + config.name);
}

std::shared_ptr<Recognizer> make_recognizer(const EngineConfig& config,
                                            std::shared_ptr<const MockLibrary> library) {
  if (config.name == "mock") return std::make_shared<MockRecognizer>(std::move(library));
  if (config.name == "crnn") return std::make_shared<CrnnRecognizer>(config);
  if (config.name == "tesseract") return std::make_shared<TesseractRecognizer>(config);
  throw ConfigError("unknown recognizer engine: " + config.name);
}

bool recognizer_available(const EngineConfig& config) {
  if (config.name == "mock") return true;
  if (config.name == "tesseract") return TesseractRecognizer::available();
  if (config.name == "crnn") {
    return !config.model_path.empty() && fs::exists(config.model_path) && fs::exists(config.vocabulary_path);
  }
  return false;
}

}  // namespace egotext
