#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "egotext/engines.hpp"

namespace egotext {

// Engine block of a run configuration.
struct EngineConfig {
  std::string name = "mock";  // mock | east | crnn | tesseract
  std::string model_path;
  double score_threshold = 0.5;
  double nms_threshold = 0.4;
  std::string device;  // passed through to the backend untouched

  // east: network input, rounded down to multiples of 32
  int input_width = 1280;
  int input_height = 1280;
  // crnn: one symbol per line, CTC blank is index 0
  std::string vocabulary_path;
  // tesseract: page segmentation mode and language
  int page_segmentation = 7;
  std::string language = "eng";

  // mock noise
  double drop_rate = 0.0;
  double jitter_px = 0.0;
  double char_error_rate = 0.0;
  std::string alphabet = std::string(kDefaultMockAlphabet);
};

// ---------------------------------------------------------------------------
// EAST output decoding.

/// Decodes an EAST score map (1x1xHxW) and geometry map (1x5xHxW: distances
/// to top, right, bottom, left edges and rotation angle) into axis-aligned
/// envelopes of the rotated boxes, in network-input pixels. Cells below
/// `score_threshold` are skipped. Each map cell covers a 4x4 input block.
std::vector<ScoredBox> decode_east(const cv::Mat& scores, const cv::Mat& geometry, double score_threshold);

/// Greedy non-maximum suppression: keeps boxes in descending confidence,
/// discarding any whose IoU with a kept box exceeds `iou_threshold`.
std::vector<ScoredBox> non_max_suppression(std::span<const ScoredBox> boxes, double iou_threshold);

// ---------------------------------------------------------------------------
// CTC decoding for CRNN-style recognizers.

struct CtcDecoded {
  std::string text;
  double confidence = 0.0;  // mean of the per-step maxima over emitted symbols
};

/// Best-path decoding of a T x C matrix of per-step class scores (softmax
/// probabilities or logits). Class 0 is the blank; class k >= 1 maps to
/// vocabulary[k - 1]. Repeats collapse unless separated by a blank.
CtcDecoded ctc_greedy_decode(const cv::Mat& steps, std::span<const std::string> vocabulary);

std::vector<std::string> load_vocabulary(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Backends. Construction throws EngineUnavailable when the model or binary
// is missing.

class EastDetector final : public Detector {
 public:
  explicit EastDetector(const EngineConfig& config);
  ~EastDetector() override;
  std::string name() const override { return "east"; }
  bool reentrant() const override { return false; }
  std::vector<ScoredBox> detect(const Frame& frame) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

class CrnnRecognizer final : public Recognizer {
 public:
  explicit CrnnRecognizer(const EngineConfig& config);
  ~CrnnRecognizer() override;
  std::string name() const override { return "crnn"; }
  bool reentrant() const override { return false; }
  Recognition recognize(const Frame& region) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Runs the `tesseract` executable on each crop.
class TesseractRecognizer final : public Recognizer {
 public:
  explicit TesseractRecognizer(const EngineConfig& config);
  std::string name() const override { return "tesseract"; }
  bool reentrant() const override { return true; }
  Recognition recognize(const Frame& region) override;

  // Whether a tesseract binary is reachable (EGOTEXT_TESSERACT or PATH).
  static bool available();

 private:
  std::string binary_;
  EngineConfig config_;
};

// Factories. "mock" engines read ground truth from `library`.
std::shared_ptr<Detector> make_detector(const EngineConfig& config, std::shared_ptr<const MockLibrary> library);
std::shared_ptr<Recognizer> make_recognizer(const EngineConfig& config,
                                            std::shared_ptr<const MockLibrary> library);

// True when the named recognizer can be constructed in this environment.
bool recognizer_available(const EngineConfig& config);

}  // namespace egotext
