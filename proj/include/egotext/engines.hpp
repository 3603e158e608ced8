#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "egotext/geometry.hpp"
#include "egotext/image.hpp"
#include "egotext/preprocess.hpp"
#include "egotext/regions.hpp"

namespace egotext {

// An image plus the mapping from its pixels back to the source capture:
//   source = pixel / scale + offset.
// Crops and upscales update the mapping, which lets oracle engines locate
// their annotations in any derived view.
struct Frame {
  Image image;
  std::string id;
  double scale = 1.0;
  double offset_x = 0.0;
  double offset_y = 0.0;

  Box to_source(const Box& px) const;
  Box from_source(const Box& src) const;

  // Sub-image at integer pixel rect (intersected with the image).
  Frame cropped(const cv::Rect& rect) const;
  // Same view enlarged by `factor`, mapping updated.
  Frame rescaled(Image upscaled, int factor) const;
};

struct Recognition {
  std::string text;  // empty when nothing was read
  double confidence = 0.0;
};

// Engines report failures by throwing; the pipeline records them per region.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::string name() const = 0;
  // Whether one instance may serve several threads at once.
  virtual bool reentrant() const = 0;
  // Boxes lie within the image bounds.
  virtual std::vector<ScoredBox> detect(const Frame& frame) = 0;
};

class Recognizer {
 public:
  virtual ~Recognizer() = default;
  virtual std::string name() const = 0;
  virtual bool reentrant() const = 0;
  virtual Recognition recognize(const Frame& region) = 0;
};

// ---------------------------------------------------------------------------
// Mock engines: deterministic oracles driven by ground truth.

inline constexpr std::string_view kDefaultMockAlphabet =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

struct MockSpec {
  std::vector<GroundTruthRegion> ground_truth;  // source-frame coordinates
  double drop_rate = 0.0;                       // [0, 1]
  double jitter_px = 0.0;                       // >= 0, per edge, in view pixels
  double char_error_rate = 0.0;                 // [0, 1]
  std::uint64_t seed = 0;
  std::string alphabet = std::string(kDefaultMockAlphabet);  // substitution pool

  bool valid() const;
};

// Ground-truth boxes mapped into the frame, dropped and jittered under a
// generator seeded from (seed, frame id), clipped to the image. Confidence 1.
std::vector<ScoredBox> mock_detect(const Frame& frame, const MockSpec& spec);

// Text of the ground-truth region with highest IoU against the region's
// source-frame box ("" if none overlaps); each character is replaced with
// probability char_error_rate by a different alphabet character.
std::string mock_recognize(const Frame& region, const MockSpec& spec);

// Ground truth keyed by frame id, shared by the mock engines.
using MockLibrary = std::map<std::string, MockSpec>;

class MockDetector final : public Detector {
 public:
  explicit MockDetector(std::shared_ptr<const MockLibrary> library) : library_(std::move(library)) {}
  std::string name() const override { return "mock"; }
  bool reentrant() const override { return true; }
  std::vector<ScoredBox> detect(const Frame& frame) override;

 private:
  std::shared_ptr<const MockLibrary> library_;
};

class MockRecognizer final : public Recognizer {
 public:
  explicit MockRecognizer(std::shared_ptr<const MockLibrary> library) : library_(std::move(library)) {}
  std::string name() const override { return "mock"; }
  bool reentrant() const override { return true; }
  Recognition recognize(const Frame& region) override;

 private:
  std::shared_ptr<const MockLibrary> library_;
};

// Serializes access to a non-reentrant engine shared by a worker pool.
class SerializedDetector final : public Detector {
 public:
  explicit SerializedDetector(std::shared_ptr<Detector> inner) : inner_(std::move(inner)) {}
  std::string name() const override { return inner_->name(); }
  bool reentrant() const override { return true; }
  std::vector<ScoredBox> detect(const Frame& frame) override;

 private:
  std::shared_ptr<Detector> inner_;
  std::mutex mutex_;
};

class SerializedRecognizer final : public Recognizer {
 public:
  explicit SerializedRecognizer(std::shared_ptr<Recognizer> inner) : inner_(std::move(inner)) {}
  std::string name() const override { return inner_->name(); }
  bool reentrant() const override { return true; }
  Recognition recognize(const Frame& region) override;

 private:
  std::shared_ptr<Recognizer> inner_;
  std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Detect -> merge -> recognize.

struct PipelineOptions {
  MergeParams merge;
  std::optional<PreprocessChain> preprocess;
  int crop_padding_px = 0;  // margin added around each merged box before recognition
};

struct PipelineResult {
  std::vector<TextRegion> regions;  // original-frame pixels, reading order
  std::size_t detector_pixels = 0;  // pixels of the image handed to the detector
  std::size_t raw_detections = 0;
  int scale = 1;
  int recognizer_failures = 0;
};

/// Runs the pipeline on one frame. Returned boxes are in the pixel frame of
/// `frame.image` as passed in, whatever preprocessing did. A recognizer
/// exception leaves that region with empty text and the error flag set.
PipelineResult run_pipeline(const Frame& frame, Detector& detector, Recognizer& recognizer,
                            const PipelineOptions& options);

std::vector<TextRegion> run_pipeline(const Image& img, Detector& detector, const MergeParams& merge,
                                     Recognizer& recognizer,
                                     const std::optional<PreprocessChain>& preprocess = std::nullopt);

}  // namespace egotext
