#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "egotext/conditions.hpp"
#include "egotext/geometry.hpp"
#include "egotext/photometry.hpp"
#include "egotext/regions.hpp"

namespace egotext {

// Applied to both strings before CER scoring.
struct NormalizationPolicy {
  bool collapse_whitespace = true;  // runs of whitespace become one space
  bool trim = true;
  bool case_sensitive = true;
};

// Decodes UTF-8 (invalid bytes become U+FFFD) and applies the policy.
std::u32string normalize_text(std::string_view text, const NormalizationPolicy& policy);

struct RecognitionEvalResult {
  double cer = 0.0;
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t n_ground_truth = 0;
  // False for records read back from files that carry only the rate.
  bool counts_known = true;

  std::int64_t edits() const { return substitutions + deletions + insertions; }

  // Pools edit counts and recomputes the rate as edits / max(N, 1).
  RecognitionEvalResult& operator+=(const RecognitionEvalResult& other);
};

struct EditCounts {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
};

// Minimal unit-cost edit script between code-point sequences; the backtrace
// prefers substitution (or match), then insertion, then deletion.
EditCounts edit_counts(std::u32string_view ground_truth, std::u32string_view predicted);

/// Character error rate (S + D + I) / N on normalized strings.
/// When the normalized ground truth is empty the rate is the predicted
/// length (I / max(N, 1)). Not clamped; insertion-heavy output can exceed 1.
RecognitionEvalResult cer(std::string_view ground_truth, std::string_view predicted,
                          const NormalizationPolicy& norm = {});

struct DetectionEvalResult {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  // Precision has no predictions to rest on; reported as 1 by convention.
  bool precision_defined = true;
  bool counts_known = true;
};

// Fills precision/recall/f1 from counts.
DetectionEvalResult detection_result(int tp, int fp, int fn);

struct DetectionMatch {
  DetectionEvalResult result;
  std::vector<int> pred_to_gt;  // per prediction (input order): matched GT index or -1
};

inline constexpr double kDefaultIouThreshold = 0.5;

/// Greedy matching in descending confidence (ties: larger area, then
/// reading order). Each prediction takes the unmatched ground-truth box of
/// highest IoU and counts as a true positive when that IoU reaches the
/// threshold; otherwise it is a false positive and the box stays available.
DetectionMatch match_assignment(std::span<const Box> gt, std::span<const ScoredBox> pred,
                                double iou_threshold = kDefaultIouThreshold);

DetectionEvalResult match_detections(std::span<const Box> gt, std::span<const ScoredBox> pred,
                                     double iou_threshold = kDefaultIouThreshold);

/// Detection and recognition scores for one image. Recognition pools edit
/// operations over matched pairs; each unmatched ground-truth region adds
/// its full length as deletions. Texts of unmatched predictions are ignored.
std::pair<DetectionEvalResult, RecognitionEvalResult> score_regions(
    std::span<const GroundTruthRegion> gt, std::span<const TextRegion> predicted,
    double iou_threshold = kDefaultIouThreshold, const NormalizationPolicy& norm = {});

// One row of a benchmark run.
struct EvalRecord {
  std::string image_id;
  std::optional<ConditionMetadata> conditions;
  std::optional<LightingStats> lighting;
  std::optional<DetectionEvalResult> detection;
  std::optional<RecognitionEvalResult> recognition;
};

// Names accepted by metric_value: precision, recall, f1, cer,
// mean_brightness, std_brightness, global_luminance, contrast,
// detection_error (1 - f1), distance_m, resolution (width * height).
std::optional<double> metric_value(const EvalRecord& record, std::string_view metric);

const std::vector<std::string>& summary_metrics();

struct MetricSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Mean, median and range; nullopt for an empty sample.
std::optional<MetricSummary> summarize(std::span<const double> values);

struct GroupSummary {
  std::string key;  // ConditionMetadata::cell_key() or "unspecified"
  std::optional<ConditionMetadata> conditions;
  std::size_t count = 0;
  std::map<std::string, MetricSummary> metrics;
  std::optional<double> pooled_cer;
};

struct AggregateSummary {
  std::size_t count = 0;
  std::map<std::string, MetricSummary> metrics;  // only metrics present in some record
  std::optional<double> pooled_cer;              // total edits / total N
  std::vector<GroupSummary> groups;              // ordered by key
};

// Throws std::invalid_argument on an empty record list.
AggregateSummary aggregate(std::span<const EvalRecord> records);

}  // namespace egotext
