#pragma once

#include <compare>
#include <span>
#include <vector>

namespace egotext {

// Axis-aligned rectangle in image pixels; origin top-left, y grows downward.
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }

  // Finite coordinates with min <= max on both axes.
  bool valid() const;
  bool contains(const Box& other) const;

  Box translated(double dx, double dy) const { return {x_min + dx, y_min + dy, x_max + dx, y_max + dy}; }
  Box scaled(double sx, double sy) const { return {x_min * sx, y_min * sy, x_max * sx, y_max * sy}; }
  Box clipped(double width, double height) const;

  friend bool operator==(const Box&, const Box&) = default;
};

// Lexicographic order (y_min, x_min, x_max, y_max) used for every
// deterministic sort in the merge heuristic.
bool reading_order_less(const Box& a, const Box& b);

struct ScoredBox {
  Box box;
  double confidence = 1.0;  // in [0, 1]

  friend bool operator==(const ScoredBox&, const ScoredBox&) = default;
};

struct MergeParams {
  enum class Mode { kAbsolute, kRelativeToMedianHeight };

  double epsilon_y = 0.5;  // vertical edge proximity
  double epsilon_x = 1.0;  // largest horizontal gap allowed inside a line
  Mode mode = Mode::kRelativeToMedianHeight;

  static MergeParams absolute(double eps_y, double eps_x) { return {eps_y, eps_x, Mode::kAbsolute}; }
  static MergeParams relative(double k_y, double k_x) { return {k_y, k_x, Mode::kRelativeToMedianHeight}; }

  bool valid() const;
};

// Intersection over union; 0 when the union has zero area.
double iou(const Box& a, const Box& b);

// Smallest box containing every box in the group. Throws
// std::invalid_argument("empty group") on an empty span.
Box envelope(std::span<const Box> boxes);

double median_height(std::span<const Box> boxes);

// Thresholds in pixels after resolving relative mode against the input.
MergeParams resolve_thresholds(std::span<const Box> boxes, const MergeParams& params);

// Output of the merge heuristic with group membership retained.
struct MergeResult {
  std::vector<Box> boxes;                 // sorted with reading_order_less
  std::vector<std::vector<int>> members;  // indices into the input, per output box
};

/// Groups detector boxes into text-line regions.
///
/// Each round sorts the current boxes, collects them into line groups by
/// top/bottom edge proximity (|dy| <= epsilon_y against the running group
/// envelope), splits each line wherever the horizontal gap to the running
/// envelope exceeds epsilon_x and replaces each group by its envelope. Any
/// two groups whose envelopes both contain the same input box are fused so
/// that every input lies in exactly one output. Rounds repeat until the box
/// set stops shrinking. Relative thresholds are resolved once against the
/// median height of the original input.
MergeResult merge_boxes_grouped(std::span<const Box> boxes, const MergeParams& params);

std::vector<Box> merge_boxes(std::span<const Box> boxes, const MergeParams& params);

}  // namespace egotext
