#include "egotext/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "egotext/utf8.hpp"

namespace egotext {

namespace {

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f' ||
         c == 0x00A0 || c == 0x3000;
}

char32_t fold_case(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  // Latin-1 capitals, excluding the multiplication sign.
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  return c;
}

double safe_ratio(double num, double den, double if_zero) { return den == 0.0 ? if_zero : num / den; }

}  // namespace

std::u32string normalize_text(std::string_view text, const NormalizationPolicy& policy) {
  std::u32string s = decode_utf8(text);
  if (!policy.case_sensitive) {
    for (char32_t& c : s) c = fold_case(c);
  }
  if (policy.collapse_whitespace) {
    std::u32string collapsed;
    collapsed.reserve(s.size());
    bool in_space = false;
    for (char32_t c : s) {
      if (is_space(c)) {
        if (!in_space) collapsed.push_back(U' ');
        in_space = true;
      } else {
        collapsed.push_back(c);
        in_space = false;
      }
    }
    s = std::move(collapsed);
  }
  if (policy.trim) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    s = s.substr(b, e - b);
  }
  return s;
}

EditCounts edit_counts(std::u32string_view gt, std::u32string_view pred) {
  const std::size_t n = gt.size();
  const std::size_t m = pred.size();
  const std::size_t cols = m + 1;
  std::vector<std::int32_t> dist((n + 1) * cols);
  auto at = [&](std::size_t i, std::size_t j) -> std::int32_t& { return dist[i * cols + j]; };

  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::int32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::int32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::int32_t sub = at(i - 1, j - 1) + (gt[i - 1] == pred[j - 1] ? 0 : 1);
      at(i, j) = std::min({sub, at(i, j - 1) + 1, at(i - 1, j) + 1});
    }
  }

  EditCounts counts;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = gt[i - 1] == pred[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      ++counts.insertions;
      --j;
    } else {
      ++counts.deletions;
      --i;
    }
  }
  return counts;
}

RecognitionEvalResult& RecognitionEvalResult::operator+=(const RecognitionEvalResult& other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  n_ground_truth += other.n_ground_truth;
  counts_known = counts_known && other.counts_known;
  cer = static_cast<double>(edits()) / static_cast<double>(std::max<std::int64_t>(n_ground_truth, 1));
  return *this;
}

RecognitionEvalResult cer(std::string_view ground_truth, std::string_view predicted,
                          const NormalizationPolicy& norm) {
  const std::u32string gt = normalize_text(ground_truth, norm);
  const std::u32string pred = normalize_text(predicted, norm);
  const EditCounts e = edit_counts(gt, pred);
  RecognitionEvalResult r;
  r.substitutions = e.substitutions;
  r.deletions = e.deletions;
  r.insertions = e.insertions;
  r.n_ground_truth = static_cast<std::int64_t>(gt.size());
  r.cer = static_cast<double>(r.edits()) / static_cast<double>(std::max<std::int64_t>(r.n_ground_truth, 1));
  return r;
}

DetectionEvalResult detection_result(int tp, int fp, int fn) {
  DetectionEvalResult r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision_defined = tp + fp > 0;
  r.precision = safe_ratio(tp, tp + fp, 1.0);
  r.recall = safe_ratio(tp, tp + fn, 1.0);
  const double denom = r.precision + r.recall;
  r.f1 = denom == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / denom;
  return r;
}

DetectionMatch match_assignment(std::span<const Box> gt, std::span<const ScoredBox> pred,
                                double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw std::invalid_argument("iou_threshold must lie in (0, 1]");
  }
  std::vector<std::size_t> order(pred.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const ScoredBox& pa = pred[a];
    const ScoredBox& pb = pred[b];
    if (pa.confidence != pb.confidence) return pa.confidence > pb.confidence;
    if (pa.box.area() != pb.box.area()) return pa.box.area() > pb.box.area();
    return reading_order_less(pa.box, pb.box);
  });

  // Ties between equally good ground-truth boxes resolve by box order, so the
  // outcome does not depend on the order of the ground-truth list.
  auto gt_less = [&](std::size_t a, std::size_t b) {
    if (reading_order_less(gt[a], gt[b])) return true;
    if (reading_order_less(gt[b], gt[a])) return false;
    return a < b;
  };

  DetectionMatch match;
  match.pred_to_gt.assign(pred.size(), -1);
  std::vector<bool> taken(gt.size(), false);
  int tp = 0;
  for (std::size_t p : order) {
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (taken[g]) continue;
      const double v = iou(pred[p].box, gt[g]);
      if (v > best_iou || (v == best_iou && best >= 0 && gt_less(g, static_cast<std::size_t>(best)))) {
        best = static_cast<int>(g);
        best_iou = v;
      }
    }
    if (best >= 0 && best_iou >= iou_threshold) {
      taken[best] = true;
      match.pred_to_gt[p] = best;
      ++tp;
    }
  }
  const int n_pred = static_cast<int>(pred.size());
  const int n_gt = static_cast<int>(gt.size());
  match.result = detection_result(tp, n_pred - tp, n_gt - tp);
  return match;
}

DetectionEvalResult match_detections(std::span<const Box> gt, std::span<const ScoredBox> pred,
                                     double iou_threshold) {
  return match_assignment(gt, pred, iou_threshold).result;
}

std::pair<DetectionEvalResult, RecognitionEvalResult> score_regions(
    std::span<const GroundTruthRegion> gt, std::span<const TextRegion> predicted,
    double iou_threshold, const NormalizationPolicy& norm) {
  std::vector<Box> gt_boxes;
  gt_boxes.reserve(gt.size());
  for (const auto& g : gt) gt_boxes.push_back(g.box);
  std::vector<ScoredBox> pred_boxes;
  pred_boxes.reserve(predicted.size());
  for (const auto& p : predicted) pred_boxes.push_back({p.box, p.detection_confidence});

  const DetectionMatch match = match_assignment(gt_boxes, pred_boxes, iou_threshold);
  std::vector<int> gt_to_pred(gt.size(), -1);
  for (std::size_t p = 0; p < match.pred_to_gt.size(); ++p) {
    if (match.pred_to_gt[p] >= 0) gt_to_pred[match.pred_to_gt[p]] = static_cast<int>(p);
  }

  std::vector<std::size_t> reading(gt.size());
  std::iota(reading.begin(), reading.end(), 0);
  std::stable_sort(reading.begin(), reading.end(),
                   [&](std::size_t a, std::size_t b) { return reading_order_less(gt[a].box, gt[b].box); });

  RecognitionEvalResult pooled;
  for (std::size_t g : reading) {
    const std::string_view pred_text =
        gt_to_pred[g] >= 0 ? std::string_view(predicted[gt_to_pred[g]].text) : std::string_view();
    pooled += cer(gt[g].text, pred_text, norm);
  }
  return {match.result, pooled};
}

std::optional<double> metric_value(const EvalRecord& r, std::string_view metric) {
  if (metric == "precision" && r.detection) return r.detection->precision;
  if (metric == "recall" && r.detection) return r.detection->recall;
  if (metric == "f1" && r.detection) return r.detection->f1;
  if (metric == "detection_error" && r.detection) return 1.0 - r.detection->f1;
  if (metric == "cer" && r.recognition) return r.recognition->cer;
  if (metric == "mean_brightness" && r.lighting) return r.lighting->mean_brightness;
  if (metric == "std_brightness" && r.lighting) return r.lighting->std_brightness;
  if (metric == "global_luminance" && r.lighting) return r.lighting->global_luminance;
  if (metric == "contrast" && r.lighting) return r.lighting->contrast;
  if (metric == "distance_m" && r.conditions) return r.conditions->distance_m;
  if (metric == "resolution" && r.conditions) {
    return static_cast<double>(r.conditions->capture_width) * r.conditions->capture_height;
  }
  return std::nullopt;
}

const std::vector<std::string>& summary_metrics() {
  static const std::vector<std::string> names = {
      "mean_brightness", "std_brightness", "global_luminance", "contrast",
      "precision",       "recall",         "f1",               "cer"};
  return names;
}

std::optional<MetricSummary> summarize(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  MetricSummary s;
  s.count = v.size();
  // Sorted summation keeps the result independent of record order.
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.mean = std::clamp(s.mean, v.front(), v.back());
  const std::size_t mid = v.size() / 2;
  s.median = v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  s.min = v.front();
  s.max = v.back();
  return s;
}

namespace {

void fill_metrics(std::span<const EvalRecord* const> records, std::map<std::string, MetricSummary>& out,
                  std::optional<double>& pooled) {
  for (const std::string& name : summary_metrics()) {
    std::vector<double> values;
    for (const EvalRecord* r : records) {
      if (auto v = metric_value(*r, name)) values.push_back(*v);
    }
    if (auto s = summarize(values)) out.emplace(name, *s);
  }
  RecognitionEvalResult total;
  bool any = false;
  for (const EvalRecord* r : records) {
    if (r->recognition && r->recognition->counts_known) {
      total += *r->recognition;
      any = true;
    }
  }
  if (any) pooled = total.cer;
}

}  // namespace

AggregateSummary aggregate(std::span<const EvalRecord> records) {
  if (records.empty()) throw std::invalid_argument("aggregate requires at least one record");
  AggregateSummary summary;
  summary.count = records.size();

  std::vector<const EvalRecord*> all;
  std::map<std::string, std::vector<const EvalRecord*>> cells;
  for (const EvalRecord& r : records) {
    all.push_back(&r);
    cells[r.conditions ? r.conditions->cell_key() : std::string("unspecified")].push_back(&r);
  }
  fill_metrics(all, summary.metrics, summary.pooled_cer);
  for (auto& [key, members] : cells) {
    GroupSummary g;
    g.key = key;
    g.conditions = members.front()->conditions;
    g.count = members.size();
    fill_metrics(members, g.metrics, g.pooled_cer);
    summary.groups.push_back(std::move(g));
  }
  return summary;
}

}  // namespace egotext
