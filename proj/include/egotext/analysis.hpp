#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egotext/evaluation.hpp"

namespace egotext {

// Sample Pearson correlation. Throws std::invalid_argument on length
// mismatch, fewer than two samples, or zero variance ("undefined correlation").
double pearson(std::span<const double> x, std::span<const double> y);

// Pearson on average ranks. Offered for robustness checks; the study itself
// reports linear correlation.
double spearman(std::span<const double> x, std::span<const double> y);

enum class CorrelationMethod { kPearson, kSpearman };

struct CorrelationMatrix {
  std::vector<std::string> variables;
  // r[i][j]; nullopt marks an undefined correlation (constant column or
  // fewer than two paired samples).
  std::vector<std::vector<std::optional<double>>> r;
  // Samples used for each pair after pairwise deletion of missing values.
  std::vector<std::vector<std::size_t>> n;
  std::size_t records = 0;
  CorrelationMethod method = CorrelationMethod::kPearson;

  int index(std::string_view variable) const;
  std::optional<double> at(std::string_view a, std::string_view b) const;
};

// Variables are metric names understood by metric_value(). Throws
// std::invalid_argument with fewer than two records.
CorrelationMatrix correlation_matrix(std::span<const EvalRecord> records, std::span<const std::string> variables,
                                     CorrelationMethod method = CorrelationMethod::kPearson);

const std::vector<std::string>& lighting_variables();

// Lighting columns plus whichever error and condition columns the records carry.
std::vector<std::string> default_correlation_variables(std::span<const EvalRecord> records);

struct ConditionCell {
  std::string key;
  std::optional<ConditionMetadata> conditions;
  std::size_t count = 0;
  std::optional<MetricSummary> cer;
  std::optional<MetricSummary> f1;
};

// Mean/median CER and F1 per lighting x distance x resolution cell, ordered
// by key; cells without records do not appear.
std::vector<ConditionCell> condition_summary(std::span<const EvalRecord> records);

// ---------------------------------------------------------------------------
// Per-image records CSV.

// image_id,lighting,distance_m,width,height,mean_brightness,std_brightness,
// global_luminance,contrast,precision,recall,f1,cer,S,D,I,N
const std::vector<std::string>& records_csv_columns();

std::string records_to_csv(std::span<const EvalRecord> records);
// Empty cells are missing values. Throws DataError on a malformed file.
std::vector<EvalRecord> records_from_csv(std::string_view text);
std::vector<EvalRecord> load_records_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Report.

// Headline figures of the original study; shown for context only.
struct ReferenceFigure {
  std::string_view label;
  double value;
};
std::span<const ReferenceFigure> reference_figures();

struct Analyses {
  std::optional<AggregateSummary> summary;
  std::optional<CorrelationMatrix> correlation;
  std::vector<ConditionCell> conditions;
  std::vector<std::string> notes;
};

// Summary, default correlation matrix and condition table. Parts that need
// more data than is present are left empty and explained in `notes`.
Analyses analyze(std::span<const EvalRecord> records);

std::string correlation_to_csv(const CorrelationMatrix& m);
std::string condition_summary_to_csv(std::span<const ConditionCell> cells);
std::string render_markdown_report(std::span<const EvalRecord> records, const Analyses& analyses);

/// Writes records.csv, correlation.csv, condition_summary.csv, report.md,
/// correlation_heatmap.png, cer_by_condition.png and f1_by_condition.png
/// into out_dir. Output is byte-identical for identical input.
std::vector<std::filesystem::path> emit_report(std::span<const EvalRecord> records, const Analyses& analyses,
                                               const std::filesystem::path& out_dir);

}  // namespace egotext
