#include "egotext/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "egotext/csv.hpp"
#include "egotext/error.hpp"
#include "egotext/fsutil.hpp"

namespace egotext {

namespace fs = std::filesystem;

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
  if (x.size() < 2) throw std::invalid_argument("undefined correlation: fewer than two samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("undefined correlation: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

int CorrelationMatrix::index(std::string_view variable) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i] == variable) return static_cast<int>(i);
  }
  return -1;
}

std::optional<double> CorrelationMatrix::at(std::string_view a, std::string_view b) const {
  const int i = index(a);
  const int j = index(b);
  if (i < 0 || j < 0) return std::nullopt;
  return r[i][j];
}

CorrelationMatrix correlation_matrix(std::span<const EvalRecord> records, std::span<const std::string> variables,
                                     CorrelationMethod method) {
  if (records.size() < 2) throw std::invalid_argument("correlation needs at least two records");
  const std::size_t k = variables.size();
  std::vector<std::vector<std::optional<double>>> columns(k);
  for (std::size_t v = 0; v < k; ++v) {
    for (const EvalRecord& r : records) columns[v].push_back(metric_value(r, variables[v]));
  }

  CorrelationMatrix m;
  m.variables.assign(variables.begin(), variables.end());
  m.records = records.size();
  m.method = method;
  m.r.assign(k, std::vector<std::optional<double>>(k));
  m.n.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      std::vector<double> xs;
      std::vector<double> ys;
      for (std::size_t row = 0; row < records.size(); ++row) {
        if (columns[i][row] && columns[j][row]) {
          xs.push_back(*columns[i][row]);
          ys.push_back(*columns[j][row]);
        }
      }
      std::optional<double> value;
      try {
        value = method == CorrelationMethod::kSpearman ? spearman(xs, ys) : pearson(xs, ys);
        if (i == j) value = 1.0;
      } catch (const std::invalid_argument&) {
        value.reset();
      }
      m.r[i][j] = m.r[j][i] = value;
      m.n[i][j] = m.n[j][i] = xs.size();
    }
  }
  return m;
}

const std::vector<std::string>& lighting_variables() {
  static const std::vector<std::string> names = {"mean_brightness", "std_brightness", "global_luminance",
                                                 "contrast"};
  return names;
}

std::vector<std::string> default_correlation_variables(std::span<const EvalRecord> records) {
  std::vector<std::string> vars = lighting_variables();
  auto any = [&](std::string_view metric) {
    return std::any_of(records.begin(), records.end(),
                       [&](const EvalRecord& r) { return metric_value(r, metric).has_value(); });
  };
  for (const char* extra : {"cer", "detection_error", "distance_m", "resolution"}) {
    if (any(extra)) vars.emplace_back(extra);
  }
  return vars;
}

std::vector<ConditionCell> condition_summary(std::span<const EvalRecord> records) {
  std::map<std::string, std::vector<const EvalRecord*>> cells;
  for (const EvalRecord& r : records) {
    cells[r.conditions ? r.conditions->cell_key() : std::string("unspecified")].push_back(&r);
  }
  std::vector<ConditionCell> out;
  for (const auto& [key, members] : cells) {
    ConditionCell cell;
    cell.key = key;
    cell.conditions = members.front()->conditions;
    cell.count = members.size();
    std::vector<double> cer;
    std::vector<double> f1;
    for (const EvalRecord* r : members) {
      if (auto v = metric_value(*r, "cer")) cer.push_back(*v);
      if (auto v = metric_value(*r, "f1")) f1.push_back(*v);
    }
    cell.cer = summarize(cer);
    cell.f1 = summarize(f1);
    out.push_back(std::move(cell));
  }
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& records_csv_columns() {
  static const std::vector<std::string> cols = {
      "image_id",  "lighting",  "distance_m", "width", "height", "mean_brightness", "std_brightness",
      "global_luminance", "contrast", "precision", "recall", "f1", "cer", "S", "D", "I", "N"};
  return cols;
}

std::string records_to_csv(std::span<const EvalRecord> records) {
  std::string out;
  const auto& cols = records_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  auto num = [](double v) { return format_double(v); };
  for (const EvalRecord& r : records) {
    std::vector<std::string> f(cols.size());
    f[0] = csv_field(r.image_id);
    if (r.conditions) {
      f[1] = csv_field(to_string(r.conditions->lighting));
      f[2] = num(r.conditions->distance_m);
      f[3] = std::to_string(r.conditions->capture_width);
      f[4] = std::to_string(r.conditions->capture_height);
    }
    if (r.lighting) {
      f[5] = num(r.lighting->mean_brightness);
      f[6] = num(r.lighting->std_brightness);
      f[7] = num(r.lighting->global_luminance);
      f[8] = num(r.lighting->contrast);
    }
    if (r.detection) {
      f[9] = num(r.detection->precision);
      f[10] = num(r.detection->recall);
      f[11] = num(r.detection->f1);
    }
    if (r.recognition) {
      f[12] = num(r.recognition->cer);
      if (r.recognition->counts_known) {
        f[13] = std::to_string(r.recognition->substitutions);
        f[14] = std::to_string(r.recognition->deletions);
        f[15] = std::to_string(r.recognition->insertions);
        f[16] = std::to_string(r.recognition->n_ground_truth);
      }
    }
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
    out += '\n';
  }
  return out;
}

namespace {

template <typename T>
std::optional<T> cell(const std::vector<std::string>& row, int col, std::size_t line) {
  if (col < 0 || col >= static_cast<int>(row.size()) || row[col].empty()) return std::nullopt;
  const std::string& s = row[col];
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("records CSV line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
  return value;
}

template <typename... T>
bool all_or_none(std::size_t line, const char* group, const std::optional<T>&... values) {
  const int present = (0 + ... + (values.has_value() ? 1 : 0));
  if (present != 0 && present != static_cast<int>(sizeof...(values))) {
    throw DataError("records CSV line " + std::to_string(line) + ": incomplete " + group + " columns");
  }
  return present != 0;
}

}  // namespace

std::vector<EvalRecord> records_from_csv(std::string_view text) {
  const CsvTable t = parse_csv(text);
  if (t.column("image_id") < 0) throw DataError("records CSV needs an image_id column");
  auto col = [&](const char* name) { return t.column(name); };
  std::vector<EvalRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::size_t line = i + 2;
    EvalRecord r;
    r.image_id = row.at(col("image_id"));

    const int lc = col("lighting");
    std::optional<std::string> lighting;
    if (lc >= 0 && lc < static_cast<int>(row.size()) && !row[lc].empty()) lighting = row[lc];
    const auto dist = cell<double>(row, col("distance_m"), line);
    const auto w = cell<int>(row, col("width"), line);
    const auto h = cell<int>(row, col("height"), line);
    if (all_or_none(line, "condition", lighting, dist, w, h)) {
      auto l = parse_lighting(*lighting);
      if (!l) throw DataError("records CSV line " + std::to_string(line) + ": unknown lighting '" + *lighting + "'");
      r.conditions = ConditionMetadata{*l, *dist, *w, *h};
    }

    const auto mb = cell<double>(row, col("mean_brightness"), line);
    const auto sb = cell<double>(row, col("std_brightness"), line);
    const auto gl = cell<double>(row, col("global_luminance"), line);
    const auto ct = cell<double>(row, col("contrast"), line);
    if (all_or_none(line, "lighting", mb, sb, gl, ct)) r.lighting = LightingStats{*mb, *sb, *gl, *ct};

    const auto p = cell<double>(row, col("precision"), line);
    const auto rc = cell<double>(row, col("recall"), line);
    const auto f1 = cell<double>(row, col("f1"), line);
    if (all_or_none(line, "detection", p, rc, f1)) {
      DetectionEvalResult d;
      d.precision = *p;
      d.recall = *rc;
      d.f1 = *f1;
      d.counts_known = false;
      r.detection = d;
    }

    const auto cer_v = cell<double>(row, col("cer"), line);
    const auto s = cell<std::int64_t>(row, col("S"), line);
    const auto d = cell<std::int64_t>(row, col("D"), line);
    const auto ins = cell<std::int64_t>(row, col("I"), line);
    const auto n = cell<std::int64_t>(row, col("N"), line);
    const bool counts = all_or_none(line, "edit count", s, d, ins, n);
    if (cer_v) {
      RecognitionEvalResult rec;
      rec.cer = *cer_v;
      rec.counts_known = counts;
      if (counts) {
        rec.substitutions = *s;
        rec.deletions = *d;
        rec.insertions = *ins;
        rec.n_ground_truth = *n;
      }
      r.recognition = rec;
    } else if (counts) {
      throw DataError("records CSV line " + std::to_string(line) + ": edit counts without cer");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<EvalRecord> load_records_csv(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("records file not found: " + path.string());
  return records_from_csv(read_file(path));
}

}  // namespace egotext
