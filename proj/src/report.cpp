#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "egotext/analysis.hpp"
#include "egotext/csv.hpp"
#include "egotext/fsutil.hpp"
#include "egotext/image.hpp"

namespace egotext {

namespace fs = std::filesystem;

namespace {

constexpr std::array<ReferenceFigure, 7> kReference = {{
    {"CER, EAST + CRNN", 0.65},
    {"CER, EAST + PyTesseract", 0.82},
    {"CER, EAST + CRNN after 2x upscaling", 0.48},
    {"CER, EAST + CRNN after brightness enhancement", 0.67},
    {"Detection precision (20-image public subset)", 0.82},
    {"Detection recall (20-image public subset)", 0.50},
    {"Detection F1 (20-image public subset)", 0.67},
}};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string opt(const std::optional<double>& v, int digits = 4) { return v ? fixed(*v, digits) : "NA"; }

std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::span<const ReferenceFigure> reference_figures() { return kReference; }

Analyses analyze(std::span<const EvalRecord> records) {
  Analyses a;
  if (records.empty()) {
    a.notes.emplace_back("no records");
    return a;
  }
  a.summary = aggregate(records);
  if (records.size() >= 2) {
    const auto vars = default_correlation_variables(records);
    a.correlation = correlation_matrix(records, vars);
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (!a.correlation->r[i][i]) a.notes.push_back(vars[i] + ": constant or missing, correlations undefined");
    }
  } else {
    a.notes.emplace_back("correlation needs at least two records");
  }
  a.conditions = condition_summary(records);
  return a;
}

std::string correlation_to_csv(const CorrelationMatrix& m) {
  std::string out = "variable";
  for (const auto& v : m.variables) out += "," + csv_field(v);
  out += '\n';
  for (std::size_t i = 0; i < m.variables.size(); ++i) {
    out += csv_field(m.variables[i]);
    for (std::size_t j = 0; j < m.variables.size(); ++j) {
      out += ',';
      out += m.r[i][j] ? format_double(*m.r[i][j]) : "NA";
    }
    out += '\n';
  }
  return out;
}

std::string condition_summary_to_csv(std::span<const ConditionCell> cells) {
  std::string out = "cell,lighting,distance_m,width,height,count,cer_mean,cer_median,f1_mean,f1_median\n";
  for (const ConditionCell& c : cells) {
    out += csv_field(c.key);
    if (c.conditions) {
      out += "," + csv_field(to_string(c.conditions->lighting)) + "," + format_double(c.conditions->distance_m) + "," +
             std::to_string(c.conditions->capture_width) + "," + std::to_string(c.conditions->capture_height);
    } else {
      out += ",,,,";
    }
    out += "," + std::to_string(c.count);
    for (const auto& s : {c.cer, c.f1}) {
      out += s ? "," + format_double(s->mean) + "," + format_double(s->median) : ",,";
    }
    out += '\n';
  }
  return out;
}

std::string render_markdown_report(std::span<const EvalRecord> records, const Analyses& analyses) {
  std::string md = "# Text recognition under capture conditions\n\n";
  md += "Records: " + std::to_string(records.size()) + "\n\n";

  md += "## Summary\n\n";
  if (!analyses.summary) {
    md += "No data.\n\n";
  } else {
    md += "| metric | n | mean | median | min | max |\n|---|---|---|---|---|---|\n";
    for (const auto& [name, s] : analyses.summary->metrics) {
      md += "| " + name + " | " + std::to_string(s.count) + " | " + fixed(s.mean) + " | " + fixed(s.median) + " | " +
            fixed(s.min) + " | " + fixed(s.max) + " |\n";
    }
    if (analyses.summary->pooled_cer) md += "\nPooled CER (total edits / total characters): " + fixed(*analyses.summary->pooled_cer) + "\n";
    md += '\n';
  }

  md += "## Correlation (Pearson)\n\n";
  if (!analyses.correlation) {
    md += "No data.\n\n";
  } else {
    const CorrelationMatrix& m = *analyses.correlation;
    md += "|  |";
    for (const auto& v : m.variables) md += " " + v + " |";
    md += "\n|---|";
    for (std::size_t i = 0; i < m.variables.size(); ++i) md += "---|";
    md += '\n';
    for (std::size_t i = 0; i < m.variables.size(); ++i) {
      md += "| " + m.variables[i] + " |";
      for (std::size_t j = 0; j < m.variables.size(); ++j) md += " " + opt(m.r[i][j], 3) + " |";
      md += '\n';
    }
    md += "\nNA marks an undefined correlation (constant column or fewer than two paired values).\n\n";

    for (const char* target : {"detection_error", "cer"}) {
      if (m.index(target) < 0) continue;
      md += std::string("### Lighting vs ") +
            (std::string_view(target) == "cer" ? "recognition error (CER)" : "detection error (1 - F1)") + "\n\n";
      md += "| variable | r | abs(r) | n |\n|---|---|---|---|\n";
      for (const auto& v : lighting_variables()) {
        const int i = m.index(v);
        if (i < 0) continue;
        const int j = m.index(target);
        const auto r = m.r[i][j];
        md += "| " + v + " | " + opt(r) + " | " + opt(r ? std::optional(std::abs(*r)) : std::nullopt) + " | " +
              std::to_string(m.n[i][j]) + " |\n";
      }
      md += '\n';
    }
  }

  md += "## Condition cells\n\n";
  if (analyses.conditions.empty()) {
    md += "No data.\n\n";
  } else {
    md += "| cell | n | CER mean | CER median | F1 mean | F1 median |\n|---|---|---|---|---|---|\n";
    for (const ConditionCell& c : analyses.conditions) {
      md += "| " + md_cell(c.key) + " | " + std::to_string(c.count) + " | " +
            opt(c.cer ? std::optional(c.cer->mean) : std::nullopt) + " | " +
            opt(c.cer ? std::optional(c.cer->median) : std::nullopt) + " | " +
            opt(c.f1 ? std::optional(c.f1->mean) : std::nullopt) + " | " +
            opt(c.f1 ? std::optional(c.f1->median) : std::nullopt) + " |\n";
    }
    md += '\n';
  }

  if (!analyses.notes.empty()) {
    md += "## Notes\n\n";
    for (const auto& n : analyses.notes) md += "- " + n + "\n";
    md += '\n';
  }

  md += "## Reference figures\n\n";
  md += "Values reported for the original proprietary capture set and pretrained models. They are context only and are "
        "not expected to reproduce here.\n\n| figure | value |\n|---|---|\n";
  for (const ReferenceFigure& f : reference_figures()) md += "| " + std::string(f.label) + " | " + fixed(f.value, 2) + " |\n";
  return md;
}

namespace {

const cv::Scalar kInk(40, 40, 40);
const cv::Scalar kWhite(255, 255, 255);

void text(cv::Mat& img, const std::string& s, cv::Point at, double scale = 0.45) {
  cv::putText(img, s, at, cv::FONT_HERSHEY_SIMPLEX, scale, kInk, 1, cv::LINE_AA);
}

cv::Mat blank_plot(const std::string& title, int w, int h) {
  cv::Mat img(h, w, CV_8UC3, kWhite);
  text(img, title, {10, 24}, 0.6);
  return img;
}

// Blue for -1, white for 0, red for +1; grey for undefined.
cv::Scalar diverging(const std::optional<double>& r) {
  if (!r) return {200, 200, 200};
  const double t = std::clamp(*r, -1.0, 1.0);
  const double a = std::abs(t);
  const double fade = 255.0 * (1.0 - a);
  return t >= 0 ? cv::Scalar(fade, fade, 255) : cv::Scalar(255, fade, fade);
}

cv::Mat heatmap(const std::optional<CorrelationMatrix>& m) {
  if (!m || m->variables.empty()) {
    cv::Mat img = blank_plot("Correlation matrix", 400, 120);
    text(img, "no data", {10, 70});
    return img;
  }
  const int k = static_cast<int>(m->variables.size());
  const int cell = 70;
  const int left = 170;
  const int top = 50;
  cv::Mat img = blank_plot("Correlation matrix (Pearson r)", left + k * cell + 20, top + k * cell + 170);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const cv::Rect r(left + j * cell, top + i * cell, cell, cell);
      cv::rectangle(img, r, diverging(m->r[i][j]), cv::FILLED);
      cv::rectangle(img, r, kWhite, 1);
      text(img, opt(m->r[i][j], 2), {r.x + 12, r.y + cell / 2 + 5}, 0.45);
    }
    text(img, m->variables[i], {6, top + i * cell + cell / 2 + 5}, 0.42);
  }
  for (int j = 0; j < k; ++j) {
    // Column labels run downward beneath the grid.
    cv::Mat label(20, 160, CV_8UC3, kWhite);
    text(label, m->variables[j], {2, 15}, 0.42);
    cv::Mat rotated;
    cv::rotate(label, rotated, cv::ROTATE_90_CLOCKWISE);
    const cv::Rect dst(left + j * cell + cell / 2 - 10, top + k * cell + 5, rotated.cols, rotated.rows);
    rotated.copyTo(img(dst));
  }
  return img;
}

cv::Mat bar_chart(const std::string& title, std::span<const ConditionCell> cells, bool cer) {
  std::vector<std::pair<std::string, double>> bars;
  for (const ConditionCell& c : cells) {
    const auto& s = cer ? c.cer : c.f1;
    if (s) bars.emplace_back(c.key, s->mean);
  }
  if (bars.empty()) {
    cv::Mat img = blank_plot(title, 400, 120);
    text(img, "no data", {10, 70});
    return img;
  }
  const int bar = 36;
  const int left = 280;
  const int width = 400;
  const int top = 40;
  const double vmax = std::max(1.0, std::max_element(bars.begin(), bars.end(), [](auto& a, auto& b) {
                                      return a.second < b.second;
                                    })->second);
  cv::Mat img = blank_plot(title, left + width + 80, top + static_cast<int>(bars.size()) * bar + 20);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const int y = top + static_cast<int>(i) * bar;
    const int len = static_cast<int>(std::lround(width * std::max(0.0, bars[i].second) / vmax));
    cv::rectangle(img, cv::Rect(left, y + 6, std::max(len, 1), bar - 12),
                  cer ? cv::Scalar(60, 90, 200) : cv::Scalar(160, 120, 40), cv::FILLED);
    text(img, bars[i].first, {8, y + bar / 2 + 5}, 0.42);
    text(img, fixed(bars[i].second, 3), {left + len + 6, y + bar / 2 + 5}, 0.42);
  }
  cv::line(img, {left, top}, {left, top + static_cast<int>(bars.size()) * bar}, kInk, 1);
  return img;
}

}  // namespace

std::vector<fs::path> emit_report(std::span<const EvalRecord> records, const Analyses& analyses,
                                  const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  auto put = [&](const char* name, const std::string& contents) {
    write_file_atomic(out_dir / name, contents);
    written.push_back(out_dir / name);
  };
  auto plot = [&](const char* name, const cv::Mat& img) {
    save_image(Image(img), out_dir / name);
    written.push_back(out_dir / name);
  };
  put("records.csv", records_to_csv(records));
  put("correlation.csv", analyses.correlation ? correlation_to_csv(*analyses.correlation) : "variable\n");
  put("condition_summary.csv", condition_summary_to_csv(analyses.conditions));
  put("report.md", render_markdown_report(records, analyses));
  plot("correlation_heatmap.png", heatmap(analyses.correlation));
  plot("cer_by_condition.png", bar_chart("Mean CER by condition", analyses.conditions, true));
  plot("f1_by_condition.png", bar_chart("Mean F1 by condition", analyses.conditions, false));
  return written;
}

}  // namespace egotext
