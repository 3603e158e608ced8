// Acceptance suite. One status line per criterion:
//   PASS | FAIL | SKIP | UNATTAINABLE  <id>  <name>  -- <detail>
// Exit status is non-zero only when some criterion FAILs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "egotext/adapters.hpp"
#include "egotext/analysis.hpp"
#include "egotext/app.hpp"
#include "egotext/dataset.hpp"
#include "egotext/engines.hpp"
#include "egotext/evaluation.hpp"
#include "egotext/fsutil.hpp"
#include "egotext/gaze.hpp"
#include "egotext/geometry.hpp"
#include "egotext/photometry.hpp"
#include "egotext/preprocess.hpp"
#include "oracles.hpp"

using namespace egotext;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kIouTol = 1e-6;
constexpr double kPublishedTol = 0.005;
constexpr double kFrozenTol = 1e-9;
constexpr double kEndToEndPx = 1.0;
constexpr double kMeanShiftTol = 1e-9;  // mean is a quotient; the sum it divides is exact
constexpr double kCerBudgetSeconds = 60.0;

enum class Status { kPass, kFail, kSkip, kUnattainable };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::kPass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::kFail, std::move(d)}; }

const char* label(Status s) {
  switch (s) {
    case Status::kPass: return "PASS";
    case Status::kFail: return "FAIL";
    case Status::kSkip: return "SKIP";
    case Status::kUnattainable: return "UNATTAINABLE";
  }
  return "?";
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "egotext_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

bool near_box(const Box& a, const Box& b, double tol) {
  return std::abs(a.x_min - b.x_min) <= tol && std::abs(a.y_min - b.y_min) <= tol &&
         std::abs(a.x_max - b.x_max) <= tol && std::abs(a.y_max - b.y_max) <= tol;
}

// ---------------------------------------------------------------------------

Outcome cer_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const NormalizationPolicy raw{false, false, true};
  std::vector<std::string> words{""};
  for (std::size_t start = 0; words.back().size() < 6;) {
    const std::size_t end = words.size();
    for (std::size_t i = start; i < end; ++i) {
      for (char c : {'a', 'b', 'c'}) words.push_back(words[i] + c);
    }
    start = end;
  }
  long pairs = 0;
  for (const auto& s : words) {
    for (const auto& t : words) {
      const auto r = cer(s, t, raw);
      if (r.edits() != oracle::levenshtein(s, t)) return fail("'" + s + "' vs '" + t + "'");
      ++pairs;
    }
  }
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> len(0, 40);
  std::uniform_int_distribution<int> ch(32, 126);
  std::uniform_int_distribution<int> small(0, 5);
  for (int i = 0; i < 10000; ++i) {
    std::string s, t;
    // Half the pairs draw from a narrow alphabet so that matches are common.
    const bool narrow = i % 2 == 0;
    for (int k = len(rng); k > 0; --k) s += narrow ? char('a' + small(rng)) : char(ch(rng));
    for (int k = len(rng); k > 0; --k) t += narrow ? char('a' + small(rng)) : char(ch(rng));
    const auto r = cer(s, t, raw);
    const long want = oracle::levenshtein(s, t);
    if (r.edits() != want) return fail("random pair " + std::to_string(i));
    if (i < 500 && oracle::RecursiveEdit(s, t).distance() != want) return fail("oracles disagree on pair " + std::to_string(i));
    ++pairs;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= kCerBudgetSeconds) return fail("took " + fmt(secs) + " s");
  return pass(std::to_string(pairs) + " pairs in " + fmt(secs, 3) + " s");
}

Outcome iou_oracle() {
  std::mt19937 rng(2);
  std::uniform_int_distribution<int> c(0, 50);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    auto box = [&] {
      int x0 = c(rng), x1 = c(rng), y0 = c(rng), y1 = c(rng);
      return Box{double(std::min(x0, x1)), double(std::min(y0, y1)), double(std::max(x0, x1)), double(std::max(y0, y1))};
    };
    const Box a = box(), b = box();
    worst = std::max(worst, std::abs(iou(a, b) - oracle::raster_iou(a, b)));
  }
  if (worst > kIouTol) return fail("max deviation " + fmt(worst));
  return pass("1000 pairs, max deviation " + fmt(worst));
}

Outcome merge_properties() {
  // Fixtures.
  {
    const std::vector<Box> words{{0, 0, 10, 10}, {12, 0, 22, 10}};
    if (merge_boxes(words, MergeParams::absolute(2, 5)) != std::vector<Box>{{0, 0, 22, 10}}) return fail("join fixture");
    if (merge_boxes(words, MergeParams::absolute(2, 1)) != words) return fail("gap fixture");
    const std::vector<Box> lines{{0, 0, 10, 10}, {0, 30, 10, 40}};
    if (merge_boxes(lines, MergeParams::absolute(2, 5)) != lines) return fail("line fixture");
    if (!merge_boxes({}, MergeParams{}).empty()) return fail("empty fixture");
  }
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> count(0, 30);
  std::uniform_int_distribution<int> pos(0, 120);
  std::uniform_int_distribution<int> ext(0, 25);
  std::uniform_real_distribution<double> eps(0.0, 12.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Box> in;
    for (int i = count(rng); i > 0; --i) {
      const double x = pos(rng), y = pos(rng);
      in.push_back({x, y, x + ext(rng), y + ext(rng)});
    }
    // Alternate pixel and height-relative thresholds.
    const bool relative = trial % 2 == 1;
    const MergeParams p = relative ? MergeParams::relative(eps(rng) / 12.0, eps(rng) / 6.0)
                                   : MergeParams::absolute(eps(rng), eps(rng));
    const auto out = merge_boxes(in, p);
    for (const Box& b : in) {
      if (std::count_if(out.begin(), out.end(), [&](const Box& o) { return o.contains(b); }) != 1) {
        return fail("containment, trial " + std::to_string(trial));
      }
    }
    // Idempotence is stated for the resolved pixel thresholds: relative mode
    // would re-measure the median on merged boxes.
    const MergeParams resolved = resolve_thresholds(in, p);
    if (merge_boxes(out, resolved) != out) return fail("idempotence, trial " + std::to_string(trial));
    auto shuffled = in;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (merge_boxes(shuffled, p) != out) return fail("permutation, trial " + std::to_string(trial));
  }
  return pass("fixtures + 1000 random sets");
}

Outcome detection_matching() {
  const std::vector<Box> gt1{{0, 0, 10, 10}};
  const std::vector<ScoredBox> pred2{{{0, 0, 10, 10}, 0.9}, {{50, 50, 60, 60}, 0.8}};
  const auto f = match_detections(gt1, pred2, 0.5);
  if (f.precision != 0.5 || f.recall != 1.0 || std::abs(f.f1 - 2.0 / 3.0) > 1e-12) return fail("fixture");
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> n(0, 10);
  std::uniform_int_distribution<int> c(0, 60);
  for (int trial = 0; trial < 1000; ++trial) {
    auto box = [&] {
      const double x = c(rng), y = c(rng);
      return Box{x, y, x + 1 + c(rng) / 3, y + 1 + c(rng) / 3};
    };
    std::vector<Box> gt;
    std::vector<ScoredBox> pred;
    for (int i = n(rng); i > 0; --i) gt.push_back(box());
    for (int i = n(rng); i > 0; --i) pred.push_back({box(), c(rng) / 60.0});
    const auto r = match_detections(gt, pred);
    if (r.tp + r.fn != int(gt.size()) || r.tp + r.fp != int(pred.size())) return fail("trial " + std::to_string(trial));
  }
  return pass("fixture P=0.5 R=1 F1=2/3; 1000 random instances");
}

// The twenty published rows. Their means do not all agree with the stated summary figures.
std::vector<Outcome> published_rows() {
  std::vector<Outcome> out;
  const auto records = load_records_csv(fs::path(EGOTEXT_TEST_DATA) / "published_records.csv");
  const Analyses a = analyze(records);
  const auto& m = a.summary->metrics;
  const double p = m.at("precision").mean, r = m.at("recall").mean, f1 = m.at("f1").mean;

  out.push_back(std::abs(f1 - 0.67) <= kPublishedTol ? pass("mean F1 " + fmt(f1) + " vs 0.67")
                                                   : fail("mean F1 " + fmt(f1) + " vs 0.67"));
  const bool p_ok = std::abs(p - 0.82) <= kPublishedTol;
  const bool r_ok = std::abs(r - 0.50) <= kPublishedTol;
  const std::string pr = "mean P " + fmt(p) + " vs 0.82, mean R " + fmt(r) + " vs 0.50";
  // Both the analysis and an independent recomputation agree on these means;
  // the stated figures cannot be reached from the published rows.
  out.push_back(p_ok && r_ok ? pass(pr) : Outcome{Status::kUnattainable, pr + " (published rows do not average to the stated values)"});

  const CorrelationMatrix& cm = *a.correlation;
  std::string corr;
  const std::pair<const char*, double> frozen[] = {{"mean_brightness", -0.2998300831257809},
                                                    {"std_brightness", -0.3755424517233553},
                                                    {"global_luminance", -0.24302539414815222},
                                                    {"contrast", -0.5295552160486583}};
  auto check = [&]() -> Outcome {
    for (const auto& [v, want] : frozen) {
      const auto got = cm.at(v, "detection_error");
      if (!got) return fail(std::string(v) + " undefined");
      if (std::abs(*got - want) > kFrozenTol) return fail(std::string(v) + " r=" + fmt(*got));
      corr += std::string(corr.empty() ? "" : ", ") + v + " |r|=" + fmt(std::abs(*got), 4);
    }
    for (std::size_t i = 0; i < cm.variables.size(); ++i) {
      if (cm.r[i][i] && *cm.r[i][i] != 1.0) return fail("diagonal");
      for (std::size_t j = 0; j < cm.variables.size(); ++j) {
        if (cm.r[i][j] != cm.r[j][i]) return fail("symmetry");
      }
    }
    return pass(corr + " vs (1 - F1); symmetric, unit diagonal");
  };
  out.push_back(check());
  return out;
}

Outcome end_to_end() {
  const fs::path dir = work_dir() / "e2e";
  const auto entries = generate_synthetic(SyntheticSpec::standard(), dir / "syn");
  write_file_atomic(dir / "mock.json", "{}");
  run_command(dir / "syn" / "manifest.json", dir / "mock.json", dir / "run");
  const auto records = load_records_csv(dir / "run" / "records.csv");
  if (records.size() != entries.size()) return fail("record count");
  for (const auto& r : records) {
    if (!r.recognition || r.recognition->cer != 0.0) return fail(r.image_id + " CER");
    if (!r.detection || r.detection->f1 != 1.0) return fail(r.image_id + " F1");
  }

  double worst = 0;
  for (const auto& e : entries) {
    auto lib = std::make_shared<MockLibrary>();
    (*lib)[e.id].ground_truth = e.regions;
    MockDetector det(lib);
    MockRecognizer rec(lib);
    PipelineOptions opt;
    opt.preprocess = PreprocessChain{};
    opt.preprocess->upscale_factor = 2;
    const auto res = run_pipeline(Frame{load_image(e.image_path), e.id}, det, rec, opt);
    if (res.scale != 2 || res.regions.size() != e.regions.size()) return fail(e.id + " upscaled region count");
    for (const auto& g : e.regions) {
      const auto it = std::find_if(res.regions.begin(), res.regions.end(),
                                   [&](const TextRegion& t) { return near_box(t.box, g.box, kEndToEndPx); });
      if (it == res.regions.end()) return fail(e.id + " no box within 1 px of '" + g.text + "'");
      if (it->text != g.text) return fail(e.id + " upscaled text");
      worst = std::max({worst, std::abs(it->box.x_min - g.box.x_min), std::abs(it->box.y_min - g.box.y_min),
                        std::abs(it->box.x_max - g.box.x_max), std::abs(it->box.y_max - g.box.y_max)});
    }
  }
  return pass(std::to_string(records.size()) + " images CER=0 F1=1; 2x upscale max edge error " + fmt(worst) + " px");
}

Image random_rgb(std::mt19937& rng, int w, int h, int hi = 255) {
  std::uniform_int_distribution<int> v(0, hi);
  cv::Mat m(h, w, CV_8UC3);
  for (auto it = m.begin<cv::Vec3b>(); it != m.end<cv::Vec3b>(); ++it) *it = cv::Vec3b(v(rng), v(rng), v(rng));
  return Image(m);
}

Outcome photometry() {
  for (int v : {0, 1, 77, 128, 254, 255}) {
    for (const Image& img : {Image::gray(9, 4, static_cast<unsigned char>(v)), Image::color(5, 6, cv::Scalar(v, v, v))}) {
      const auto s = lighting_stats(img);
      if (s.mean_brightness != v || s.std_brightness != 0 || s.contrast != 0 || s.global_luminance != v) {
        return fail("constant image " + std::to_string(v));
      }
    }
  }
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> shift(1, 55);
  for (int i = 0; i < 50; ++i) {
    const Image img = random_rgb(rng, 17, 11, 200);
    const int c = shift(rng);
    Image shifted = img.clone();
    shifted.mat() += cv::Scalar(c, c, c);
    const auto a = lighting_stats(img), b = lighting_stats(shifted);
    if (b.std_brightness != a.std_brightness || b.contrast != a.contrast) return fail("shift invariance");
    if (std::abs(b.mean_brightness - a.mean_brightness - c) > kMeanShiftTol) return fail("mean shift");

    cv::Mat flat = img.mat().reshape(3, 1).clone();
    std::vector<cv::Vec3b> px(flat.begin<cv::Vec3b>(), flat.end<cv::Vec3b>());
    std::shuffle(px.begin(), px.end(), rng);
    cv::Mat perm(img.height(), img.width(), CV_8UC3);
    std::copy(px.begin(), px.end(), perm.begin<cv::Vec3b>());
    const auto q = lighting_stats(Image(perm));
    if (q.mean_brightness != a.mean_brightness || q.std_brightness != a.std_brightness ||
        q.global_luminance != a.global_luminance || q.contrast != a.contrast) {
      return fail("permutation invariance");
    }
  }
  for (int i = 0; i < 100; ++i) {
    const auto s = lighting_stats(random_rgb(rng, 24, 16));
    if (s.global_luminance < s.mean_brightness) return fail("global < mean on image " + std::to_string(i));
  }
  return pass("constant, shift, permutation suites; global >= mean on 100 random images");
}

Outcome gaze_geometry() {
  const int side = gaze_window_side(2880, RoiParams{1.0 / 16.0});
  if (side != 180) return fail("side " + std::to_string(side));
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(-100.0, 2980.0);
  for (int i = 0; i < 10000; ++i) {
    const Box w = gaze_window({0, u(rng), u(rng)}, 2880, 2880, {});
    if (w.x_min < 0 || w.y_min < 0 || w.x_max > 2880 || w.y_max > 2880 || w.area() != 180.0 * 180.0) {
      return fail("window " + std::to_string(i));
    }
  }
  auto lib = std::make_shared<MockLibrary>();
  (*lib)["f"].ground_truth = {{{1400, 1420, 1480, 1450}, "EXIT"}};
  MockDetector det(lib);
  MockRecognizer rec(lib);
  const Frame frame{Image::gray(2880, 2880, 255), "f"};
  std::size_t pixels = 0;
  for (int i = 0; i < 20; ++i) {
    const auto r = gaze_run(frame, {0, u(rng), u(rng)}, {}, det, rec, {});
    if (r.detector_pixels != 180u * 180u) return fail("detector pixels " + std::to_string(r.detector_pixels));
    pixels = r.detector_pixels;
  }
  const double share = 100.0 * pixels / (2880.0 * 2880.0);
  return pass("side 180; 10000 windows inside; " + std::to_string(pixels) + " px per frame (" + fmt(share, 3) + "%)");
}

// Direction of the upscaling effect with a real recognizer on the far,
// low-resolution cells. Localisation comes from the ground-truth detector so
// that only recognition quality varies.
Outcome real_engine_direction() {
  EngineConfig tess;
  tess.name = "tesseract";
  if (!recognizer_available(tess)) return {Status::kSkip, "no OCR engine installed"};
  const fs::path dir = work_dir() / "real";
  const auto entries = generate_synthetic(SyntheticSpec::standard(), dir);
  auto lib = std::make_shared<MockLibrary>();
  for (const auto& e : entries) (*lib)[e.id].ground_truth = e.regions;
  MockDetector det(lib);
  auto rec = make_recognizer(tess, lib);
  double base = 0, up = 0;
  int n = 0;
  for (const auto& e : entries) {
    if (e.conditions->distance_m < 1.0 || e.conditions->capture_width > 704) continue;
    const Frame f{load_image(e.image_path), e.id};
    PipelineOptions plain;
    PipelineOptions scaled;
    scaled.preprocess = PreprocessChain{};
    scaled.preprocess->upscale_factor = 2;
    base += score_regions(e.regions, run_pipeline(f, det, *rec, plain).regions).second.cer;
    up += score_regions(e.regions, run_pipeline(f, det, *rec, scaled).regions).second.cer;
    ++n;
  }
  if (n == 0) return fail("empty subset");
  base /= n;
  up /= n;
  const std::string d = "mean CER " + fmt(base, 4) + " -> " + fmt(up, 4) + " with 2x upscale over " + std::to_string(n) + " images";
  return up < base ? pass(d) : fail(d);
}

Outcome reference_constants() {
  const std::string md = render_markdown_report({}, analyze({}));
  for (const auto& f : reference_figures()) {
    if (md.find(std::string(f.label)) == std::string::npos) return fail("missing " + std::string(f.label));
  }
  return pass(std::to_string(reference_figures().size()) + " reference figures rendered in the report; not asserted");
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<std::vector<Outcome>()> run;
  };
  auto one = [](Outcome (*f)()) { return [f] { return std::vector<Outcome>{f()}; }; };
  const std::vector<Criterion> criteria = {
      {"AC-1", "cer_oracle_equivalence", one(cer_oracle)},
      {"AC-2", "iou_oracle_equivalence", one(iou_oracle)},
      {"AC-3", "merge_properties", one(merge_properties)},
      {"AC-4", "detection_matching", one(detection_matching)},
      {"AC-5", "published_rows_golden", published_rows},
      {"AC-6", "end_to_end_mock_identity", one(end_to_end)},
      {"AC-7", "photometry_properties", one(photometry)},
      {"AC-8", "gaze_geometry", one(gaze_geometry)},
      {"AC-9", "real_engine_upscale_direction", one(real_engine_direction)},
      {"AC-10", "reference_constants_documented", one(reference_constants)},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    std::vector<Outcome> outs;
    try {
      outs = c.run();
    } catch (const std::exception& e) {
      outs = {fail(std::string("exception: ") + e.what())};
    }
    for (std::size_t i = 0; i < outs.size(); ++i) {
      std::string id = c.id;
      if (outs.size() > 1) id += static_cast<char>('a' + i);
      std::printf("%-12s %-6s %-32s -- %s\n", label(outs[i].status), id.c_str(), c.name, outs[i].detail.c_str());
      failures += outs[i].status == Status::kFail;
    }
  }
  std::fflush(stdout);
  fs::remove_all(work_dir());
  return failures == 0 ? 0 : 1;
}
