#include "egotext/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <opencv2/imgproc.hpp>

#include "egotext/error.hpp"
#include "egotext/fsutil.hpp"
#include "egotext/preprocess.hpp"

namespace egotext {

namespace fs = std::filesystem;
using nlohmann::json;

EvalRecord GroundTruthEntry::skeleton() const {
  EvalRecord r;
  r.image_id = id;
  r.conditions = conditions;
  return r;
}

namespace {

// Region parsing failure, reported per region.
struct RegionError {
  std::string message;
};

double number(const json& v, const char* what) {
  if (!v.is_number()) throw RegionError{std::string(what) + " must be a number"};
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw RegionError{std::string(what) + " must be finite"};
  return d;
}

GroundTruthRegion parse_region(const json& r) {
  if (!r.is_object()) throw RegionError{"region must be an object"};
  GroundTruthRegion out;
  if (r.contains("box")) {
    const json& b = r.at("box");
    if (!b.is_array() || b.size() != 4) throw RegionError{"box must be [x0, y0, x1, y1]"};
    out.box = {number(b[0], "x0"), number(b[1], "y0"), number(b[2], "x1"), number(b[3], "y1")};
  } else if (r.contains("points")) {
    const json& pts = r.at("points");
    if (!pts.is_array() || pts.size() != 4) throw RegionError{"points must hold four [x, y] pairs"};
    std::vector<Box> corners;
    for (const json& p : pts) {
      if (!p.is_array() || p.size() != 2) throw RegionError{"each point must be [x, y]"};
      const double x = number(p[0], "x");
      const double y = number(p[1], "y");
      corners.push_back({x, y, x, y});
    }
    out.box = envelope(corners);
  } else {
    throw RegionError{"region needs 'box' or 'points'"};
  }
  if (out.box.x_min < 0 || out.box.y_min < 0) throw RegionError{"negative coordinate"};
  if (out.box.x_min > out.box.x_max || out.box.y_min > out.box.y_max) {
    throw RegionError{"box has min > max"};
  }
  if (!r.contains("text") || !r.at("text").is_string()) throw RegionError{"region needs a 'text' string"};
  out.text = r.at("text").get<std::string>();
  if (out.text.empty()) throw RegionError{"region text is empty"};
  return out;
}

ConditionMetadata parse_conditions(const json& c) {
  if (!c.is_object()) throw RegionError{"conditions must be an object"};
  ConditionMetadata m;
  const std::string lighting = c.value("lighting", std::string());
  auto l = parse_lighting(lighting);
  if (!l) throw RegionError{"unknown lighting '" + lighting + "'"};
  m.lighting = *l;
  if (!c.contains("distance_m") || !c.contains("width") || !c.contains("height")) {
    throw RegionError{"conditions need distance_m, width and height"};
  }
  m.distance_m = number(c.at("distance_m"), "distance_m");
  if (!c.at("width").is_number_integer() || !c.at("height").is_number_integer()) {
    throw RegionError{"width and height must be integers"};
  }
  m.capture_width = c.at("width").get<int>();
  m.capture_height = c.at("height").get<int>();
  if (!m.valid()) throw RegionError{"conditions need positive distance and dimensions"};
  return m;
}

}  // namespace

GroundTruthFile parse_ground_truth(const json& doc, const fs::path& base_dir) {
  const json* list = nullptr;
  json single;
  if (doc.is_array()) {
    list = &doc;
  } else if (doc.is_object() && doc.contains("entries")) {
    if (!doc.at("entries").is_array()) throw DataError("'entries' must be an array");
    list = &doc.at("entries");
  } else if (doc.is_object()) {
    single = json::array({doc});
    list = &single;
  } else {
    throw DataError("ground truth must be an object or an array of objects");
  }

  GroundTruthFile out;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& e = (*list)[i];
    try {
      if (!e.is_object()) throw RegionError{"entry must be an object"};
      if (!e.contains("image") || !e.at("image").is_string()) throw RegionError{"entry needs an 'image' path"};
      GroundTruthEntry entry;
      entry.image = e.at("image").get<std::string>();
      entry.image_path = base_dir / entry.image;
      if (e.contains("id")) {
        if (!e.at("id").is_string()) throw RegionError{"'id' must be a string"};
        entry.id = e.at("id").get<std::string>();
      } else {
        entry.id = fs::path(entry.image).stem().string();
      }
      if (e.contains("conditions") && !e.at("conditions").is_null()) {
        entry.conditions = parse_conditions(e.at("conditions"));
      }
      const json regions = e.value("regions", json::array());
      if (!regions.is_array()) throw RegionError{"'regions' must be an array"};
      for (std::size_t r = 0; r < regions.size(); ++r) {
        try {
          entry.regions.push_back(parse_region(regions[r]));
        } catch (const RegionError& err) {
          out.errors.push_back({i, r, err.message});
        }
      }
      out.entries.push_back(std::move(entry));
    } catch (const RegionError& err) {
      out.errors.push_back({i, std::nullopt, err.message});
    }
  }
  return out;
}

GroundTruthFile load_ground_truth(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("ground truth file not found: " + path.string());
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_ground_truth(doc, path.parent_path());
}

json ground_truth_to_json(const GroundTruthEntry& entry) {
  json regions = json::array();
  for (const GroundTruthRegion& r : entry.regions) {
    regions.push_back({{"box", {r.box.x_min, r.box.y_min, r.box.x_max, r.box.y_max}}, {"text", r.text}});
  }
  json j = {{"id", entry.id}, {"image", entry.image}, {"regions", std::move(regions)}};
  if (entry.conditions) {
    const ConditionMetadata& c = *entry.conditions;
    j["conditions"] = {{"lighting", std::string(to_string(c.lighting))},
                       {"distance_m", c.distance_m},
                       {"width", c.capture_width},
                       {"height", c.capture_height}};
  }
  return j;
}

void write_ground_truth(std::span<const GroundTruthEntry> entries, const fs::path& path) {
  json list = json::array();
  for (const GroundTruthEntry& e : entries) list.push_back(ground_truth_to_json(e));
  json doc = {{"version", 1}, {"entries", std::move(list)}};
  write_file_atomic(path, doc.dump(2) + "\n");
}

std::vector<GroundTruthEntry> load_manifest(const fs::path& path) {
  GroundTruthFile file = load_ground_truth(path);
  if (!file.errors.empty()) {
    std::ostringstream msg;
    msg << path.string() << ": " << file.errors.size() << " invalid entries";
    for (const EntryError& e : file.errors) {
      msg << "; entry " << e.entry;
      if (e.region) msg << " region " << *e.region;
      msg << ": " << e.message;
    }
    throw DataError(msg.str());
  }
  std::map<std::string, int> seen;
  for (const GroundTruthEntry& e : file.entries) ++seen[e.id];
  std::string dupes;
  for (const auto& [id, n] : seen) {
    if (n > 1) dupes += (dupes.empty() ? "" : ", ") + id;
  }
  if (!dupes.empty()) throw DataError(path.string() + ": duplicate image ids: " + dupes);
  return std::move(file.entries);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<GroundTruthRegion> scale_regions(std::vector<GroundTruthRegion> regions, double sx, double sy) {
  for (GroundTruthRegion& r : regions) r.box = r.box.scaled(sx, sy);
  return regions;
}

cv::Mat resize_to(const cv::Mat& src, int w, int h) {
  cv::Mat out;
  const bool shrinking = w < src.cols || h < src.rows;
  cv::resize(src, out, cv::Size(w, h), 0, 0, shrinking ? cv::INTER_AREA : cv::INTER_CUBIC);
  return out;
}

}  // namespace

Degraded apply_degradations(const Image& image, std::vector<GroundTruthRegion> regions,
                            std::span<const DegradationStep> steps, std::uint64_t seed) {
  Degraded d{image.clone(), std::move(regions)};
  std::mt19937_64 rng(seed);
  for (const DegradationStep& step : steps) {
    if (const auto* blur = std::get_if<degrade::Blur>(&step)) {
      if (blur->sigma <= 0.0) continue;
      cv::Mat out;
      cv::GaussianBlur(d.image.mat(), out, cv::Size(0, 0), blur->sigma, blur->sigma, cv::BORDER_REPLICATE);
      d.image = Image(std::move(out));
    } else if (const auto* down = std::get_if<degrade::Downscale>(&step)) {
      if (down->factor <= 1.0) continue;
      const int w = d.image.width();
      const int h = d.image.height();
      const int sw = std::max(1, static_cast<int>(std::lround(w / down->factor)));
      const int sh = std::max(1, static_cast<int>(std::lround(h / down->factor)));
      cv::Mat small = resize_to(d.image.mat(), sw, sh);
      if (down->restore) {
        d.image = Image(resize_to(small, w, h));
      } else {
        d.image = Image(std::move(small));
        d.regions = scale_regions(std::move(d.regions), static_cast<double>(sw) / w, static_cast<double>(sh) / h);
      }
    } else if (const auto* bright = std::get_if<degrade::Brightness>(&step)) {
      d.image = adjust_brightness(d.image, bright->gain, bright->offset);
    } else if (const auto* noise = std::get_if<degrade::Noise>(&step)) {
      if (noise->sigma <= 0.0) continue;
      std::normal_distribution<double> gauss(0.0, noise->sigma);
      cv::Mat& m = d.image.mat();
      for (int r = 0; r < m.rows; ++r) {
        unsigned char* row = m.ptr<unsigned char>(r);
        for (int c = 0; c < m.cols * m.channels(); ++c) {
          row[c] = static_cast<unsigned char>(std::clamp(std::round(row[c] + gauss(rng)), 0.0, 255.0));
        }
      }
    } else if (const auto* size = std::get_if<degrade::Resize>(&step)) {
      const int w = d.image.width();
      const int h = d.image.height();
      if (size->width == w && size->height == h) continue;
      if (size->width <= 0 || size->height <= 0) throw std::invalid_argument("resize target must be positive");
      d.image = Image(resize_to(d.image.mat(), size->width, size->height));
      d.regions = scale_regions(std::move(d.regions), static_cast<double>(size->width) / w,
                                static_cast<double>(size->height) / h);
    }
  }
  return d;
}

SyntheticSpec SyntheticSpec::standard() {
  SyntheticSpec s;
  s.lightings = {{Lighting::kNatural, 1.0, 0.0},
                 {Lighting::kNaturalArtificial, 1.0, 10.0},
                 {Lighting::kNaturalEnhanced, 1.05, 15.0},
                 {Lighting::kNight, 0.35, 0.0}};
  s.distances = {{0.5, 0.8, 1.0}, {1.0, 1.6, 3.0}};
  // Half the two capture sizes of the glasses (2880 and 1408 square).
  s.resolutions = {{1440, 1440}, {704, 704}};
  return s;
}

void SyntheticSpec::validate() const {
  if (text.empty()) throw ConfigError("synthetic spec: text must not be empty");
  for (char c : text) {
    if (c < 0x20 || c > 0x7E) throw ConfigError("synthetic spec: text must be printable ASCII");
  }
  if (font_px < 8) throw ConfigError("synthetic spec: font_px must be >= 8");
  if (canvas_width < 4 * font_px || canvas_height < 4 * font_px) {
    throw ConfigError("synthetic spec: canvas too small for the font size");
  }
  if (lightings.empty() || distances.empty() || resolutions.empty()) {
    throw ConfigError("synthetic spec: lightings, distances and resolutions must be non-empty");
  }
  for (const auto& l : lightings) {
    if (!(l.gain > 0.0)) throw ConfigError("synthetic spec: lighting gain must be positive");
  }
  for (const auto& d : distances) {
    if (!(d.distance_m > 0.0) || d.blur_sigma < 0.0 || d.downscale < 1.0) {
      throw ConfigError("synthetic spec: distance needs distance_m > 0, blur_sigma >= 0, downscale >= 1");
    }
  }
  for (const auto& r : resolutions) {
    if (r.width <= 0 || r.height <= 0) throw ConfigError("synthetic spec: resolutions must be positive");
  }
  if (noise_sigma < 0.0) throw ConfigError("synthetic spec: noise_sigma must be >= 0");
}

SyntheticSpec synthetic_spec_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("synthetic spec must be a JSON object");
  SyntheticSpec s = SyntheticSpec::standard();
  try {
    s.text = doc.value("text", s.text);
    s.font_px = doc.value("font_px", s.font_px);
    s.canvas_width = doc.value("canvas_width", s.canvas_width);
    s.canvas_height = doc.value("canvas_height", s.canvas_height);
    s.noise_sigma = doc.value("noise_sigma", s.noise_sigma);
    s.seed = doc.value("seed", s.seed);
    if (doc.contains("lightings")) {
      s.lightings.clear();
      for (const json& l : doc.at("lightings")) {
        const std::string name = l.at("lighting").get<std::string>();
        auto parsed = parse_lighting(name);
        if (!parsed) throw ConfigError("synthetic spec: unknown lighting '" + name + "'");
        s.lightings.push_back({*parsed, l.value("gain", 1.0), l.value("offset", 0.0)});
      }
    }
    if (doc.contains("distances")) {
      s.distances.clear();
      for (const json& d : doc.at("distances")) {
        s.distances.push_back({d.at("distance_m").get<double>(), d.value("blur_sigma", 0.0), d.value("downscale", 1.0)});
      }
    }
    if (doc.contains("resolutions")) {
      s.resolutions.clear();
      for (const json& r : doc.at("resolutions")) s.resolutions.push_back({r.at("width").get<int>(), r.at("height").get<int>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synthetic spec: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const SyntheticSpec& s) {
  json lightings = json::array();
  for (const auto& l : s.lightings) {
    lightings.push_back({{"lighting", std::string(to_string(l.lighting))}, {"gain", l.gain}, {"offset", l.offset}});
  }
  json distances = json::array();
  for (const auto& d : s.distances) {
    distances.push_back({{"distance_m", d.distance_m}, {"blur_sigma", d.blur_sigma}, {"downscale", d.downscale}});
  }
  json resolutions = json::array();
  for (const auto& r : s.resolutions) resolutions.push_back({{"width", r.width}, {"height", r.height}});
  return {{"text", s.text},           {"font_px", s.font_px},         {"canvas_width", s.canvas_width},
          {"canvas_height", s.canvas_height}, {"noise_sigma", s.noise_sigma}, {"seed", s.seed},
          {"lightings", lightings},   {"distances", distances},       {"resolutions", resolutions}};
}

PosterLayout layout_poster(const SyntheticSpec& spec) {
  PosterLayout layout;
  layout.cell_height = spec.font_px;
  layout.cell_width = static_cast<int>(std::lround(0.7 * spec.font_px));
  layout.line_pitch = static_cast<int>(std::lround(1.5 * spec.font_px));
  layout.margin = spec.font_px;
  const int max_chars = std::max(1, (spec.canvas_width - 2 * layout.margin) / layout.cell_width);

  std::vector<std::string> words;
  std::istringstream in(spec.text);
  for (std::string w; in >> w;) {
    // Words longer than a line are hard-split.
    while (static_cast<int>(w.size()) > max_chars) {
      words.push_back(w.substr(0, max_chars));
      w = w.substr(max_chars);
    }
    words.push_back(w);
  }

  std::vector<std::string> lines;
  std::string current;
  for (const std::string& w : words) {
    if (current.empty()) {
      current = w;
    } else if (static_cast<int>(current.size() + 1 + w.size()) <= max_chars) {
      current += ' ' + w;
    } else {
      lines.push_back(current);
      current = w;
    }
  }
  if (!current.empty()) lines.push_back(current);

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double x0 = layout.margin;
    const double y0 = layout.margin + static_cast<double>(i) * layout.line_pitch;
    const double x1 = x0 + static_cast<double>(lines[i].size()) * layout.cell_width;
    const double y1 = y0 + layout.cell_height;
    if (y1 > spec.canvas_height) throw ConfigError("synthetic spec: text does not fit on the canvas");
    layout.lines.push_back({{x0, y0, x1, y1}, lines[i]});
  }
  return layout;
}

Degraded render_poster(const SyntheticSpec& spec) {
  spec.validate();
  const PosterLayout layout = layout_poster(spec);
  cv::Mat canvas(spec.canvas_height, spec.canvas_width, CV_8UC3, cv::Scalar(255, 255, 255));

  const int font = cv::FONT_HERSHEY_SIMPLEX;
  const int thickness = std::max(1, spec.font_px / 14);
  const int cap_height = static_cast<int>(std::lround(0.55 * spec.font_px));
  const double font_scale = cv::getFontScaleFromHeight(font, cap_height, thickness);
  const int baseline = static_cast<int>(std::lround(0.72 * spec.font_px));
  const int pad_x = std::max(1, layout.cell_width / 10);

  for (const GroundTruthRegion& line : layout.lines) {
    const int x0 = static_cast<int>(line.box.x_min);
    const int y0 = static_cast<int>(line.box.y_min);
    for (std::size_t k = 0; k < line.text.size(); ++k) {
      const char c = line.text[k];
      if (c == ' ') continue;
      cv::Mat cell(layout.cell_height, layout.cell_width, CV_8UC3, cv::Scalar(255, 255, 255));
      cv::putText(cell, std::string(1, c), cv::Point(pad_x, baseline), font, font_scale, cv::Scalar(0, 0, 0),
                  thickness, cv::LINE_AA);
      const cv::Rect dst(x0 + static_cast<int>(k) * layout.cell_width, y0, layout.cell_width, layout.cell_height);
      cell.copyTo(canvas(dst));
    }
  }
  return {Image(std::move(canvas)), layout.lines};
}

std::vector<DegradationStep> condition_chain(const SyntheticSpec& spec, const LightingProfile& lighting,
                                             const DistanceProfile& distance, const ResolutionProfile& resolution) {
  std::vector<DegradationStep> steps;
  steps.push_back(degrade::Blur{distance.blur_sigma});
  steps.push_back(degrade::Downscale{distance.downscale, true});
  steps.push_back(degrade::Brightness{lighting.gain, lighting.offset});
  steps.push_back(degrade::Noise{spec.noise_sigma});
  steps.push_back(degrade::Resize{resolution.width, resolution.height});
  return steps;
}

namespace {

std::string cell_id(const LightingProfile& l, const DistanceProfile& d, const ResolutionProfile& r) {
  std::string lighting(to_string(l.lighting));
  std::replace(lighting.begin(), lighting.end(), '+', '-');
  return "syn_" + lighting + "_d" + format_double(d.distance_m) + "_" + std::to_string(r.width) + "x" +
         std::to_string(r.height);
}

}  // namespace

std::vector<GroundTruthEntry> generate_synthetic(const SyntheticSpec& spec, const fs::path& out_dir) {
  spec.validate();
  const Degraded poster = render_poster(spec);
  std::vector<GroundTruthEntry> entries;
  for (const ResolutionProfile& res : spec.resolutions) {
    for (const DistanceProfile& dist : spec.distances) {
      for (const LightingProfile& light : spec.lightings) {
        GroundTruthEntry e;
        e.id = cell_id(light, dist, res);
        e.image = "images/" + e.id + ".png";
        e.image_path = out_dir / e.image;
        const auto chain = condition_chain(spec, light, dist, res);
        Degraded d = apply_degradations(poster.image, poster.regions, chain, stable_hash(e.id, spec.seed));
        save_image(d.image, e.image_path);
        e.regions = std::move(d.regions);
        e.conditions = ConditionMetadata{light.lighting, dist.distance_m, res.width, res.height};
        entries.push_back(std::move(e));
      }
    }
  }
  write_ground_truth(entries, out_dir / "manifest.json");
  write_file_atomic(out_dir / "synthetic_spec.json", to_json(spec).dump(2) + "\n");
  return entries;
}

}  // namespace egotext
