#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include <opencv2/imgproc.hpp>

#include "egotext/analysis.hpp"
#include "egotext/app.hpp"
#include "egotext/evaluation.hpp"
#include "egotext/gaze.hpp"
#include "egotext/geometry.hpp"
#include "egotext/photometry.hpp"
#include "egotext/preprocess.hpp"

namespace py = pybind11;
using egotext::Box;

namespace {

using BoxTuple = std::tuple<double, double, double, double>;
using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Box to_box(const BoxTuple& t) { return {std::get<0>(t), std::get<1>(t), std::get<2>(t), std::get<3>(t)}; }
BoxTuple from_box(const Box& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

std::vector<Box> to_boxes(const std::vector<BoxTuple>& in) {
  std::vector<Box> out;
  out.reserve(in.size());
  for (const auto& t : in) out.push_back(to_box(t));
  return out;
}

// HxW grayscale or HxWx3 RGB, as numpy and Pillow hand them out.
egotext::Image from_numpy(const U8Array& a) {
  const auto info = a.request();
  if (info.ndim == 2) {
    cv::Mat m(static_cast<int>(info.shape[0]), static_cast<int>(info.shape[1]), CV_8UC1, info.ptr);
    return egotext::Image(m.clone());
  }
  if (info.ndim == 3 && info.shape[2] == 3) {
    cv::Mat m(static_cast<int>(info.shape[0]), static_cast<int>(info.shape[1]), CV_8UC3, info.ptr);
    cv::Mat bgr;
    cv::cvtColor(m, bgr, cv::COLOR_RGB2BGR);
    return egotext::Image(bgr);
  }
  throw std::invalid_argument("expected an HxW or HxWx3 uint8 array");
}

U8Array to_numpy(const egotext::Image& img) {
  cv::Mat m = img.mat();
  if (m.channels() == 3) cv::cvtColor(m, m, cv::COLOR_BGR2RGB);
  if (!m.isContinuous()) m = m.clone();
  std::vector<py::ssize_t> shape{m.rows, m.cols};
  if (m.channels() == 3) shape.push_back(3);
  U8Array out(shape);
  std::memcpy(out.mutable_data(), m.data, m.total() * m.elemSize());
  return out;
}

egotext::MergeParams merge_params(double eps_y, double eps_x, const std::string& mode) {
  if (mode == "relative") return egotext::MergeParams::relative(eps_y, eps_x);
  if (mode == "absolute") return egotext::MergeParams::absolute(eps_y, eps_x);
  throw std::invalid_argument("mode must be 'relative' or 'absolute'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scene-text evaluation core";
  m.attr("__version__") = std::string(egotext::version());

  m.def("iou", [](const BoxTuple& a, const BoxTuple& b) { return egotext::iou(to_box(a), to_box(b)); },
        py::arg("a"), py::arg("b"));
  m.def("envelope", [](const std::vector<BoxTuple>& boxes) { return from_box(egotext::envelope(to_boxes(boxes))); },
        py::arg("boxes"));
  m.def(
      "merge_boxes",
      [](const std::vector<BoxTuple>& boxes, double eps_y, double eps_x, const std::string& mode) {
        std::vector<BoxTuple> out;
        for (const Box& b : egotext::merge_boxes(to_boxes(boxes), merge_params(eps_y, eps_x, mode))) {
          out.push_back(from_box(b));
        }
        return out;
      },
      py::arg("boxes"), py::arg("epsilon_y") = 0.5, py::arg("epsilon_x") = 1.0, py::arg("mode") = "relative");

  m.def(
      "lighting_stats",
      [](const U8Array& img) {
        const auto s = egotext::lighting_stats(from_numpy(img));
        py::dict d;
        d["mean_brightness"] = s.mean_brightness;
        d["std_brightness"] = s.std_brightness;
        d["global_luminance"] = s.global_luminance;
        d["contrast"] = s.contrast;
        return d;
      },
      py::arg("image"));
  m.def(
      "upscale",
      [](const U8Array& img, int factor, const std::string& interpolation) {
        const auto interp = interpolation == "nearest" ? egotext::Interpolation::kNearest
                                                       : egotext::Interpolation::kBicubic;
        if (interpolation != "nearest" && interpolation != "bicubic") {
          throw std::invalid_argument("interpolation must be 'bicubic' or 'nearest'");
        }
        return to_numpy(egotext::upscale(from_numpy(img), factor, interp));
      },
      py::arg("image"), py::arg("factor") = 2, py::arg("interpolation") = "bicubic");
  m.def(
      "adjust_brightness",
      [](const U8Array& img, double gain, double offset) {
        return to_numpy(egotext::adjust_brightness(from_numpy(img), gain, offset));
      },
      py::arg("image"), py::arg("gain") = 1.0, py::arg("offset") = 0.0);

  m.def(
      "cer",
      [](const std::string& gt, const std::string& pred, bool collapse_whitespace, bool trim, bool case_sensitive) {
        const auto r = egotext::cer(gt, pred, {collapse_whitespace, trim, case_sensitive});
        py::dict d;
        d["cer"] = r.cer;
        d["substitutions"] = r.substitutions;
        d["deletions"] = r.deletions;
        d["insertions"] = r.insertions;
        d["n"] = r.n_ground_truth;
        return d;
      },
      py::arg("ground_truth"), py::arg("predicted"), py::arg("collapse_whitespace") = true, py::arg("trim") = true,
      py::arg("case_sensitive") = true);
  m.def(
      "match_detections",
      [](const std::vector<BoxTuple>& gt, const std::vector<std::pair<BoxTuple, double>>& pred, double threshold) {
        std::vector<egotext::ScoredBox> p;
        for (const auto& [b, c] : pred) p.push_back({to_box(b), c});
        const auto r = egotext::match_detections(to_boxes(gt), p, threshold);
        py::dict d;
        d["tp"] = r.tp;
        d["fp"] = r.fp;
        d["fn"] = r.fn;
        d["precision"] = r.precision;
        d["recall"] = r.recall;
        d["f1"] = r.f1;
        d["precision_defined"] = r.precision_defined;
        return d;
      },
      py::arg("ground_truth"), py::arg("predictions"), py::arg("iou_threshold") = egotext::kDefaultIouThreshold);
  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return egotext::pearson(x, y); },
        py::arg("x"), py::arg("y"));

  m.def("gaze_window_side", [](int w, double fraction) { return egotext::gaze_window_side(w, {fraction}); },
        py::arg("frame_width"), py::arg("fraction") = 1.0 / 16.0);
  m.def(
      "gaze_window",
      [](double x, double y, int w, int h, double fraction) {
        return from_box(egotext::gaze_window({0, x, y}, w, h, {fraction}));
      },
      py::arg("x"), py::arg("y"), py::arg("frame_width"), py::arg("frame_height"), py::arg("fraction") = 1.0 / 16.0);
  m.def(
      "align_gaze",
      [](const std::vector<std::int64_t>& frame_ts, const std::vector<std::tuple<std::int64_t, double, double>>& track,
         std::int64_t tolerance_ns) {
        std::vector<egotext::FrameStamp> frames;
        for (std::size_t i = 0; i < frame_ts.size(); ++i) frames.push_back({std::to_string(i), frame_ts[i]});
        std::vector<egotext::GazeSample> samples;
        for (const auto& [t, x, y] : track) samples.push_back({t, x, y});
        std::vector<std::optional<std::tuple<std::int64_t, double, double>>> out;
        for (const auto& a : egotext::align_gaze(frames, samples, tolerance_ns)) {
          if (a.gaze) {
            out.emplace_back(std::make_tuple(a.gaze->timestamp_ns, a.gaze->x, a.gaze->y));
          } else {
            out.emplace_back(std::nullopt);
          }
        }
        return out;
      },
      py::arg("frame_timestamps_ns"), py::arg("track"), py::arg("tolerance_ns") = 50'000'000);
}
