// egotext: synthetic data, photometry, OCR benchmark runs, gaze-restricted
// runs and correlation reports.

#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "egotext/app.hpp"
#include "egotext/error.hpp"

namespace {

const char* kind_name(egotext::ErrorKind k) {
  switch (k) {
    case egotext::ErrorKind::kConfig: return "config";
    case egotext::ErrorKind::kData: return "data";
    case egotext::ErrorKind::kEngineUnavailable: return "engine_unavailable";
  }
  return "unknown";
}

int finish(const egotext::CommandReport& report, std::string_view command) {
  for (const auto& w : report.warnings) std::cerr << nlohmann::json{{"warning", w}}.dump() << '\n';
  std::cout << report.to_json(command).dump() << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene text benchmark under capture conditions"};
  app.set_version_flag("--version", std::string(egotext::version()));
  app.require_subcommand(1);

  std::string spec, out, manifest, config, records, frames, gaze, ground_truth;
  unsigned jobs = 0;

  auto* synth = app.add_subcommand("synth", "Render the synthetic poster dataset");
  synth->add_option("--spec", spec, "Synthetic spec JSON")->required();
  synth->add_option("--out", out, "Output directory")->required();

  auto* stats = app.add_subcommand("stats", "Lighting statistics for every manifest image");
  stats->add_option("--manifest", manifest, "Manifest JSON")->required();
  stats->add_option("--out", out, "Output CSV")->required();

  auto* run = app.add_subcommand("run", "Detect, merge, recognize and score a manifest");
  run->add_option("--manifest", manifest, "Manifest JSON")->required();
  run->add_option("--config", config, "Run configuration JSON")->required();
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--jobs", jobs, "Worker threads (default: hardware threads)");

  auto* gaze_run = app.add_subcommand("gaze-run", "Run the pipeline inside the gaze window of each frame");
  gaze_run->add_option("--frames", frames, "Frame directory with frames.csv, or a video file")->required();
  gaze_run->add_option("--gaze", gaze, "Gaze CSV (timestamp_ns,gaze_x_px,gaze_y_px)")->required();
  gaze_run->add_option("--config", config, "Run configuration JSON")->required();
  gaze_run->add_option("--out", out, "Output directory")->required();
  gaze_run->add_option("--ground-truth", ground_truth, "Ground truth keyed by frame id (mock engines)");

  auto* analyze = app.add_subcommand("analyze", "Correlation matrix, condition summary and report");
  analyze->add_option("--records", records, "Per-image records CSV")->required();
  analyze->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << egotext::error_json("usage", 1, e.what()) << '\n';
    return 1;
  }

  try {
    if (*synth) return finish(egotext::synth_command(spec, out), "synth");
    if (*stats) return finish(egotext::stats_command(manifest, out), "stats");
    if (*run) return finish(egotext::run_command(manifest, config, out, {jobs}), "run");
    if (*gaze_run) {
      egotext::GazeRunOptions opts;
      if (!ground_truth.empty()) opts.ground_truth = ground_truth;
      return finish(egotext::gaze_run_command(frames, gaze, config, out, opts), "gaze-run");
    }
    if (*analyze) return finish(egotext::analyze_command(records, out), "analyze");
  } catch (const egotext::Error& e) {
    std::cerr << egotext::error_json(kind_name(e.kind()), e.exit_code(), e.what()) << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << egotext::error_json("data", 2, e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << egotext::error_json("data", 2, e.what()) << '\n';
    return 2;
  }
  return 1;
}
