#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "egotext/config.hpp"

namespace egotext {

std::string_view version();

// Outcome of one subcommand. Failures that stop the command are thrown as
// egotext::Error; per-item problems land in `warnings`.
struct CommandReport {
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  std::size_t items = 0;

  nlohmann::json to_json(std::string_view command) const;
};

CommandReport synth_command(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir);

// Photometry for every manifest image into one CSV.
CommandReport stats_command(const std::filesystem::path& manifest, const std::filesystem::path& out_csv);

struct RunOptions {
  unsigned jobs = 0;  // 0: one per hardware thread
};

// Writes run.json, records.csv, predictions.json and summary.json. Rows
// follow manifest order whatever the job count.
CommandReport run_command(const std::filesystem::path& manifest, const std::filesystem::path& config_path,
                          const std::filesystem::path& out_dir, const RunOptions& options = {});

struct GazeRunOptions {
  // Ground truth keyed by frame id, used by mock engines and for scoring.
  std::optional<std::filesystem::path> ground_truth;
};

// `frames` is a directory holding frames.csv, a frames.csv itself, or a
// video file. Writes run.json, gaze_frames.csv and gaze_regions.json.
CommandReport gaze_run_command(const std::filesystem::path& frames, const std::filesystem::path& gaze_csv,
                               const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                               const GazeRunOptions& options = {});

CommandReport analyze_command(const std::filesystem::path& records_csv, const std::filesystem::path& out_dir);

// {"error": {"kind": ..., "exit_code": n, "message": ...}}
std::string error_json(std::string_view kind, int exit_code, std::string_view message);

}  // namespace egotext
