#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace patsim::pipeline {

enum class Stage { Synth, Ingest, Score, Features, Fit, Report, Figs };

std::string_view stage_name(Stage stage);

/// Flat `key = value` configuration; command-line flags override file values.
struct PipelineConfig {
  std::filesystem::path workdir = "work";
  // external inputs; default to the synth stage outputs inside workdir
  std::optional<std::filesystem::path> patents;
  std::optional<std::filesystem::path> citations;
  std::optional<std::filesystem::path> psim;

  bool strict = false;
  bool keep_negative_lags = false;
  bool utility_only = true;
  std::optional<std::string> run_date;  // latest acceptable grant date, ISO

  int gam_basis_size = 20;
  int gam_degree = 3;
  int gam_penalty_order = 2;
  double gam_log_lambda_min = -8.0;
  double gam_log_lambda_max = 12.0;
  unsigned fit_workers = 1;

  std::uint64_t seed = 7;
  std::size_t synth_patents = 5000;
  std::size_t synth_edges = 50000;
  std::uint32_t synth_dim = 384;
  std::string synth_profile = "standard";  // standard | null

  std::string response = "embeddings";  // embeddings | profile
  std::size_t score_chunk_size = 4096;
  unsigned score_workers = 1;

  int model_level = 0;  // fit stage

  /// Throws ValidationError for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  static PipelineConfig from_file(const std::filesystem::path& path);
};

/// Exclusive lock on a workdir held for the lifetime of the object.
class WorkdirLock {
 public:
  explicit WorkdirLock(const std::filesystem::path& workdir);
  ~WorkdirLock();
  WorkdirLock(const WorkdirLock&) = delete;
  WorkdirLock& operator=(const WorkdirLock&) = delete;

 private:
  std::filesystem::path path_;
};

struct StageResult {
  std::vector<std::string> artifacts;  // paths relative to workdir
  std::vector<std::string> notices;
};

/// Runs one stage under workdir. Upstream artifacts are checked against the
/// digests recorded in workdir/manifest.json; a missing or modified input
/// raises MissingArtifactError naming the stage to run first.
StageResult run_stage(Stage stage, const PipelineConfig& config);

/// Figure bundles: fig1 (within-class citations), fig2 (similarity),
/// fig3 (temporal lag), fig4 (partial effects). Each bundle is CSV + SVG and
/// is skipped with a notice when its inputs are absent.
StageResult emit_figures(const std::filesystem::path& workdir);

/// Checks every digest recorded in the manifest against the bytes on disk;
/// returns the paths that disagree.
std::vector<std::string> verify_manifest(const std::filesystem::path& workdir);

}  // namespace patsim::pipeline
