#pragma once

// Experiment driver shared by the command-line tool and the tests: config
// handling and the generate / preprocess / train / evaluate / report stages
// over the on-disk layout
//
//   <out>/config.json
//   <out>/dataset/manifest.json
//   <out>/dataset/<provenance>/<digit>/<id>/{accel,vel,traj}.csv, meta.json
//   <out>/features.csv
//   <out>/reports/<channel>.{json,csv,txt}
//   <out>/checkpoints/<channel>.json

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "airdigit/dataset.hpp"
#include "airdigit/evaluation.hpp"
#include "airdigit/mlp.hpp"
#include "airdigit/signal.hpp"

namespace airdigit {

struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::vector<int> digits{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  int robot_levels = 3;
  int human_per_digit = 10;
  // Empty: built-in templates.
  std::string templates_path;
  GenerationConfig generation;
  FilterSpec filter;
  TrainConfig train;
  ChannelKind channel = ChannelKind::Velocity;
  bool export_joints = true;
  // Not part of the echoed config or its hash.
  std::filesystem::path out = "airdigit-run";
};

void validate(const ExperimentConfig& cfg);

// Missing keys keep their defaults; unknown keys are rejected with
// InvalidConfig.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

struct ManifestEntry {
  std::string id;
  int label = 0;
  Provenance provenance = Provenance::Robot;
  std::string dir;  // relative to the dataset root
  AugmentationParams params;
  double duration_s = 0.0;
  double rate_hz = 0.0;
  bool has_joints = false;

  std::string channel_file(ChannelKind kind) const;
};

inline constexpr int kManifestSchemaVersion = 1;

struct DatasetManifest {
  std::string config_hash;
  std::vector<ManifestEntry> entries;
};

nlohmann::json to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);

std::filesystem::path dataset_dir(const std::filesystem::path& out);
std::filesystem::path features_path(const std::filesystem::path& out);
std::filesystem::path report_path(const std::filesystem::path& out, ChannelKind kind);
std::filesystem::path checkpoint_path(const std::filesystem::path& out, ChannelKind kind);

// Low-pass, Fourier resampling to 100 samples per axis, flattening.
FeatureVector preprocess_signal(const SampledSignal3& s, ChannelKind kind, const FilterSpec& spec);

// Robot grid and human-like set written as CSV channels, sidecars and a
// manifest. Planning failures are logged with their parameters, then the run
// is aborted with PlanningFailed.
DatasetManifest cmd_generate(const ExperimentConfig& cfg, std::ostream& log);

struct PreprocessResult {
  std::size_t examples = 0;
  std::vector<std::string> excluded;  // one diagnostic per excluded sample
};

// Reads the manifest and writes every channel of every sample to the feature
// store. Samples that fail are excluded and listed.
PreprocessResult cmd_preprocess(const ExperimentConfig& cfg, std::ostream& log);

// Runs the protocol on the configured channel and writes its report and the
// final checkpoint.
RunReport cmd_train(const ExperimentConfig& cfg, std::ostream& log);

// Re-scores a checkpoint on the human-like examples of the feature store.
IterationRecord cmd_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint,
                             std::ostream& log);

// Comparison of the given report files (default: every channel report under
// <out>/reports). Writes <out>/comparison.txt and <out>/accuracy_by_iteration.csv.
std::string cmd_report(const ExperimentConfig& cfg, const std::vector<std::filesystem::path>& reports);

}  // namespace airdigit
