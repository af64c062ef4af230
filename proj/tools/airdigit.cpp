#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "airdigit/error.hpp"
#include "airdigit/io.hpp"
#include "airdigit/pipeline.hpp"

namespace fs = std::filesystem;
using namespace airdigit;

namespace {

enum Exit { kOk = 0, kUnexpected = 1, kValidation = 2, kPlanning = 3, kTraining = 4 };

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::PlanningFailed:
    case ErrorCode::JointLimit:
    case ErrorCode::Unreachable:
    case ErrorCode::NoConvergence:
      return kPlanning;
    case ErrorCode::EmptySplit:
    case ErrorCode::ProvenanceViolation:
    case ErrorCode::EmptyClass:
      return kTraining;
    default:
      return kValidation;
  }
}

struct Options {
  std::string config;
  std::string out = "airdigit-run";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> channel;
  std::optional<int> iterations;
};

// Explicit --config first, then <out>/config.json from an earlier stage, then
// defaults. Command-line overrides are applied last.
ExperimentConfig load_config(const Options& o) {
  ExperimentConfig cfg;
  const fs::path saved = fs::path(o.out) / "config.json";
  if (!o.config.empty()) {
    cfg = config_from_json(read_json(o.config));
  } else if (fs::exists(saved)) {
    cfg = config_from_json(read_json(saved));
  }
  cfg.out = o.out;
  if (o.seed) cfg.seed = *o.seed;
  cfg.train.seed = cfg.seed;
  if (o.channel && *o.channel != "all") cfg.channel = parse_channel(*o.channel);
  if (o.iterations) cfg.train.iterations = *o.iterations;
  validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic IMU digit-gesture experiment: generate, preprocess, train, evaluate, report"};
  app.require_subcommand(1);

  Options o;
  app.add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--seed", o.seed, "Global seed override");
  app.add_option("--channel", o.channel, "Channel: accel, vel, traj (train also accepts all)")
      ->check(CLI::IsMember({"accel", "vel", "traj", "all"}));
  app.add_option("--iterations", o.iterations, "Training iterations override")->check(CLI::PositiveNumber);

  auto* generate = app.add_subcommand("generate", "Generate the robot grid and the human-like set");
  auto* preprocess = app.add_subcommand("preprocess", "Filter and resample every sample into the feature store");
  auto* train = app.add_subcommand("train", "Run the training protocol for a channel");
  auto* evaluate = app.add_subcommand("evaluate", "Re-score a checkpoint on the human-like samples");
  std::string checkpoint;
  evaluate->add_option("--checkpoint", checkpoint, "Checkpoint file (default: <out>/checkpoints/<channel>.json)");
  auto* report = app.add_subcommand("report", "Render tables and the channel comparison");
  std::vector<std::string> report_files;
  report->add_option("reports", report_files, "Report JSON files (default: all under <out>/reports)");

  for (auto* sub : {generate, preprocess, train, evaluate, report}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (o.channel && *o.channel == "all" && !train->parsed()) {
      throw Error(ErrorCode::InvalidConfig, "--channel all is only valid for train");
    }
    ExperimentConfig cfg = load_config(o);

    if (generate->parsed()) {
      const auto manifest = cmd_generate(cfg, std::cout);
      std::cout << "manifest: " << manifest.entries.size() << " entries, config hash " << manifest.config_hash << '\n';
    } else if (preprocess->parsed()) {
      const auto result = cmd_preprocess(cfg, std::cout);
      if (!result.excluded.empty()) {
        std::cerr << result.excluded.size() << " samples excluded\n";
        return kValidation;
      }
    } else if (train->parsed()) {
      std::vector<ChannelKind> channels{cfg.channel};
      if (o.channel && *o.channel == "all") channels.assign(kAllChannels.begin(), kAllChannels.end());
      for (ChannelKind k : channels) {
        cfg.channel = k;
        const RunReport rep = cmd_train(cfg, std::cout);
        std::cout << render_table(rep);
      }
    } else if (evaluate->parsed()) {
      const fs::path path = checkpoint.empty() ? checkpoint_path(cfg.out, cfg.channel) : fs::path(checkpoint);
      cmd_evaluate(cfg, path, std::cout);
    } else if (report->parsed()) {
      std::vector<fs::path> paths(report_files.begin(), report_files.end());
      std::cout << cmd_report(cfg, paths);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return kUnexpected;
  }
  return kOk;
}
