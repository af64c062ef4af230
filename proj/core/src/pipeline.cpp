#include "airdigit/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "airdigit/error.hpp"
#include "airdigit/io.hpp"

namespace airdigit {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

json range_json(const Range& r) { return {r.lo, r.hi}; }

void read_range(const json& j, const char* key, Range& r) {
  if (!j.contains(key)) return;
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 2 || !(v[0] <= v[1])) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be [lo, hi]");
  r = {v[0], v[1]};
}

json params_json(const AugmentationParams& p) {
  return {{"speed_scale", p.speed_scale},
          {"size_scale", p.size_scale},
          {"wrist_angle_deg", p.wrist_angle_deg},
          {"rotation_deg", p.rotation_deg}};
}

AugmentationParams params_from(const json& j) {
  return {j.at("speed_scale").get<double>(), j.at("size_scale").get<double>(), j.at("wrist_angle_deg").get<double>(),
          j.at("rotation_deg").get<double>()};
}

std::string provenance_dir(Provenance p) { return std::string(to_string(p)); }

std::vector<DigitTemplate> selected_templates(const ExperimentConfig& cfg) {
  const std::vector<DigitTemplate> all =
      cfg.templates_path.empty() ? builtin_templates() : load_templates(cfg.templates_path);
  std::vector<DigitTemplate> out;
  for (int d : cfg.digits) {
    const auto it = std::find_if(all.begin(), all.end(), [d](const DigitTemplate& t) { return t.digit == d; });
    if (it == all.end()) throw Error(ErrorCode::UnknownDigit, "no template for digit " + std::to_string(d));
    out.push_back(*it);
  }
  return out;
}

std::vector<Example> load_store(const ExperimentConfig& cfg) {
  return features_from_csv(read_text(features_path(cfg.out)));
}

void write_report_files(const std::filesystem::path& out, const RunReport& report) {
  const auto base = report_path(out, report.channel);
  write_json(base, to_json(report));
  write_text(std::filesystem::path(base).replace_extension(".csv"), render_csv(report));
  write_text(std::filesystem::path(base).replace_extension(".txt"), render_table(report));
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.digits.empty()) throw Error(ErrorCode::InvalidConfig, "digits must not be empty");
  std::set<int> seen;
  for (int d : cfg.digits) {
    if (d < 0 || d > 9) throw Error(ErrorCode::UnknownDigit, "digit " + std::to_string(d));
    if (!seen.insert(d).second) throw Error(ErrorCode::InvalidConfig, "digit listed twice: " + std::to_string(d));
  }
  if (cfg.robot_levels < 1 || cfg.robot_levels > 5) throw Error(ErrorCode::InvalidConfig, "robot_levels must lie in [1, 5]");
  if (cfg.human_per_digit < 1) throw Error(ErrorCode::InvalidConfig, "human_per_digit must be >= 1");
  const GenerationConfig& g = cfg.generation;
  if (!(g.plane_scale_m > 0.05 && g.plane_scale_m <= 0.5)) {
    throw Error(ErrorCode::InvalidConfig, "plane_scale_m must lie in (0.05, 0.5]");
  }
  for (const Range* r : {&g.ranges.speed, &g.ranges.size}) {
    if (!(r->lo > 0.0 && r->lo <= r->hi)) throw Error(ErrorCode::InvalidConfig, "scale ranges must be positive");
  }
  validate(g.mount);
  validate(cfg.generation.imu, cfg.filter.cutoff_hz);
  for (double s : g.robot_noise_std) {
    if (!(s >= 0.0)) throw Error(ErrorCode::InvalidConfig, "noise std must be non-negative");
  }
  for (double s : g.human_noise_std) {
    if (!(s >= 0.0)) throw Error(ErrorCode::InvalidConfig, "noise std must be non-negative");
  }
  if (!(g.human_jitter_m >= 0.0) || !(g.human_sway_deg >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "human jitter and sway must be non-negative");
  }
  if (!(cfg.filter.cutoff_hz > 0.0) || cfg.filter.order < 1) throw Error(ErrorCode::InvalidFilterSpec, "bad filter");
  validate(cfg.train);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  const GenerationConfig& g = cfg.generation;
  const TrainConfig& t = cfg.train;
  return {
      {"seed", cfg.seed},
      {"digits", cfg.digits},
      {"robot_levels", cfg.robot_levels},
      {"human_per_digit", cfg.human_per_digit},
      {"templates", cfg.templates_path},
      {"plane_scale_m", g.plane_scale_m},
      {"plane_center_m", {g.plan.plane_center.x(), g.plan.plane_center.y(), g.plan.plane_center.z()}},
      {"augmentation",
       {{"speed", range_json(g.ranges.speed)},
        {"wrist_angle_deg", range_json(g.ranges.wrist_angle_deg)},
        {"size", range_json(g.ranges.size)},
        {"rotation_deg", range_json(g.ranges.rotation_deg)}}},
      {"mount",
       {{"rx_deg", g.mount.rx_deg},
        {"ry_deg", g.mount.ry_deg},
        {"rz_deg", g.mount.rz_deg},
        {"order", std::string(g.mount.order.begin(), g.mount.order.end())}}},
      {"imu",
       {{"rate_hz", g.imu.rate_hz},
        {"gravity_mps2", g.imu.gravity_mps2},
        {"robot_noise_std", g.robot_noise_std},
        {"human_noise_std", g.human_noise_std},
        {"human_jitter_m", g.human_jitter_m},
        {"human_sway_deg", g.human_sway_deg}}},
      {"filter", {{"cutoff_hz", cfg.filter.cutoff_hz}, {"order", cfg.filter.order}, {"zero_phase", cfg.filter.zero_phase}}},
      {"train",
       {{"iterations", t.iterations},
        {"max_epochs", t.max_epochs},
        {"patience_epochs", t.patience_epochs},
        {"val_fraction", t.val_fraction},
        {"learning_rate", t.learning_rate},
        {"batch_size", t.batch_size},
        {"hidden", t.hidden}}},
      {"channel", std::string(short_name(cfg.channel))},
      {"export_joints", cfg.export_joints},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    reject_unknown(j,
                   {"seed", "digits", "robot_levels", "human_per_digit", "templates", "plane_scale_m", "plane_center_m",
                    "augmentation", "mount", "imu", "filter", "train", "channel", "export_joints"},
                   "config");
    GenerationConfig& g = cfg.generation;
    read(j, "seed", cfg.seed);
    read(j, "digits", cfg.digits);
    read(j, "robot_levels", cfg.robot_levels);
    read(j, "human_per_digit", cfg.human_per_digit);
    read(j, "templates", cfg.templates_path);
    read(j, "plane_scale_m", g.plane_scale_m);
    read(j, "export_joints", cfg.export_joints);
    if (j.contains("plane_center_m")) {
      const auto c = j.at("plane_center_m").get<std::vector<double>>();
      if (c.size() != 3) throw Error(ErrorCode::InvalidConfig, "plane_center_m must have 3 entries");
      g.plan.plane_center = Eigen::Vector3d(c[0], c[1], c[2]);
    }
    if (j.contains("augmentation")) {
      const json& a = j.at("augmentation");
      reject_unknown(a, {"speed", "wrist_angle_deg", "size", "rotation_deg"}, "augmentation");
      read_range(a, "speed", g.ranges.speed);
      read_range(a, "wrist_angle_deg", g.ranges.wrist_angle_deg);
      read_range(a, "size", g.ranges.size);
      read_range(a, "rotation_deg", g.ranges.rotation_deg);
    }
    if (j.contains("mount")) {
      const json& m = j.at("mount");
      reject_unknown(m, {"rx_deg", "ry_deg", "rz_deg", "order"}, "mount");
      read(m, "rx_deg", g.mount.rx_deg);
      read(m, "ry_deg", g.mount.ry_deg);
      read(m, "rz_deg", g.mount.rz_deg);
      if (m.contains("order")) {
        const auto o = m.at("order").get<std::string>();
        if (o.size() != 3) throw Error(ErrorCode::InvalidConfig, "mount order must have 3 letters");
        std::copy(o.begin(), o.end(), g.mount.order.begin());
      }
    }
    if (j.contains("imu")) {
      const json& i = j.at("imu");
      reject_unknown(i, {"rate_hz", "gravity_mps2", "robot_noise_std", "human_noise_std", "human_jitter_m", "human_sway_deg"},
                     "imu");
      read(i, "rate_hz", g.imu.rate_hz);
      read(i, "gravity_mps2", g.imu.gravity_mps2);
      read(i, "robot_noise_std", g.robot_noise_std);
      read(i, "human_noise_std", g.human_noise_std);
      read(i, "human_jitter_m", g.human_jitter_m);
      read(i, "human_sway_deg", g.human_sway_deg);
    }
    if (j.contains("filter")) {
      const json& f = j.at("filter");
      reject_unknown(f, {"cutoff_hz", "order", "zero_phase"}, "filter");
      read(f, "cutoff_hz", cfg.filter.cutoff_hz);
      read(f, "order", cfg.filter.order);
      read(f, "zero_phase", cfg.filter.zero_phase);
    }
    if (j.contains("train")) {
      const json& t = j.at("train");
      reject_unknown(t,
                     {"iterations", "max_epochs", "patience_epochs", "val_fraction", "learning_rate", "batch_size", "hidden"},
                     "train");
      read(t, "iterations", cfg.train.iterations);
      read(t, "max_epochs", cfg.train.max_epochs);
      read(t, "patience_epochs", cfg.train.patience_epochs);
      read(t, "val_fraction", cfg.train.val_fraction);
      read(t, "learning_rate", cfg.train.learning_rate);
      read(t, "batch_size", cfg.train.batch_size);
      read(t, "hidden", cfg.train.hidden);
    }
    if (j.contains("channel")) cfg.channel = parse_channel(j.at("channel").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  cfg.train.seed = cfg.seed;
  validate(cfg);
  return cfg;
}

std::string config_hash(const ExperimentConfig& cfg) { return hex64(fnv1a64(config_to_json(cfg).dump())); }

std::string ManifestEntry::channel_file(ChannelKind kind) const {
  return dir + "/" + std::string(short_name(kind)) + ".csv";
}

nlohmann::json to_json(const DatasetManifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    json files = json::object();
    for (ChannelKind k : kAllChannels) files[std::string(short_name(k))] = e.channel_file(k);
    json entry = {{"id", e.id},
                  {"label", e.label},
                  {"provenance", std::string(to_string(e.provenance))},
                  {"dir", e.dir},
                  {"files", files},
                  {"meta", e.dir + "/meta.json"},
                  {"params", params_json(e.params)},
                  {"duration_s", e.duration_s},
                  {"rate_hz", e.rate_hz}};
    if (e.has_joints) entry["joints"] = e.dir + "/joints.csv";
    entries.push_back(std::move(entry));
  }
  return {{"schema_version", kManifestSchemaVersion}, {"config_hash", m.config_hash}, {"samples", entries}};
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  try {
    if (j.at("schema_version").get<int>() != kManifestSchemaVersion) {
      throw Error(ErrorCode::InvalidConfig, "unsupported manifest schema version");
    }
    m.config_hash = j.at("config_hash").get<std::string>();
    std::set<std::string> dirs;
    for (const auto& s : j.at("samples")) {
      ManifestEntry e;
      e.id = s.at("id").get<std::string>();
      e.label = s.at("label").get<int>();
      e.provenance = parse_provenance(s.at("provenance").get<std::string>());
      e.dir = s.at("dir").get<std::string>();
      e.params = params_from(s.at("params"));
      e.duration_s = s.at("duration_s").get<double>();
      e.rate_hz = s.at("rate_hz").get<double>();
      e.has_joints = s.contains("joints");
      if (e.label < 0 || e.label > 9) throw Error(ErrorCode::UnknownDigit, "manifest label for " + e.id);
      if (!dirs.insert(e.dir).second) throw Error(ErrorCode::InvalidConfig, "duplicate manifest path " + e.dir);
      m.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::filesystem::path dataset_dir(const std::filesystem::path& out) { return out / "dataset"; }
std::filesystem::path features_path(const std::filesystem::path& out) { return out / "features.csv"; }

std::filesystem::path report_path(const std::filesystem::path& out, ChannelKind kind) {
  return out / "reports" / (std::string(short_name(kind)) + ".json");
}

std::filesystem::path checkpoint_path(const std::filesystem::path& out, ChannelKind kind) {
  return out / "checkpoints" / (std::string(short_name(kind)) + ".json");
}

FeatureVector preprocess_signal(const SampledSignal3& s, ChannelKind kind, const FilterSpec& spec) {
  return to_feature_vector(resample_fourier(lowpass(s, spec), kSamplesPerAxis), kind);
}

DatasetManifest cmd_generate(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  GenerationConfig gen = cfg.generation;
  gen.templates = selected_templates(cfg);

  std::vector<PlanningFailure> failures;
  std::vector<JointTrajectory> joints;
  std::vector<GestureSample> robot;
  try {
    robot = generate_robot_set(cfg.robot_levels, cfg.seed, gen, &failures, cfg.export_joints ? &joints : nullptr);
  } catch (const PlanningError&) {
    for (const auto& f : failures) {
      log << "planning failed: digit " << f.digit << " grid index " << f.index << " (speed " << f.params.speed_scale
          << ", wrist " << f.params.wrist_angle_deg << " deg, size " << f.params.size_scale << ", rotation "
          << f.params.rotation_deg << " deg): " << f.message << '\n';
    }
    throw;
  }
  const std::vector<GestureSample> human = generate_human_set(cfg.human_per_digit, cfg.seed, gen);

  const auto root = dataset_dir(cfg.out);
  if (std::filesystem::exists(root / "manifest.json")) std::filesystem::remove_all(root);

  DatasetManifest manifest;
  manifest.config_hash = config_hash(cfg);
  const auto emit = [&](const GestureSample& s, const JointTrajectory* jt) {
    ManifestEntry e;
    e.id = s.id;
    e.label = s.label;
    e.provenance = s.provenance;
    e.dir = provenance_dir(s.provenance) + "/" + std::to_string(s.label) + "/" + s.id;
    e.params = s.params;
    e.duration_s = s.duration_s;
    e.rate_hz = s.acceleration.rate_hz();
    e.has_joints = jt != nullptr;
    for (ChannelKind k : kAllChannels) write_text(root / e.channel_file(k), signal_to_csv(s.channel(k)));
    if (jt != nullptr) write_text(root / e.dir / "joints.csv", joints_to_csv(*jt));
    const json meta = {{"id", e.id},
                       {"label", e.label},
                       {"provenance", std::string(to_string(e.provenance))},
                       {"rate_hz", e.rate_hz},
                       {"duration_s", e.duration_s},
                       {"samples", s.acceleration.size()},
                       {"units", {{"accel", "m/s^2"}, {"vel", "m/s"}, {"traj", "m"}, {"joints", "rad"}}},
                       {"frame", "sensor"},
                       {"params", params_json(e.params)}};
    write_json(root / e.dir / "meta.json", meta);
    manifest.entries.push_back(std::move(e));
  };
  for (std::size_t i = 0; i < robot.size(); ++i) emit(robot[i], cfg.export_joints ? &joints[i] : nullptr);
  for (const auto& s : human) emit(s, nullptr);

  write_json(root / "manifest.json", to_json(manifest));
  write_json(cfg.out / "config.json", config_to_json(cfg));
  log << "generated " << robot.size() << " robot and " << human.size() << " human-like samples in " << root.string()
      << '\n';
  return manifest;
}

PreprocessResult cmd_preprocess(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  const auto root = dataset_dir(cfg.out);
  const DatasetManifest manifest = manifest_from_json(read_json(root / "manifest.json"));
  PreprocessResult result;
  std::vector<Example> examples;
  for (const auto& e : manifest.entries) {
    try {
      std::vector<Example> per_sample;
      for (ChannelKind k : kAllChannels) {
        const SampledSignal3 s = signal_from_csv(read_text(root / e.channel_file(k)));
        per_sample.push_back({e.id, e.label, e.provenance, preprocess_signal(s, k, cfg.filter)});
      }
      examples.insert(examples.end(), per_sample.begin(), per_sample.end());
      ++result.examples;
    } catch (const Error& err) {
      result.excluded.push_back(e.id + ": " + err.what());
      log << "excluded " << e.id << ": " << err.what() << '\n';
    }
  }
  write_text(features_path(cfg.out), features_to_csv(examples));
  log << "preprocessed " << result.examples << " samples (" << examples.size() << " feature vectors) into "
      << features_path(cfg.out).string() << '\n';
  return result;
}

RunReport cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  validate(cfg);
  std::vector<Example> robot;
  std::vector<Example> human;
  for (auto& e : load_store(cfg)) {
    if (e.features.kind != cfg.channel) continue;
    (e.provenance == Provenance::Robot ? robot : human).push_back(std::move(e));
  }
  if (robot.empty() || human.empty()) {
    throw Error(ErrorCode::EmptySplit, "feature store needs both robot and human-like " +
                                           std::string(long_name(cfg.channel)) + " examples");
  }
  log << "provenance guard: train/validation splits are drawn from " << robot.size() << " robot samples only; "
      << human.size() << " human-like samples are held out for testing\n";

  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  ProtocolResult res = run_protocol(robot, human, tc);
  json echo = config_to_json(cfg);
  res.report.config_echo = echo;

  write_report_files(cfg.out, res.report);
  write_json(checkpoint_path(cfg.out, cfg.channel), checkpoint_to_json(res.final, cfg.channel, echo));
  log << long_name(cfg.channel) << ": " << res.report.records.size() << " iterations, mean accuracy "
      << format_pct(100.0 * res.report.mean_accuracy) << "% +/- " << format_pct(100.0 * res.report.std_accuracy)
      << '\n';
  return res.report;
}

IterationRecord cmd_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint, std::ostream& log) {
  ChannelKind channel;
  const Classifier c = checkpoint_from_json(read_json(checkpoint), &channel);
  std::vector<Example> test;
  for (auto& e : load_store(cfg)) {
    if (e.features.kind == channel && e.provenance == Provenance::HumanLike) test.push_back(std::move(e));
  }
  const IterationRecord r = evaluate(c, test, 1);
  RunReport rep = make_report(channel, {r}, config_to_json(cfg));
  write_json(cfg.out / "evaluations" / (std::string(short_name(channel)) + ".json"), to_json(rep));
  log << long_name(channel) << " checkpoint on " << test.size() << " human-like samples: accuracy "
      << format_pct(100.0 * r.test_accuracy) << "%, loss " << r.test_loss << '\n';
  return r;
}

std::string cmd_report(const ExperimentConfig& cfg, const std::vector<std::filesystem::path>& reports) {
  std::vector<std::filesystem::path> paths = reports;
  if (paths.empty()) {
    for (ChannelKind k : kAllChannels) {
      if (std::filesystem::exists(report_path(cfg.out, k))) paths.push_back(report_path(cfg.out, k));
    }
  }
  if (paths.empty()) throw Error(ErrorCode::IncompatibleReport, "no reports found");
  std::vector<RunReport> loaded;
  for (const auto& p : paths) {
    try {
      loaded.push_back(report_from_json(nlohmann::json::parse(read_text(p))));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::IncompatibleReport, p.string() + ": " + e.what());
    }
  }
  const std::string text = render_comparison(loaded);
  write_text(cfg.out / "comparison.txt", text);
  write_text(cfg.out / "accuracy_by_iteration.csv", render_plot_csv(loaded));
  return text;
}

}  // namespace airdigit
