#include "airdigit/dataset.hpp"

#include <cstdio>
#include <random>

#include "airdigit/error.hpp"
#include "airdigit/rng.hpp"

namespace airdigit {

namespace {

constexpr std::uint64_t kRobotStream = 1;
constexpr std::uint64_t kHumanStream = 2;

std::string sample_id(std::string_view prefix, int digit, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*s-d%d-%03zu", static_cast<int>(prefix.size()), prefix.data(), digit,
                index);
  return buf;
}

}  // namespace

GestureSample make_robot_sample(const RobotModel& model, const DigitTemplate& tmpl,
                                const AugmentationParams& params, std::size_t index,
                                std::uint64_t seed, const GenerationConfig& cfg, JointTrajectory* joints) {
  const std::uint64_t s = derive_seed(seed, {kRobotStream, static_cast<std::uint64_t>(tmpl.digit), index});
  const CartesianTrajectory traj = synthesize_trajectory(tmpl, params, cfg.plane_scale_m, s);

  PlanOptions plan = cfg.plan;
  plan.wrist_angle_deg = params.wrist_angle_deg;
  const JointTrajectory jt = plan_joint_trajectory(model, traj, cfg.mount, plan);
  const std::vector<Pose> poses = replay(model, jt, cfg.imu.rate_hz);
  if (joints != nullptr) *joints = jt;

  ImuConfig imu = cfg.imu;
  imu.noise_std = cfg.robot_noise_std;
  imu.seed = mix64(s);
  return make_sample(tmpl.digit, Provenance::Robot, poses, params, imu, sample_id("robot", tmpl.digit, index));
}

GestureSample make_human_sample(const DigitTemplate& tmpl, const AugmentationParams& params,
                                std::size_t index, std::uint64_t seed, const GenerationConfig& cfg) {
  const std::uint64_t s = derive_seed(seed, {kHumanStream, static_cast<std::uint64_t>(tmpl.digit), index});
  const CartesianTrajectory traj =
      synthesize_trajectory(tmpl, params, cfg.plane_scale_m, s, cfg.human_jitter_m);

  std::array<std::vector<double>, 3> axes;
  for (const auto& p : traj.points) {
    const Eigen::Vector3d b = plane_to_base(p, cfg.plan.plane_center);
    for (std::size_t a = 0; a < 3; ++a) axes[a].push_back(b[static_cast<Eigen::Index>(a)]);
  }
  const auto n = static_cast<std::size_t>(
      std::lround(static_cast<double>(traj.points.size()) * cfg.imu.rate_hz / traj.rate_hz));
  const SampledSignal3 path = resample_fourier_aperiodic(
      SampledSignal3(std::move(axes[0]), std::move(axes[1]), std::move(axes[2]), traj.rate_hz), n);

  const Eigen::Quaterniond base = tool_orientation(cfg.mount, params.wrist_angle_deg);
  const auto sway = wrist_sway(n, cfg.imu.rate_hz, cfg.human_sway_deg, mix64(s + 1));
  std::vector<Pose> poses(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = path.at(i);
    poses[i].position = Eigen::Vector3d(p[0], p[1], p[2]);
    poses[i].orientation = (base * sway[i]).normalized();
  }

  ImuConfig imu = cfg.imu;
  imu.noise_std = cfg.human_noise_std;
  imu.seed = mix64(s);
  return make_sample(tmpl.digit, Provenance::HumanLike, poses, params, imu,
                     sample_id("human", tmpl.digit, index));
}

std::vector<GestureSample> generate_robot_set(int levels_per_param, std::uint64_t seed,
                                              const GenerationConfig& cfg,
                                              std::vector<PlanningFailure>* failures,
                                              std::vector<JointTrajectory>* joints) {
  const auto grid = augmentation_grid(levels_per_param, cfg.ranges);
  const RobotModel model = irb120_model();
  std::vector<GestureSample> out;
  out.reserve(grid.size() * cfg.templates.size());
  if (joints) joints->clear();
  std::vector<PlanningFailure> failed;
  for (const DigitTemplate& tmpl : cfg.templates) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      try {
        JointTrajectory jt;
        out.push_back(make_robot_sample(model, tmpl, grid[i], i, seed, cfg, joints ? &jt : nullptr));
        if (joints) joints->push_back(std::move(jt));
      } catch (const PlanningError& e) {
        failed.push_back({tmpl.digit, i, grid[i], e.what()});
      }
    }
  }
  if (!failed.empty()) {
    if (failures) *failures = failed;
    const auto& f = failed.front();
    throw PlanningError(f.index, ErrorCode::PlanningFailed,
                        std::to_string(failed.size()) + " robot sample(s) failed; first: digit " +
                            std::to_string(f.digit) + ": " + f.message);
  }
  return out;
}

std::vector<GestureSample> generate_human_set(int per_digit, std::uint64_t seed, const GenerationConfig& cfg) {
  if (per_digit < 1) throw Error(ErrorCode::InvalidParams, "per_digit must be >= 1");
  std::vector<GestureSample> out;
  out.reserve(static_cast<std::size_t>(per_digit) * cfg.templates.size());
  for (const DigitTemplate& tmpl : cfg.templates) {
    for (int i = 0; i < per_digit; ++i) {
      std::mt19937_64 rng(derive_seed(seed, {kHumanStream, static_cast<std::uint64_t>(tmpl.digit),
                                             static_cast<std::uint64_t>(i), 0x9a7a}));
      auto draw = [&rng](const Range& r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); };
      AugmentationParams p;
      p.speed_scale = draw(cfg.ranges.speed);
      p.wrist_angle_deg = draw(cfg.ranges.wrist_angle_deg);
      p.size_scale = draw(cfg.ranges.size);
      p.rotation_deg = draw(cfg.ranges.rotation_deg);
      out.push_back(make_human_sample(tmpl, p, static_cast<std::size_t>(i), seed, cfg));
    }
  }
  return out;
}

}  // namespace airdigit
