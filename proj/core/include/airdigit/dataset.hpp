#pragma once

// Whole-dataset generation: the robot grid (synthesis -> planning -> replay ->
// IMU) and the human-like set (synthesis -> wrist model -> IMU).

#include <cstdint>
#include <functional>
#include <vector>

#include "airdigit/imu.hpp"
#include "airdigit/robot.hpp"
#include "airdigit/synth.hpp"

namespace airdigit {

struct GenerationConfig {
  std::vector<DigitTemplate> templates = builtin_templates();
  AugmentationRanges ranges;
  double plane_scale_m = 0.15;
  MountRotation mount;
  PlanOptions plan;
  ImuConfig imu;
  std::array<double, 3> robot_noise_std{0.02, 0.02, 0.02};
  std::array<double, 3> human_noise_std{0.05, 0.05, 0.05};
  double human_jitter_m = 0.005;
  double human_sway_deg = 3.0;
};

// A sample whose robot plan failed; generation reports these before aborting.
struct PlanningFailure {
  int digit;
  std::size_t index;
  AugmentationParams params;
  std::string message;
};

// `joints` receives the planned joint trajectory when given.
GestureSample make_robot_sample(const RobotModel& model, const DigitTemplate& tmpl,
                                const AugmentationParams& params, std::size_t index,
                                std::uint64_t seed, const GenerationConfig& cfg,
                                JointTrajectory* joints = nullptr);

GestureSample make_human_sample(const DigitTemplate& tmpl, const AugmentationParams& params,
                                std::size_t index, std::uint64_t seed, const GenerationConfig& cfg);

// levels^4 samples per template. Any planning failure is collected into
// `failures` (if given) and the set is then rejected with PlanningFailed.
// `joints`, when given, receives one joint trajectory per sample.
std::vector<GestureSample> generate_robot_set(int levels_per_param, std::uint64_t seed,
                                              const GenerationConfig& cfg = {},
                                              std::vector<PlanningFailure>* failures = nullptr,
                                              std::vector<JointTrajectory>* joints = nullptr);

// per_digit samples per digit with augmentation drawn uniformly from the
// configured ranges.
std::vector<GestureSample> generate_human_set(int per_digit, std::uint64_t seed,
                                              const GenerationConfig& cfg = {});

}  // namespace airdigit
