#pragma once

// Simulated six-axis arm: DH forward kinematics, damped least-squares inverse
// kinematics, Cartesian-to-joint planning and replay at the IMU rate.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <vector>

#include "airdigit/synth.hpp"

namespace airdigit {

using Joints = Eigen::Matrix<double, 6, 1>;
using Jacobian = Eigen::Matrix<double, 6, 6>;

// Standard DH row: Rz(theta + theta_offset) Tz(d) Tx(a) Rx(alpha).
struct DhRow {
  double a;
  double alpha;
  double d;
  double theta_offset;
};

struct JointRange {
  double lo;
  double hi;
};

struct RobotModel {
  std::array<DhRow, 6> dh;
  std::array<JointRange, 6> limits;
  double max_reach_m;
};

void validate(const RobotModel& model);

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

struct JointTrajectory {
  double rate_hz = 42.0;
  std::vector<Joints> frames;
};

inline constexpr double kMaxJointStepRad = 0.2;

// Throws JointLimit for frames outside the limits and PlanningFailed for
// steps larger than kMaxJointStepRad.
void validate(const JointTrajectory& jt, const RobotModel& model);

// Fixed rotation of the watch relative to the neutral writing tool frame.
// Applied as intrinsic rotations in `order` (default Y, then Z, then X).
struct MountRotation {
  double rx_deg = 20.0;
  double ry_deg = 60.0;
  double rz_deg = 5.0;
  std::array<char, 3> order{'Y', 'Z', 'X'};

  static MountRotation none() { return {0.0, 0.0, 0.0, {'Y', 'Z', 'X'}}; }
};

void validate(const MountRotation& mount);
Eigen::Quaterniond mount_quaternion(const MountRotation& mount);

// ABB IRB120 kinematics transcribed from the product manual.
RobotModel irb120_model();

// Pose of the flange. fk checks joint limits; fk_unchecked does not.
Pose fk(const RobotModel& model, const Joints& q);
Pose fk_unchecked(const RobotModel& model, const Joints& q);

// Geometric Jacobian of the flange: rows 0-2 linear, 3-5 angular (base frame).
Jacobian jacobian(const RobotModel& model, const Joints& q);

// Shoulder point (on axis 2 at the home angle of axis 1) and wrist center of a
// flange pose; reach is measured between the two.
Eigen::Vector3d shoulder_point(const RobotModel& model);
Eigen::Vector3d wrist_center(const RobotModel& model, const Pose& flange);

// Largest shoulder-to-wrist-center distance over a dense sweep of axes 2 and 3
// within their limits.
double computed_max_reach(const RobotModel& model);

// Rotation taking b to a, as an axis-angle vector (angle <= pi).
Eigen::Vector3d orientation_error(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

struct IkOptions {
  double damping = 0.01;
  double max_step_rad = 0.1;
  int max_iterations = 500;
  double position_tolerance_m = 1e-5;
  double orientation_tolerance_rad = 1e-4;
  // Iteration keeps going to these before settling for the tolerances above.
  double refine_position_m = 1e-10;
  double refine_orientation_rad = 1e-10;
  double limit_slack_rad = 1e-6;
};

// Damped least-squares from `seed`. Throws Unreachable, NoConvergence or
// JointLimit.
Joints ik(const RobotModel& model, const Pose& target, const Joints& seed, const IkOptions& opts = {});

// Neutral writing orientation: flange z-axis pointing forward (+x) into the
// writing plane, flange x-axis down (the tool0 convention of the arm). Equal
// to the home (all-zero) orientation.
Eigen::Quaterniond writing_orientation();

// writing orientation * mount * rotation of wrist_angle_deg about the forearm
// (tool z) axis.
Eigen::Quaterniond tool_orientation(const MountRotation& mount, double wrist_angle_deg);

inline const Eigen::Vector3d kDefaultPlaneCenter{0.38, 0.0, 0.40};

// Writing-plane coordinates (x right, y depth, z up, as seen from behind the
// arm) to the base frame, with the plane facing the robot at `plane_center`.
Eigen::Vector3d plane_to_base(const Eigen::Vector3d& local, const Eigen::Vector3d& plane_center);

struct PlanOptions {
  double out_rate_hz = 42.0;
  Eigen::Vector3d plane_center = kDefaultPlaneCenter;
  double wrist_angle_deg = 0.0;
  Joints home = Joints::Zero();
  IkOptions ik;
};

// Fourier-resamples the path to out_rate_hz, then solves IK per point with
// the previous solution as seed. Throws PlanningError with the failing index.
JointTrajectory plan_joint_trajectory(const RobotModel& model, const CartesianTrajectory& traj,
                                      const MountRotation& mount, const PlanOptions& opts = {});

// Cubic-spline interpolation of every joint to imu_rate_hz followed by FK.
// Produces round(duration * imu_rate_hz) poses.
std::vector<Pose> replay(const RobotModel& model, const JointTrajectory& jt, double imu_rate_hz = 100.0);

// Natural cubic spline through (i / rate, values[i]) sampled at times t.
std::vector<double> cubic_resample(const std::vector<double>& values, double rate_hz,
                                   const std::vector<double>& times);

}  // namespace airdigit
