#include "airdigit/robot.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "airdigit/error.hpp"
#include "airdigit/signal.hpp"

namespace airdigit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double deg(double d) { return d * kPi / 180.0; }

Eigen::Isometry3d dh_transform(const DhRow& row, double theta) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.rotate(Eigen::AngleAxisd(theta + row.theta_offset, Eigen::Vector3d::UnitZ()));
  t.translate(Eigen::Vector3d(row.a, 0.0, row.d));
  t.rotate(Eigen::AngleAxisd(row.alpha, Eigen::Vector3d::UnitX()));
  return t;
}

Eigen::Vector3d axis_of(char c) {
  switch (c) {
    case 'X': return Eigen::Vector3d::UnitX();
    case 'Y': return Eigen::Vector3d::UnitY();
    case 'Z': return Eigen::Vector3d::UnitZ();
    default: throw Error(ErrorCode::InvalidConfig, std::string("bad rotation axis '") + c + "'");
  }
}

bool within_limits(const RobotModel& model, const Joints& q, double slack = 0.0) {
  for (int i = 0; i < 6; ++i) {
    const auto& lim = model.limits[static_cast<std::size_t>(i)];
    if (q[i] < lim.lo - slack || q[i] > lim.hi + slack) return false;
  }
  return true;
}

}  // namespace

void validate(const RobotModel& model) {
  for (const JointRange& r : model.limits) {
    if (!(r.lo < r.hi)) throw Error(ErrorCode::InvalidConfig, "joint limit lo must be < hi");
  }
  if (!(model.max_reach_m > 0.0)) throw Error(ErrorCode::InvalidConfig, "max reach must be positive");
}

void validate(const JointTrajectory& jt, const RobotModel& model) {
  for (std::size_t i = 0; i < jt.frames.size(); ++i) {
    if (!within_limits(model, jt.frames[i])) {
      throw Error(ErrorCode::JointLimit, "frame " + std::to_string(i) + " outside joint limits");
    }
    if (i > 0) {
      const double step = (jt.frames[i] - jt.frames[i - 1]).cwiseAbs().maxCoeff();
      if (step >= kMaxJointStepRad) {
        throw PlanningError(i, ErrorCode::JointLimit,
                            "joint step " + std::to_string(step) + " rad breaks continuity");
      }
    }
  }
}

void validate(const MountRotation& mount) {
  for (double v : {mount.rx_deg, mount.ry_deg, mount.rz_deg}) {
    if (!(v >= -180.0 && v <= 180.0)) throw Error(ErrorCode::InvalidConfig, "mount angles must lie in [-180, 180]");
  }
  auto o = mount.order;
  std::sort(o.begin(), o.end());
  if (o != std::array<char, 3>{'X', 'Y', 'Z'}) {
    throw Error(ErrorCode::InvalidConfig, "mount order must be a permutation of XYZ");
  }
}

Eigen::Quaterniond mount_quaternion(const MountRotation& mount) {
  validate(mount);
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  for (char c : mount.order) {
    const double angle = c == 'X' ? mount.rx_deg : c == 'Y' ? mount.ry_deg : mount.rz_deg;
    q = q * Eigen::Quaterniond(Eigen::AngleAxisd(deg(angle), axis_of(c)));
  }
  return q.normalized();
}

RobotModel irb120_model() {
  RobotModel m;
  m.dh = {{
      {0.000, -kPi / 2, 0.290, 0.0},
      {0.270, 0.0, 0.000, -kPi / 2},
      {0.070, -kPi / 2, 0.000, 0.0},
      {0.000, kPi / 2, 0.302, 0.0},
      {0.000, -kPi / 2, 0.000, 0.0},
      {0.000, 0.0, 0.072, kPi},
  }};
  m.limits = {{
      {deg(-165), deg(165)},
      {deg(-110), deg(110)},
      {deg(-110), deg(70)},
      {deg(-160), deg(160)},
      {deg(-120), deg(120)},
      {deg(-400), deg(400)},
  }};
  m.max_reach_m = 0.58;
  return m;
}

Pose fk_unchecked(const RobotModel& model, const Joints& q) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (int i = 0; i < 6; ++i) t = t * dh_transform(model.dh[static_cast<std::size_t>(i)], q[i]);
  Pose p;
  p.position = t.translation();
  p.orientation = Eigen::Quaterniond(t.rotation()).normalized();
  return p;
}

Pose fk(const RobotModel& model, const Joints& q) {
  if (!within_limits(model, q)) throw Error(ErrorCode::JointLimit, "joint vector outside limits");
  return fk_unchecked(model, q);
}

Jacobian jacobian(const RobotModel& model, const Joints& q) {
  std::array<Eigen::Vector3d, 7> origin;
  std::array<Eigen::Vector3d, 7> axis;
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  origin[0] = Eigen::Vector3d::Zero();
  axis[0] = Eigen::Vector3d::UnitZ();
  for (std::size_t i = 0; i < 6; ++i) {
    t = t * dh_transform(model.dh[i], q[static_cast<Eigen::Index>(i)]);
    origin[i + 1] = t.translation();
    axis[i + 1] = t.rotation().col(2);
  }
  Jacobian j;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    j.block<3, 1>(0, c) = axis[i].cross(origin[6] - origin[i]);
    j.block<3, 1>(3, c) = axis[i];
  }
  return j;
}

Eigen::Vector3d shoulder_point(const RobotModel& model) {
  return dh_transform(model.dh[0], 0.0).translation();
}

Eigen::Vector3d wrist_center(const RobotModel& model, const Pose& flange) {
  return flange.position - model.dh[5].d * (flange.orientation * Eigen::Vector3d::UnitZ());
}

double computed_max_reach(const RobotModel& model) {
  const Eigen::Vector3d shoulder = shoulder_point(model);
  double best = 0.0;
  constexpr int kSteps = 720;
  const auto& l2 = model.limits[1];
  const auto& l3 = model.limits[2];
  for (int i = 0; i <= kSteps; ++i) {
    for (int k = 0; k <= kSteps; ++k) {
      Joints q = Joints::Zero();
      q[1] = l2.lo + (l2.hi - l2.lo) * i / kSteps;
      q[2] = l3.lo + (l3.hi - l3.lo) * k / kSteps;
      best = std::max(best, (wrist_center(model, fk_unchecked(model, q)) - shoulder).norm());
    }
  }
  return best;
}

Eigen::Vector3d orientation_error(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  Eigen::Quaterniond d = a * b.conjugate();
  if (d.w() < 0.0) d.coeffs() = -d.coeffs();
  const Eigen::AngleAxisd aa(d.normalized());
  return aa.angle() * aa.axis();
}

Joints ik(const RobotModel& model, const Pose& target, const Joints& seed, const IkOptions& opts) {
  const double reach = (wrist_center(model, target) - shoulder_point(model)).norm();
  if (reach > model.max_reach_m) {
    throw Error(ErrorCode::Unreachable, "wrist center " + std::to_string(reach) +
                                            " m from the shoulder exceeds reach " +
                                            std::to_string(model.max_reach_m) + " m");
  }

  const double lambda2 = opts.damping * opts.damping;
  Joints q = seed;
  double pos_err = 0.0;
  double ori_err = 0.0;
  for (int iter = 0;; ++iter) {
    const Pose cur = fk_unchecked(model, q);
    Eigen::Matrix<double, 6, 1> e;
    e.head<3>() = target.position - cur.position;
    e.tail<3>() = orientation_error(target.orientation, cur.orientation);
    pos_err = e.head<3>().norm();
    ori_err = e.tail<3>().norm();
    if (pos_err < opts.refine_position_m && ori_err < opts.refine_orientation_rad) break;
    if (iter >= opts.max_iterations) break;

    const Jacobian j = jacobian(model, q);
    const Jacobian a = j * j.transpose() + lambda2 * Jacobian::Identity();
    Joints dq = j.transpose() * a.ldlt().solve(e);
    const double biggest = dq.cwiseAbs().maxCoeff();
    if (biggest > opts.max_step_rad) dq *= opts.max_step_rad / biggest;
    q += dq;
  }
  if (pos_err >= opts.position_tolerance_m || ori_err >= opts.orientation_tolerance_rad) {
    throw Error(ErrorCode::NoConvergence, "residual " + std::to_string(pos_err) + " m / " +
                                              std::to_string(ori_err) + " rad after " +
                                              std::to_string(opts.max_iterations) + " iterations");
  }

  for (int i = 0; i < 6; ++i) {
    const auto& lim = model.limits[static_cast<std::size_t>(i)];
    while (q[i] > lim.hi && q[i] - 2 * kPi >= lim.lo) q[i] -= 2 * kPi;
    while (q[i] < lim.lo && q[i] + 2 * kPi <= lim.hi) q[i] += 2 * kPi;
    if (q[i] < lim.lo && q[i] >= lim.lo - opts.limit_slack_rad) q[i] = lim.lo;
    if (q[i] > lim.hi && q[i] <= lim.hi + opts.limit_slack_rad) q[i] = lim.hi;
    if (q[i] < lim.lo || q[i] > lim.hi) {
      throw Error(ErrorCode::JointLimit, "joint " + std::to_string(i + 1) + " converged to " +
                                             std::to_string(q[i]) + " rad, outside its limits");
    }
  }
  return q;
}

Eigen::Quaterniond writing_orientation() {
  Eigen::Matrix3d r;
  r.col(0) = -Eigen::Vector3d::UnitZ();
  r.col(1) = Eigen::Vector3d::UnitY();
  r.col(2) = Eigen::Vector3d::UnitX();
  return Eigen::Quaterniond(r);
}

Eigen::Quaterniond tool_orientation(const MountRotation& mount, double wrist_angle_deg) {
  return (writing_orientation() * mount_quaternion(mount) *
          Eigen::Quaterniond(Eigen::AngleAxisd(deg(wrist_angle_deg), Eigen::Vector3d::UnitZ())))
      .normalized();
}

Eigen::Vector3d plane_to_base(const Eigen::Vector3d& local, const Eigen::Vector3d& plane_center) {
  return plane_center + Eigen::Vector3d(local.y(), -local.x(), local.z());
}

JointTrajectory plan_joint_trajectory(const RobotModel& model, const CartesianTrajectory& traj,
                                      const MountRotation& mount, const PlanOptions& opts) {
  const std::size_t n_in = traj.points.size();
  if (n_in < 2) throw Error(ErrorCode::TooShort, "trajectory needs at least 2 points");
  if (!(opts.out_rate_hz > 0.0)) throw Error(ErrorCode::InvalidConfig, "output rate must be positive");

  std::array<std::vector<double>, 3> axes;
  for (const auto& p : traj.points) {
    for (std::size_t a = 0; a < 3; ++a) axes[a].push_back(p[static_cast<Eigen::Index>(a)]);
  }
  const auto n_out = static_cast<std::size_t>(
      std::lround(static_cast<double>(n_in) * opts.out_rate_hz / traj.rate_hz));
  const SampledSignal3 path = resample_fourier_aperiodic(
      SampledSignal3(std::move(axes[0]), std::move(axes[1]), std::move(axes[2]), traj.rate_hz), n_out);

  Pose target;
  target.orientation = tool_orientation(mount, opts.wrist_angle_deg);

  JointTrajectory jt;
  jt.rate_hz = opts.out_rate_hz;
  jt.frames.reserve(n_out);
  Joints seed = opts.home;
  for (std::size_t i = 0; i < n_out; ++i) {
    const auto p = path.at(i);
    target.position = plane_to_base(Eigen::Vector3d(p[0], p[1], p[2]), opts.plane_center);
    try {
      seed = ik(model, target, seed, opts.ik);
    } catch (const PlanningError&) {
      throw;
    } catch (const Error& e) {
      throw PlanningError(i, e.code(), e.what());
    }
    jt.frames.push_back(seed);
  }
  validate(jt, model);
  return jt;
}

std::vector<double> cubic_resample(const std::vector<double>& values, double rate_hz,
                                   const std::vector<double>& times) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(ErrorCode::TooShort, "spline needs at least 2 knots");
  const double h = 1.0 / rate_hz;

  // Second derivatives of the natural spline (zero at both ends).
  std::vector<double> m(n, 0.0);
  if (n > 2) {
    const std::size_t k = n - 2;
    std::vector<double> c(k, 0.0);
    std::vector<double> d(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      const double rhs = 6.0 / (h * h) * (values[i + 2] - 2.0 * values[i + 1] + values[i]);
      const double denom = 4.0 - (i > 0 ? c[i - 1] : 0.0);
      c[i] = 1.0 / denom;
      d[i] = (rhs - (i > 0 ? d[i - 1] : 0.0)) / denom;
    }
    for (std::size_t i = k; i-- > 0;) {
      m[i + 1] = d[i] - c[i] * (i + 1 < k ? m[i + 2] : 0.0);
    }
  }

  std::vector<double> out;
  out.reserve(times.size());
  const double t_end = static_cast<double>(n - 1) * h;
  for (double t : times) {
    t = std::clamp(t, 0.0, t_end);
    auto i = static_cast<std::size_t>(std::floor(t / h));
    if (i >= n - 1) i = n - 2;
    const double b = (t - static_cast<double>(i) * h) / h;
    const double a = 1.0 - b;
    out.push_back(a * values[i] + b * values[i + 1] +
                  ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0);
  }
  return out;
}

std::vector<Pose> replay(const RobotModel& model, const JointTrajectory& jt, double imu_rate_hz) {
  if (jt.frames.empty()) return {};
  const double duration = static_cast<double>(jt.frames.size()) / jt.rate_hz;
  const auto count = static_cast<std::size_t>(std::lround(duration * imu_rate_hz));
  std::vector<double> times(count);
  for (std::size_t j = 0; j < count; ++j) times[j] = static_cast<double>(j) / imu_rate_hz;

  std::array<std::vector<double>, 6> joint_series;
  for (std::size_t k = 0; k < 6; ++k) {
    std::vector<double> v;
    v.reserve(jt.frames.size());
    for (const Joints& f : jt.frames) v.push_back(f[static_cast<Eigen::Index>(k)]);
    joint_series[k] = jt.frames.size() >= 2 ? cubic_resample(v, jt.rate_hz, times)
                                            : std::vector<double>(count, v.front());
  }

  std::vector<Pose> poses;
  poses.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    Joints q;
    for (std::size_t k = 0; k < 6; ++k) q[static_cast<Eigen::Index>(k)] = joint_series[k][j];
    poses.push_back(fk_unchecked(model, q));
  }
  return poses;
}

}  // namespace airdigit
