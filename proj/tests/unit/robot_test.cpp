#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "airdigit/error.hpp"
#include "airdigit/robot.hpp"
#include "airdigit/signal.hpp"

using namespace airdigit;

namespace {

constexpr double kPi = std::numbers::pi;
double deg(double d) { return d * kPi / 180.0; }

// Independent DH chain: explicit 4x4 products of Rz(theta) Tz(d) Tx(a) Rx(alpha).
Eigen::Matrix4d dh_oracle(const RobotModel& m, const Joints& q) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  for (int i = 0; i < 6; ++i) {
    const auto& r = m.dh[static_cast<std::size_t>(i)];
    const double th = q[i] + r.theta_offset;
    const double ct = std::cos(th), st = std::sin(th), ca = std::cos(r.alpha), sa = std::sin(r.alpha);
    Eigen::Matrix4d a;
    a << ct, -st * ca, st * sa, r.a * ct,
         st, ct * ca, -ct * sa, r.a * st,
         0, sa, ca, r.d,
         0, 0, 0, 1;
    t = t * a;
  }
  return t;
}

Joints random_joints(const RobotModel& m, std::mt19937_64& rng, double margin = 0.0) {
  Joints q;
  for (int i = 0; i < 6; ++i) {
    const auto& l = m.limits[static_cast<std::size_t>(i)];
    // Axis 6 sampled over one turn; its +-400 deg range repeats poses.
    const double lo = i == 5 ? -kPi : l.lo + margin;
    const double hi = i == 5 ? kPi : l.hi - margin;
    q[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  return q;
}

double angle_between(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  return orientation_error(a, b).norm();
}

CartesianTrajectory straight_line(double length_m, std::size_t n) {
  CartesianTrajectory t;
  t.rate_hz = 200.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    t.points.emplace_back(-length_m / 2 + length_m * s, 0.0, 0.0);
  }
  t.duration_s = static_cast<double>(n) / t.rate_hz;
  return t;
}

}  // namespace

TEST(RobotModel, Irb120Constants) {
  const auto m = irb120_model();
  EXPECT_EQ(m.dh.size(), 6u);
  EXPECT_NO_THROW(validate(m));
  EXPECT_DOUBLE_EQ(m.max_reach_m, 0.58);
  EXPECT_NEAR(m.limits[0].lo, -deg(165), 1e-12);
  EXPECT_NEAR(m.limits[0].hi, deg(165), 1e-12);
  for (std::size_t i : {0u, 1u, 3u, 4u, 5u}) EXPECT_NEAR(m.limits[i].lo, -m.limits[i].hi, 1e-12) << i;
  for (const auto& l : m.limits) EXPECT_LT(l.lo, l.hi);
}

TEST(Fk, HomePoseMatchesMatrixChain) {
  const auto m = irb120_model();
  const Joints zero = Joints::Zero();
  const Pose p = fk(m, zero);
  const Eigen::Matrix4d t = dh_oracle(m, zero);
  EXPECT_NEAR((p.position - t.block<3, 1>(0, 3)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((p.orientation.toRotationMatrix() - t.block<3, 3>(0, 0)).norm(), 0.0, 1e-12);
  // Datasheet home flange position: 302 + 72 mm forward, 290 + 270 + 70 mm up.
  EXPECT_NEAR((p.position - Eigen::Vector3d(0.374, 0.0, 0.630)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(p.orientation.norm() - 1.0), 0.0, 1e-9);
}

TEST(Fk, MatchesMatrixChainEverywhere) {
  const auto m = irb120_model();
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Joints q = random_joints(m, rng);
    const Pose p = fk(m, q);
    const Eigen::Matrix4d t = dh_oracle(m, q);
    EXPECT_NEAR((p.position - t.block<3, 1>(0, 3)).norm(), 0.0, 1e-12);
    EXPECT_NEAR((p.orientation.toRotationMatrix() - t.block<3, 3>(0, 0)).norm(), 0.0, 1e-12);
  }
}

TEST(Fk, BaseJointRotatesAboutZ) {
  const auto m = irb120_model();
  const Eigen::Vector3d home = fk(m, Joints::Zero()).position;
  for (double th : {-2.0, -0.5, 0.3, 1.7}) {
    Joints q = Joints::Zero();
    q[0] = th;
    const Eigen::Vector3d expect = Eigen::AngleAxisd(th, Eigen::Vector3d::UnitZ()) * home;
    EXPECT_NEAR((fk(m, q).position - expect).norm(), 0.0, 1e-12);
  }
}

TEST(Fk, PeriodicInEveryJoint) {
  const auto m = irb120_model();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Joints q = random_joints(m, rng);
    const Pose p = fk_unchecked(m, q);
    for (int i = 0; i < 6; ++i) {
      Joints r = q;
      r[i] += 2 * kPi;
      const Pose pr = fk_unchecked(m, r);
      EXPECT_NEAR((p.position - pr.position).norm(), 0.0, 1e-12);
      EXPECT_NEAR(angle_between(p.orientation, pr.orientation), 0.0, 1e-7);
    }
  }
}

TEST(Fk, OutOfLimits) {
  const auto m = irb120_model();
  Joints q = Joints::Zero();
  q[4] = deg(125);
  try {
    fk(m, q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::JointLimit);
  }
  EXPECT_NO_THROW(fk_unchecked(m, q));
}

TEST(Jacobian, MatchesFiniteDifferences) {
  const auto m = irb120_model();
  std::mt19937_64 rng(3);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const Joints q = random_joints(m, rng, 0.01);
    const Jacobian j = jacobian(m, q);
    for (int i = 0; i < 6; ++i) {
      Joints a = q, b = q;
      a[i] += h;
      b[i] -= h;
      const Pose pa = fk_unchecked(m, a), pb = fk_unchecked(m, b);
      const Eigen::Vector3d v = (pa.position - pb.position) / (2 * h);
      const Eigen::Vector3d w = orientation_error(pa.orientation, pb.orientation) / (2 * h);
      EXPECT_NEAR((j.col(i).head<3>() - v).norm(), 0.0, 1e-6);
      EXPECT_NEAR((j.col(i).tail<3>() - w).norm(), 0.0, 1e-6);
    }
  }
}

TEST(Reach, WithinFivePercentOfDatasheet) {
  const auto m = irb120_model();
  const double reach = computed_max_reach(m);
  EXPECT_NEAR(reach, 0.58, 0.05 * 0.58);
}

TEST(Ik, FixedPoint) {
  const auto m = irb120_model();
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Joints q = random_joints(m, rng, 0.05);
    const Pose target = fk(m, q);
    if ((wrist_center(m, target) - shoulder_point(m)).norm() > m.max_reach_m) continue;
    const Joints r = ik(m, target, q);
    EXPECT_NEAR((r - q).cwiseAbs().maxCoeff(), 0.0, 1e-9);
  }
}

TEST(Ik, RoundTripFromPerturbedSeed) {
  const auto m = irb120_model();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  int ok = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const Joints q = random_joints(m, rng);
    const Pose target = fk(m, q);
    Joints seed = q;
    for (int i = 0; i < 6; ++i) seed[i] += jitter(rng);
    try {
      const Pose got = fk_unchecked(m, ik(m, target, seed));
      if ((got.position - target.position).norm() < 1e-4 && angle_between(got.orientation, target.orientation) < 1e-3) {
        ++ok;
      }
    } catch (const Error&) {
    }
  }
  EXPECT_GE(ok, 990);
}

TEST(Ik, FarTargetIsUnreachable) {
  const auto m = irb120_model();
  Pose target;
  target.position = Eigen::Vector3d(1.0, 0.0, 0.0);
  target.orientation = writing_orientation();
  try {
    ik(m, target, Joints::Zero());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unreachable);
  }
}

TEST(Ik, NoConvergenceWithTooFewIterations) {
  const auto m = irb120_model();
  Pose target;
  target.position = plane_to_base(Eigen::Vector3d(0.05, 0, 0.05), kDefaultPlaneCenter);
  target.orientation = tool_orientation(MountRotation{}, 0.0);
  IkOptions opts;
  opts.max_iterations = 1;
  try {
    ik(m, target, Joints::Zero(), opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}

TEST(Mount, QuaternionFollowsIntrinsicOrder) {
  const MountRotation mount{};
  const Eigen::Quaterniond expect = Eigen::AngleAxisd(deg(60), Eigen::Vector3d::UnitY()) *
                                    Eigen::AngleAxisd(deg(5), Eigen::Vector3d::UnitZ()) *
                                    Eigen::AngleAxisd(deg(20), Eigen::Vector3d::UnitX());
  EXPECT_NEAR(angle_between(mount_quaternion(mount), expect), 0.0, 1e-12);
  MountRotation xyz = mount;
  xyz.order = {'X', 'Y', 'Z'};
  const Eigen::Quaterniond expect_xyz = Eigen::AngleAxisd(deg(20), Eigen::Vector3d::UnitX()) *
                                        Eigen::AngleAxisd(deg(60), Eigen::Vector3d::UnitY()) *
                                        Eigen::AngleAxisd(deg(5), Eigen::Vector3d::UnitZ());
  EXPECT_NEAR(angle_between(mount_quaternion(xyz), expect_xyz), 0.0, 1e-12);
  EXPECT_NEAR(angle_between(mount_quaternion(MountRotation::none()), Eigen::Quaterniond::Identity()), 0.0, 1e-12);
}

TEST(Mount, RejectsBadValues) {
  MountRotation m{};
  m.ry_deg = 181;
  EXPECT_THROW(validate(m), Error);
  m = {};
  m.order = {'X', 'X', 'Z'};
  EXPECT_THROW(validate(m), Error);
}

TEST(Writing, OrientationEqualsHome) {
  const auto m = irb120_model();
  EXPECT_NEAR(angle_between(writing_orientation(), fk(m, Joints::Zero()).orientation), 0.0, 1e-12);
}

TEST(Plan, FrameCountAt42Hz) {
  const auto m = irb120_model();
  const auto jt = plan_joint_trajectory(m, straight_line(0.1, 600), MountRotation{});
  EXPECT_EQ(jt.frames.size(), 126u);
  EXPECT_DOUBLE_EQ(jt.rate_hz, 42.0);
}

TEST(Plan, ShortLineIsSmoothAndTracksThePath) {
  const auto m = irb120_model();
  const auto line = straight_line(0.02, 400);
  const auto jt = plan_joint_trajectory(m, line, MountRotation{});
  EXPECT_NO_THROW(validate(jt, m));
  double max_step = 0.0;
  for (std::size_t i = 1; i < jt.frames.size(); ++i) {
    max_step = std::max(max_step, (jt.frames[i] - jt.frames[i - 1]).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(max_step, 0.05);
  for (std::size_t i = 0; i < jt.frames.size(); ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(jt.frames.size());
    const Eigen::Vector3d expect = plane_to_base(Eigen::Vector3d(-0.01 + 0.02 * s * 400.0 / 399.0, 0, 0), kDefaultPlaneCenter);
    EXPECT_NEAR((fk(m, jt.frames[i]).position - expect).norm(), 0.0, 1e-5);
  }
}

TEST(Plan, MountChangesOrientationByAConstantRotation) {
  const auto m = irb120_model();
  const auto line = straight_line(0.06, 600);
  const auto a = plan_joint_trajectory(m, line, MountRotation::none());
  const auto b = plan_joint_trajectory(m, line, MountRotation{});
  ASSERT_EQ(a.frames.size(), b.frames.size());
  const Eigen::Quaterniond mount = mount_quaternion(MountRotation{});
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    const Eigen::Quaterniond ra = fk(m, a.frames[i]).orientation;
    const Eigen::Quaterniond rb = fk(m, b.frames[i]).orientation;
    EXPECT_LT(angle_between(ra.conjugate() * rb, mount), 1e-6);
    EXPECT_LT((fk(m, a.frames[i]).position - fk(m, b.frames[i]).position).norm(), 1e-8);
  }
}

TEST(Plan, UnreachablePathReportsTheFailingIndex) {
  const auto m = irb120_model();
  CartesianTrajectory t = straight_line(0.02, 400);
  PlanOptions opts;
  opts.plane_center = Eigen::Vector3d(0.9, 0.0, 0.4);
  try {
    plan_joint_trajectory(m, t, MountRotation{}, opts);
    FAIL();
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.code(), ErrorCode::PlanningFailed);
    EXPECT_EQ(e.cause(), ErrorCode::Unreachable);
    EXPECT_EQ(e.index(), 0u);
  }
}

TEST(JointTrajectory, ValidationCatchesJumpsAndLimits) {
  const auto m = irb120_model();
  JointTrajectory jt;
  jt.frames = {Joints::Zero(), Joints::Constant(0.1)};
  EXPECT_NO_THROW(validate(jt, m));
  jt.frames.push_back(Joints::Constant(0.35));
  try {
    validate(jt, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PlanningFailed);
  }
  jt.frames = {Joints::Constant(3.0)};
  try {
    validate(jt, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::JointLimit);
  }
}

TEST(Replay, ConstantJointsGiveConstantPose) {
  const auto m = irb120_model();
  JointTrajectory jt;
  Joints q;
  q << 0.1, 0.2, -0.3, 0.4, 0.5, -0.6;
  jt.frames.assign(84, q);
  const auto poses = replay(m, jt);
  ASSERT_EQ(poses.size(), 200u);
  const Pose p = fk(m, q);
  for (const auto& r : poses) {
    EXPECT_NEAR((r.position - p.position).norm(), 0.0, 1e-12);
    EXPECT_NEAR(angle_between(r.orientation, p.orientation), 0.0, 1e-9);
  }
}

TEST(Replay, ThreeSecondsAt100Hz) {
  const auto m = irb120_model();
  JointTrajectory jt;
  jt.frames.assign(126, Joints::Zero());
  EXPECT_EQ(replay(m, jt, 100.0).size(), 300u);
}

TEST(Replay, LinearRampVelocityMatchesJacobian) {
  const auto m = irb120_model();
  Joints q0;
  q0 << 0.1, 0.3, -0.2, 0.2, 0.6, 0.1;
  Joints rate;
  rate << 0.05, -0.04, 0.06, 0.1, -0.05, 0.08;  // rad/s
  JointTrajectory jt;
  for (int i = 0; i < 126; ++i) jt.frames.push_back(q0 + rate * (i / 42.0));
  const auto poses = replay(m, jt, 100.0);
  for (std::size_t k = 20; k + 20 < poses.size(); k += 10) {
    const Eigen::Vector3d v = (poses[k + 1].position - poses[k - 1].position) * 50.0;
    const Joints q = q0 + rate * (static_cast<double>(k) / 100.0);
    const Eigen::Vector3d expect = jacobian(m, q).topRows<3>() * rate;
    EXPECT_LT((v - expect).norm(), 0.05 * expect.norm()) << k;
  }
}

TEST(Replay, FollowsThePlannedPath) {
  const auto m = irb120_model();
  const auto line = straight_line(0.08, 600);
  const auto jt = plan_joint_trajectory(m, line, MountRotation{});
  const auto poses = replay(m, jt, 100.0);
  std::vector<double> xs, ys, zs;
  for (const auto& p : line.points) {
    const Eigen::Vector3d b = plane_to_base(p, kDefaultPlaneCenter);
    xs.push_back(b.x());
    ys.push_back(b.y());
    zs.push_back(b.z());
  }
  const auto ref = resample_fourier_aperiodic(SampledSignal3(xs, ys, zs, 200.0), poses.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto r = ref.at(i);
    sq += (poses[i].position - Eigen::Vector3d(r[0], r[1], r[2])).squaredNorm();
  }
  EXPECT_LT(std::sqrt(sq / static_cast<double>(poses.size())), 1e-3);
}

TEST(CubicResample, ReproducesLinearData) {
  std::vector<double> v;
  for (int i = 0; i < 20; ++i) v.push_back(0.5 - 0.25 * i);
  std::vector<double> t;
  for (int i = 0; i < 50; ++i) t.push_back(i * 0.009);
  const auto r = cubic_resample(v, 42.0, t);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(r[i], 0.5 - 0.25 * t[i] * 42.0, 1e-9);
}
