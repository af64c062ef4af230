#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "airdigit/dataset.hpp"
#include "airdigit/error.hpp"
#include "airdigit/imu.hpp"

using namespace airdigit;

namespace {

constexpr double kPi = std::numbers::pi;

ImuConfig quiet(bool gravity = true) {
  ImuConfig cfg;
  cfg.include_gravity = gravity;
  return cfg;
}

std::vector<Pose> stationary(std::size_t n, const Eigen::Quaterniond& q) {
  Pose p;
  p.position = Eigen::Vector3d(0.4, 0.1, 0.5);
  p.orientation = q;
  return std::vector<Pose>(n, p);
}

// x_k(t) = A_k sin(w_k t) on each world axis, constant orientation.
std::vector<Pose> sinusoid_poses(std::size_t n, double rate, const Eigen::Vector3d& amp, const Eigen::Vector3d& freq,
                                 const Eigen::Quaterniond& q = Eigen::Quaterniond::Identity()) {
  std::vector<Pose> poses(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    for (int k = 0; k < 3; ++k) poses[i].position[k] = amp[k] * std::sin(2 * kPi * freq[k] * t);
    poses[i].orientation = q;
  }
  return poses;
}

double correlation(std::span<const double> a, const std::vector<double>& b) {
  const double n = static_cast<double>(b.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// x minus its least-squares line over the sample index.
std::vector<double> without_line(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double st = 0, sx = 0, stt = 0, stx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i);
    st += t;
    sx += x[i];
    stt += t * t;
    stx += t * x[i];
  }
  const double slope = (n * stx - st * sx) / (n * stt - st * st);
  const double icpt = (sx - slope * st) / n;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - icpt - slope * static_cast<double>(i);
  return out;
}

Eigen::Quaterniond some_rotation() {
  return Eigen::Quaterniond(Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, -0.5).normalized()));
}

}  // namespace

TEST(PosesToAcceleration, StationaryFeelsGravity) {
  for (const auto& q : {Eigen::Quaterniond::Identity(), some_rotation()}) {
    const auto a = poses_to_acceleration(stationary(50, q), quiet());
    const Eigen::Vector3d expect = q.conjugate() * Eigen::Vector3d(0, 0, -9.81);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto s = a.at(i);
      EXPECT_NEAR(std::hypot(s[0], s[1], s[2]), 9.81, 1e-6);
      EXPECT_NEAR(s[0], expect.x(), 1e-9);
      EXPECT_NEAR(s[2], expect.z(), 1e-9);
    }
  }
}

TEST(PosesToAcceleration, StationaryWithoutGravityIsZero) {
  const auto a = poses_to_acceleration(stationary(50, some_rotation()), quiet(false));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (double v : a.at(i)) EXPECT_NEAR(v, 0.0, 1e-9);
  }
}

TEST(PosesToAcceleration, SinusoidMatchesSecondDerivative) {
  for (double f : {0.5, 1.0, 2.0, 5.0}) {
    const double amp = 0.05;
    const auto poses = sinusoid_poses(300, 100, {amp, 0, 0}, {f, 1, 1});
    const auto a = poses_to_acceleration(poses, quiet(false));
    const double w = 2 * kPi * f;
    double err = 0, ref = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double expect = -amp * w * w * std::sin(w * static_cast<double>(i) / 100.0);
      err += std::pow(a.x()[i] - expect, 2);
      ref += expect * expect;
    }
    EXPECT_LE(std::sqrt(err / ref), 0.01) << f;
  }
}

TEST(PosesToAcceleration, TooShort) {
  try {
    poses_to_acceleration(stationary(4, Eigen::Quaterniond::Identity()), quiet());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooShort);
  }
}

TEST(PosesToAcceleration, SeededNoise) {
  ImuConfig cfg = quiet(false);
  cfg.noise_std = {0.05, 0.1, 0.0};
  cfg.seed = 123;
  const auto poses = stationary(20000, Eigen::Quaterniond::Identity());
  const auto a = poses_to_acceleration(poses, cfg);
  const auto b = poses_to_acceleration(poses, cfg);
  EXPECT_EQ(a, b);
  auto sd = [](std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
  };
  EXPECT_NEAR(sd(a.x()), 0.05, 0.002);
  EXPECT_NEAR(sd(a.y()), 0.1, 0.004);
  EXPECT_EQ(sd(a.z()), 0.0);
  cfg.seed = 124;
  EXPECT_NE(poses_to_acceleration(poses, cfg), a);
}

TEST(DeriveChannels, ZeroAccelerationGivesZero) {
  const auto d = derive_channels(SampledSignal3::constant(300, 100, 0, 0, 0));
  for (std::size_t i = 0; i < 300; ++i) {
    for (double v : d.velocity.at(i)) EXPECT_EQ(v, 0.0);
    for (double v : d.trajectory.at(i)) EXPECT_EQ(v, 0.0);
  }
}

// Recovery holds up to an affine term, so the reference has its line removed.
TEST(DeriveChannels, RecoversSinusoidalDisplacement) {
  const Eigen::Vector3d amp(0.05, 0.03, 0.04);
  const Eigen::Vector3d freq(1.0, 2.0 / 3.0, 4.0 / 3.0);
  const auto poses = sinusoid_poses(300, 100, amp, freq);
  const auto d = derive_channels(poses_to_acceleration(poses, quiet(false)));
  for (int k = 0; k < 3; ++k) {
    std::vector<double> x;
    for (const auto& p : poses) x.push_back(p.position[k]);
    EXPECT_GE(correlation(d.trajectory.axis(static_cast<std::size_t>(k)), without_line(x)), 0.99) << k;
  }
}

TEST(DeriveChannels, OutputsHaveNoSlope) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  std::vector<double> x(250), y(250), z(250);
  for (std::size_t i = 0; i < 250; ++i) {
    x[i] = n01(rng) + 0.3;
    y[i] = n01(rng);
    z[i] = n01(rng) - 1.0;
  }
  const auto d = derive_channels(SampledSignal3(x, y, z, 100));
  for (const SampledSignal3* s : {&d.velocity, &d.trajectory}) {
    for (std::size_t a = 0; a < 3; ++a) {
      const auto v = s->axis(a);
      double st = 0, sv = 0, stt = 0, stv = 0;
      const double n = static_cast<double>(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = static_cast<double>(i);
        st += t;
        sv += v[i];
        stt += t * t;
        stv += t * v[i];
      }
      EXPECT_NEAR((n * stv - st * sv) / (n * stt - st * st), 0.0, 1e-9);
    }
  }
}

TEST(ImuProperties, GravityToggleIsAConstantOffset) {
  const auto poses = sinusoid_poses(300, 100, {0.05, 0.02, 0.03}, {1, 2, 0.5}, some_rotation());
  const auto on = poses_to_acceleration(poses, quiet(true));
  const auto off = poses_to_acceleration(poses, quiet(false));
  const auto d0 = on.at(0);
  const auto e0 = off.at(0);
  for (std::size_t i = 0; i < on.size(); ++i) {
    const auto d = on.at(i);
    const auto e = off.at(i);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(d[k] - e[k], d0[k] - e0[k], 1e-9);
  }
}

TEST(ImuProperties, DoubleIntegrationRecoversDisplacementUnderRotation) {
  // With a fixed non-identity orientation the sensor axes mix the world axes;
  // rotating back to the world frame recovers each world axis.
  const Eigen::Quaterniond q = some_rotation();
  const auto poses = sinusoid_poses(300, 100, {0.05, 0.03, 0.04}, {1.0, 2.0 / 3.0, 4.0 / 3.0}, q);
  const auto d = derive_channels(poses_to_acceleration(poses, quiet(false)));
  std::array<std::vector<double>, 3> world;
  for (std::size_t i = 0; i < d.trajectory.size(); ++i) {
    const auto s = d.trajectory.at(i);
    const Eigen::Vector3d w = q * Eigen::Vector3d(s[0], s[1], s[2]);
    for (int k = 0; k < 3; ++k) world[static_cast<std::size_t>(k)].push_back(w[k]);
  }
  for (int k = 0; k < 3; ++k) {
    std::vector<double> x;
    for (const auto& p : poses) x.push_back(p.position[k]);
    EXPECT_GE(correlation(world[static_cast<std::size_t>(k)], without_line(x)), 0.99) << k;
  }
}

TEST(MakeSample, ChannelsShareLengthAndRate) {
  const auto poses = sinusoid_poses(300, 100, {0.05, 0.02, 0.03}, {1, 2, 0.5}, some_rotation());
  const auto s = make_sample(4, Provenance::HumanLike, poses, {}, quiet(), "x");
  for (ChannelKind k : kAllChannels) {
    EXPECT_EQ(s.channel(k).size(), 300u);
    EXPECT_DOUBLE_EQ(s.channel(k).rate_hz(), 100.0);
  }
  EXPECT_DOUBLE_EQ(s.duration_s, 3.0);
  EXPECT_EQ(s.label, 4);
  EXPECT_EQ(s.id, "x");
}

TEST(MakeSample, GravityRemovedBeforeDerivation) {
  const auto poses = sinusoid_poses(300, 100, {0.05, 0.02, 0.03}, {1, 2, 0.5}, some_rotation());
  const auto with = make_sample(1, Provenance::Robot, poses, {}, quiet(true));
  const auto without = make_sample(1, Provenance::Robot, poses, {}, quiet(false));
  for (std::size_t i = 0; i < 300; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(with.velocity.at(i)[k], without.velocity.at(i)[k], 1e-9);
      EXPECT_NEAR(with.trajectory.at(i)[k], without.trajectory.at(i)[k], 1e-9);
    }
  }
}

TEST(MakeSample, RejectsBadLabelAndDuration) {
  const auto poses = stationary(300, Eigen::Quaterniond::Identity());
  EXPECT_THROW(make_sample(10, Provenance::Robot, poses, {}, quiet()), Error);
  EXPECT_THROW(make_sample(1, Provenance::Robot, stationary(150, Eigen::Quaterniond::Identity()), {}, quiet()), Error);
  EXPECT_THROW(make_sample(1, Provenance::Robot, stationary(450, Eigen::Quaterniond::Identity()), {}, quiet()), Error);
}

TEST(Provenance, Names) {
  for (Provenance p : {Provenance::Robot, Provenance::HumanLike}) EXPECT_EQ(parse_provenance(to_string(p)), p);
  EXPECT_THROW(parse_provenance("alien"), Error);
}

TEST(ImuConfig, RateMustExceedTwiceTheCutoff) {
  ImuConfig cfg;
  EXPECT_NO_THROW(validate(cfg, 20.0));
  cfg.rate_hz = 40.0;
  EXPECT_THROW(validate(cfg, 20.0), Error);
  cfg = {};
  cfg.noise_std = {-1, 0, 0};
  EXPECT_THROW(validate(cfg), Error);
}

TEST(WristSway, ScaledToSigma) {
  const auto sway = wrist_sway(400, 100, 3.0, 77);
  ASSERT_EQ(sway.size(), 400u);
  double sq = 0;
  for (const auto& q : sway) {
    EXPECT_NEAR(q.norm(), 1.0, 1e-9);
    sq += Eigen::AngleAxisd(q).angle() * Eigen::AngleAxisd(q).angle();
  }
  // Three independent axes of 3 deg each.
  const double rms_deg = std::sqrt(sq / 400.0) * 180.0 / kPi;
  EXPECT_NEAR(rms_deg, 3.0 * std::sqrt(3.0), 0.5);
  EXPECT_EQ(wrist_sway(10, 100, 0.0, 1)[5].coeffs(), Eigen::Quaterniond::Identity().coeffs());
}

TEST(RobotSample, NeutralDigitTwo) {
  const GenerationConfig cfg;
  const auto model = irb120_model();
  JointTrajectory jt;
  const auto s = make_robot_sample(model, digit_template(2), {}, 0, 42, cfg, &jt);
  EXPECT_EQ(s.label, 2);
  EXPECT_EQ(s.provenance, Provenance::Robot);
  for (ChannelKind k : kAllChannels) EXPECT_DOUBLE_EQ(s.channel(k).rate_hz(), 100.0);
  EXPECT_NEAR(s.duration_s, digit_template(2).canonical_duration_s, 0.02);
  EXPECT_NO_THROW(validate(jt, model));
  EXPECT_DOUBLE_EQ(jt.rate_hz, 42.0);
  const auto again = make_robot_sample(model, digit_template(2), {}, 0, 42, cfg);
  EXPECT_EQ(again.acceleration, s.acceleration);
  EXPECT_EQ(again.velocity, s.velocity);
}
