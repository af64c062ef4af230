#include "airdigit/imu.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "airdigit/error.hpp"

namespace airdigit {

std::string_view to_string(Provenance p) {
  return p == Provenance::Robot ? "robot" : "human-like";
}

Provenance parse_provenance(std::string_view s) {
  if (s == "robot") return Provenance::Robot;
  if (s == "human-like" || s == "human") return Provenance::HumanLike;
  throw Error(ErrorCode::InvalidConfig, "unknown provenance '" + std::string(s) + "'");
}

void validate(const ImuConfig& cfg, double filter_cutoff_hz) {
  if (!(cfg.rate_hz > 2.0 * filter_cutoff_hz)) {
    throw Error(ErrorCode::InvalidConfig, "IMU rate must exceed twice the filter cutoff");
  }
  for (double s : cfg.noise_std) {
    if (!(s >= 0.0)) throw Error(ErrorCode::InvalidConfig, "noise std must be non-negative");
  }
}

const SampledSignal3& GestureSample::channel(ChannelKind kind) const {
  switch (kind) {
    case ChannelKind::Acceleration: return acceleration;
    case ChannelKind::Velocity: return velocity;
    case ChannelKind::Trajectory: return trajectory;
  }
  return acceleration;
}

SampledSignal3 poses_to_acceleration(const std::vector<Pose>& poses, const ImuConfig& cfg) {
  const std::size_t n = poses.size();
  if (n < 5) throw Error(ErrorCode::TooShort, "need at least 5 poses");
  const double inv_dt2 = cfg.rate_hz * cfg.rate_hz;
  const Eigen::Vector3d gravity(0.0, 0.0, cfg.include_gravity ? -cfg.gravity_mps2 : 0.0);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> x(n), y(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3d a;
    if (i == 0) {
      a = 2.0 * poses[0].position - 5.0 * poses[1].position + 4.0 * poses[2].position - poses[3].position;
    } else if (i == n - 1) {
      a = 2.0 * poses[n - 1].position - 5.0 * poses[n - 2].position + 4.0 * poses[n - 3].position -
          poses[n - 4].position;
    } else {
      a = poses[i + 1].position - 2.0 * poses[i].position + poses[i - 1].position;
    }
    a *= inv_dt2;
    Eigen::Vector3d s = poses[i].orientation.conjugate() * (a + gravity);
    for (int k = 0; k < 3; ++k) {
      const double sigma = cfg.noise_std[static_cast<std::size_t>(k)];
      if (sigma > 0.0) s[k] += sigma * normal(rng);
    }
    x[i] = s.x();
    y[i] = s.y();
    z[i] = s.z();
  }
  return SampledSignal3(std::move(x), std::move(y), std::move(z), cfg.rate_hz);
}

DerivedChannels derive_channels(const SampledSignal3& accel) {
  SampledSignal3 velocity = integrate(accel, true);
  SampledSignal3 trajectory = integrate(velocity, true);
  return {std::move(velocity), std::move(trajectory)};
}

GestureSample make_sample(int label, Provenance provenance, const std::vector<Pose>& poses,
                          const AugmentationParams& params, const ImuConfig& cfg, std::string id) {
  if (label < 0 || label > 9) throw Error(ErrorCode::UnknownDigit, "label " + std::to_string(label));
  SampledSignal3 accel = poses_to_acceleration(poses, cfg);

  std::vector<double> x(accel.x().begin(), accel.x().end());
  std::vector<double> y(accel.y().begin(), accel.y().end());
  std::vector<double> z(accel.z().begin(), accel.z().end());
  if (cfg.include_gravity) {
    const Eigen::Vector3d gravity(0.0, 0.0, -cfg.gravity_mps2);
    for (std::size_t i = 0; i < poses.size(); ++i) {
      const Eigen::Vector3d g = poses[i].orientation.conjugate() * gravity;
      x[i] -= g.x();
      y[i] -= g.y();
      z[i] -= g.z();
    }
  }
  DerivedChannels derived =
      derive_channels(SampledSignal3(std::move(x), std::move(y), std::move(z), cfg.rate_hz));

  const double duration = accel.duration_s();
  if (duration < kMinDurationS - 1e-9 || duration > kMaxDurationS + 1e-9) {
    throw Error(ErrorCode::InvalidSignal,
                "sample duration " + std::to_string(duration) + " s outside [2, 4] s");
  }
  return GestureSample{.id = std::move(id),
                       .label = label,
                       .provenance = provenance,
                       .acceleration = std::move(accel),
                       .velocity = std::move(derived.velocity),
                       .trajectory = std::move(derived.trajectory),
                       .params = params,
                       .duration_s = duration};
}

std::vector<Eigen::Quaterniond> wrist_sway(std::size_t n, double rate_hz, double sigma_deg,
                                           std::uint64_t seed, double bandwidth_hz) {
  std::vector<Eigen::Quaterniond> out(n, Eigen::Quaterniond::Identity());
  if (n < 2 || sigma_deg <= 0.0) return out;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<std::vector<double>, 3> walk;
  for (auto& w : walk) {
    w.resize(n);
    double acc = 0.0;
    for (double& v : w) {
      acc += normal(rng);
      v = acc;
    }
  }
  const SampledSignal3 smooth =
      lowpass(SampledSignal3(walk[0], walk[1], walk[2], rate_hz), {bandwidth_hz, 2, true});

  std::array<std::vector<double>, 3> angle;
  const double sigma = sigma_deg * std::numbers::pi / 180.0;
  for (std::size_t a = 0; a < 3; ++a) {
    angle[a] = remove_linear_trend(smooth.axis(a));
    double var = 0.0;
    for (double v : angle[a]) var += v * v;
    const double sd = std::sqrt(var / static_cast<double>(n));
    const double scale = sd > 0.0 ? sigma / sd : 0.0;
    for (double& v : angle[a]) v *= scale;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d r(angle[0][i], angle[1][i], angle[2][i]);
    const double th = r.norm();
    out[i] = th > 0.0 ? Eigen::Quaterniond(Eigen::AngleAxisd(th, r / th)) : Eigen::Quaterniond::Identity();
  }
  return out;
}

}  // namespace airdigit
