#pragma once

// Simulated watch IMU: pose sequences in, sensor-frame acceleration plus the
// velocity and trajectory channels derived from it out.

#include <Eigen/Geometry>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "airdigit/robot.hpp"
#include "airdigit/signal.hpp"
#include "airdigit/synth.hpp"

namespace airdigit {

enum class Provenance { HumanLike, Robot };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view s);

struct ImuConfig {
  double rate_hz = 100.0;
  double gravity_mps2 = 9.81;
  bool include_gravity = true;
  std::array<double, 3> noise_std{0.0, 0.0, 0.0};  // m/s^2 per sensor axis
  std::uint64_t seed = 0;
};

void validate(const ImuConfig& cfg, double filter_cutoff_hz = 20.0);

struct GestureSample {
  std::string id;
  int label = 0;
  Provenance provenance = Provenance::Robot;
  SampledSignal3 acceleration;
  SampledSignal3 velocity;
  SampledSignal3 trajectory;
  AugmentationParams params;
  double duration_s = 0.0;

  const SampledSignal3& channel(ChannelKind kind) const;
};

// Sensor-frame specific force: second differences of position plus world
// gravity (0, 0, -g), rotated by each pose's inverse orientation, plus seeded
// white noise. Poses are sampled at cfg.rate_hz.
SampledSignal3 poses_to_acceleration(const std::vector<Pose>& poses, const ImuConfig& cfg);

// The one derivation used for every provenance: velocity is the detrended
// integral of gravity-free acceleration, trajectory the detrended integral of
// velocity.
struct DerivedChannels {
  SampledSignal3 velocity;
  SampledSignal3 trajectory;
};
DerivedChannels derive_channels(const SampledSignal3& accel);

// Builds all three (unfiltered) channels. Gravity is removed for the
// derivation using the known simulated gravity vector.
GestureSample make_sample(int label, Provenance provenance, const std::vector<Pose>& poses,
                          const AugmentationParams& params, const ImuConfig& cfg, std::string id = {});

// Slow wrist sway: a random walk per rotation axis, low-passed at
// `bandwidth_hz` and scaled to `sigma_deg` standard deviation.
std::vector<Eigen::Quaterniond> wrist_sway(std::size_t n, double rate_hz, double sigma_deg,
                                           std::uint64_t seed, double bandwidth_hz = 1.0);

}  // namespace airdigit
