#pragma once

// Uniformly sampled 3-axis signals and the preprocessing chain applied to
// every gesture: zero-phase low-pass, Fourier resampling, finite-difference
// calculus between channels and 300-value feature vectors.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace airdigit {

enum class ChannelKind { Acceleration, Velocity, Trajectory };

inline constexpr std::array<ChannelKind, 3> kAllChannels = {
    ChannelKind::Acceleration, ChannelKind::Velocity, ChannelKind::Trajectory};

// Short names used on disk and on the command line: accel, vel, traj.
std::string_view short_name(ChannelKind kind);
std::string_view long_name(ChannelKind kind);
ChannelKind parse_channel(std::string_view name);

class SampledSignal3 {
 public:
  // Throws InvalidSignal unless all axes share one length >= 2, the rate is
  // positive and every sample is finite.
  SampledSignal3(std::vector<double> x, std::vector<double> y, std::vector<double> z,
                 double rate_hz);

  static SampledSignal3 constant(std::size_t n, double rate_hz, double x, double y, double z);

  std::size_t size() const noexcept { return axes_[0].size(); }
  double rate_hz() const noexcept { return rate_hz_; }
  // n / rate: a 300-sample capture at 100 Hz lasts 3 s.
  double duration_s() const noexcept { return static_cast<double>(size()) / rate_hz_; }

  std::span<const double> axis(std::size_t i) const { return axes_.at(i); }
  std::span<const double> x() const { return axes_[0]; }
  std::span<const double> y() const { return axes_[1]; }
  std::span<const double> z() const { return axes_[2]; }

  std::array<double, 3> at(std::size_t i) const { return {axes_[0][i], axes_[1][i], axes_[2][i]}; }

  bool operator==(const SampledSignal3&) const = default;

 private:
  std::array<std::vector<double>, 3> axes_;
  double rate_hz_;
};

struct FilterSpec {
  double cutoff_hz = 20.0;
  int order = 4;
  bool zero_phase = true;
};

inline constexpr std::size_t kSamplesPerAxis = 100;
inline constexpr std::size_t kFeatureLength = 3 * kSamplesPerAxis;

// Layout is [x0..x99, y0..y99, z0..z99].
struct FeatureVector {
  std::array<double, kFeatureLength> values{};
  ChannelKind kind = ChannelKind::Acceleration;

  // Slices the values back into a 100-sample-per-axis signal.
  SampledSignal3 to_signal(double rate_hz) const;

  bool operator==(const FeatureVector&) const = default;
};

// One biquad section in transposed direct form II, a0 normalized to 1.
struct Biquad {
  double b0, b1, b2, a1, a2;
};

// Butterworth low-pass realized as second-order sections via the bilinear
// transform with cutoff prewarping. Each section has unit DC gain. An odd
// order contributes one first-order section (b2 = a2 = 0).
std::vector<Biquad> butterworth_lowpass(const FilterSpec& spec, double rate_hz);

// Runs the cascade over one sequence, starting from the steady state of the
// first sample.
std::vector<double> sos_filter(std::span<const Biquad> sections, std::span<const double> x);

// Forward-backward (or forward-only when !spec.zero_phase) low-pass of every
// axis. Edges are extended by odd reflection of 3 * order samples.
SampledSignal3 lowpass(const SampledSignal3& signal, const FilterSpec& spec);

// Frequency-domain resampling to n samples per axis. Rate scales by n / len.
SampledSignal3 resample_fourier(const SampledSignal3& signal, std::size_t n);
std::vector<double> resample_fourier(std::span<const double> x, std::size_t n);

// Same as resample_fourier after removing the chord joining the first and last
// sample, which is added back afterwards. Used for position paths that do not
// start and end at the same place, where the plain method rings at the edges.
SampledSignal3 resample_fourier_aperiodic(const SampledSignal3& signal, std::size_t n);

SampledSignal3 differentiate(const SampledSignal3& signal);

// Cumulative trapezoid starting at 0. With detrend, the least-squares line of
// each axis is removed.
SampledSignal3 integrate(const SampledSignal3& signal, bool detrend);

// Subtracts the least-squares line (over sample index) from x.
std::vector<double> remove_linear_trend(std::span<const double> x);

FeatureVector to_feature_vector(const SampledSignal3& signal, ChannelKind kind);

}  // namespace airdigit
