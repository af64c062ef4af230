#include "airdigit/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <string>

#include "airdigit/error.hpp"

namespace airdigit {

namespace {

using Complex = std::complex<double>;

// fftw planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<Complex> dft(std::vector<Complex> in, bool inverse) {
  std::vector<Complex> out(in.size());
  auto* src = reinterpret_cast<fftw_complex*>(in.data());
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(in.size()), src, dst,
                            inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

double require_finite(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidSignal, "non-finite sample");
  return v;
}

SampledSignal3 map_axes(const SampledSignal3& s, double rate_hz, auto&& fn) {
  return SampledSignal3(fn(s.x()), fn(s.y()), fn(s.z()), rate_hz);
}

}  // namespace

std::string_view short_name(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Acceleration: return "accel";
    case ChannelKind::Velocity: return "vel";
    case ChannelKind::Trajectory: return "traj";
  }
  return "?";
}

std::string_view long_name(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::Acceleration: return "acceleration";
    case ChannelKind::Velocity: return "velocity";
    case ChannelKind::Trajectory: return "trajectory";
  }
  return "?";
}

ChannelKind parse_channel(std::string_view name) {
  for (ChannelKind k : kAllChannels) {
    if (name == short_name(k) || name == long_name(k)) return k;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown channel '" + std::string(name) + "'");
}

SampledSignal3::SampledSignal3(std::vector<double> x, std::vector<double> y,
                               std::vector<double> z, double rate_hz)
    : axes_{std::move(x), std::move(y), std::move(z)}, rate_hz_(rate_hz) {
  if (!(rate_hz_ > 0.0) || !std::isfinite(rate_hz_)) {
    throw Error(ErrorCode::InvalidSignal, "rate must be positive");
  }
  const std::size_t n = axes_[0].size();
  if (axes_[1].size() != n || axes_[2].size() != n) {
    throw Error(ErrorCode::InvalidSignal, "axes have different lengths");
  }
  if (n < 2) throw Error(ErrorCode::InvalidSignal, "need at least 2 samples");
  for (const auto& a : axes_) {
    for (double v : a) require_finite(v);
  }
}

SampledSignal3 SampledSignal3::constant(std::size_t n, double rate_hz, double x, double y,
                                        double z) {
  return SampledSignal3(std::vector<double>(n, x), std::vector<double>(n, y),
                        std::vector<double>(n, z), rate_hz);
}

SampledSignal3 FeatureVector::to_signal(double rate_hz) const {
  auto slice = [&](std::size_t axis) {
    auto first = values.begin() + static_cast<std::ptrdiff_t>(axis * kSamplesPerAxis);
    return std::vector<double>(first, first + kSamplesPerAxis);
  };
  return SampledSignal3(slice(0), slice(1), slice(2), rate_hz);
}

std::vector<Biquad> butterworth_lowpass(const FilterSpec& spec, double rate_hz) {
  if (spec.order < 1) throw Error(ErrorCode::InvalidFilterSpec, "order must be >= 1");
  if (!(spec.cutoff_hz > 0.0) || !(spec.cutoff_hz < rate_hz / 2.0)) {
    throw Error(ErrorCode::InvalidFilterSpec,
                "cutoff " + std::to_string(spec.cutoff_hz) + " Hz must lie in (0, " +
                    std::to_string(rate_hz / 2.0) + ") Hz");
  }
  const double k = std::tan(std::numbers::pi * spec.cutoff_hz / rate_hz);
  const double k2 = k * k;
  const int n = spec.order;

  std::vector<Biquad> sections;
  for (int i = 0; i < n / 2; ++i) {
    // Analog prototype pair s^2 + a s + 1.
    const double theta = std::numbers::pi * (2.0 * i + n + 1) / (2.0 * n);
    const double a = -2.0 * std::cos(theta);
    const double d0 = 1.0 + a * k + k2;
    sections.push_back({k2 / d0, 2.0 * k2 / d0, k2 / d0, (2.0 * k2 - 2.0) / d0,
                        (1.0 - a * k + k2) / d0});
  }
  if (n % 2 == 1) {
    const double d0 = 1.0 + k;
    sections.push_back({k / d0, k / d0, 0.0, (k - 1.0) / d0, 0.0});
  }
  return sections;
}

std::vector<double> sos_filter(std::span<const Biquad> sections, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  if (y.empty()) return y;
  for (const Biquad& s : sections) {
    // Unit DC gain makes the steady state for input c equal to output c.
    const double c = y.front();
    double z1 = (1.0 - s.b0) * c;
    double z2 = (s.b2 - s.a2) * c;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

SampledSignal3 lowpass(const SampledSignal3& signal, const FilterSpec& spec) {
  const auto sections = butterworth_lowpass(spec, signal.rate_hz());
  const std::size_t n = signal.size();
  const std::size_t pad = std::min<std::size_t>(3 * static_cast<std::size_t>(spec.order), n - 1);

  auto run = [&](std::span<const double> x) {
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    ext = sos_filter(sections, ext);
    if (spec.zero_phase) {
      std::reverse(ext.begin(), ext.end());
      ext = sos_filter(sections, ext);
      std::reverse(ext.begin(), ext.end());
    }
    return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                               ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
  };
  return map_axes(signal, signal.rate_hz(), run);
}

std::vector<double> resample_fourier(std::span<const double> x, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidLength, "target length must be >= 2");
  const std::size_t len = x.size();
  if (len < 2) throw Error(ErrorCode::InvalidLength, "input length must be >= 2");
  if (n == len) return {x.begin(), x.end()};

  const auto spectrum = dft(std::vector<Complex>(x.begin(), x.end()), false);
  std::vector<Complex> out(n, Complex{});

  const std::size_t m = std::min(n, len);
  // Bins strictly below the smaller Nyquist are copied on both sides.
  const std::size_t half = (m - 1) / 2;
  for (std::size_t k = 0; k <= half; ++k) out[k] = spectrum[k];
  for (std::size_t k = 1; k <= half; ++k) out[n - k] = spectrum[len - k];
  if (m % 2 == 0) {
    const std::size_t k = m / 2;
    if (n < len) {
      // Both halves fold onto the new Nyquist bin.
      out[k] = spectrum[k] + spectrum[len - k];
    } else {
      // The old Nyquist bin is split evenly between +k and -k.
      out[k] = 0.5 * spectrum[k];
      out[n - k] = 0.5 * spectrum[k];
    }
  }

  const auto time = dft(std::move(out), true);
  std::vector<double> y(n);
  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t i = 0; i < n; ++i) y[i] = time[i].real() * scale;
  return y;
}

SampledSignal3 resample_fourier(const SampledSignal3& signal, std::size_t n) {
  const double rate = signal.rate_hz() * static_cast<double>(n) / static_cast<double>(signal.size());
  if (n < 2) throw Error(ErrorCode::InvalidLength, "target length must be >= 2");
  return map_axes(signal, rate, [n](std::span<const double> a) { return resample_fourier(a, n); });
}

SampledSignal3 resample_fourier_aperiodic(const SampledSignal3& signal, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidLength, "target length must be >= 2");
  const std::size_t len = signal.size();
  const double rate = signal.rate_hz() * static_cast<double>(n) / static_cast<double>(len);
  auto run = [&](std::span<const double> a) {
    const double first = a.front();
    const double slope = (a.back() - first) / static_cast<double>(len - 1);
    std::vector<double> residual(len);
    for (std::size_t i = 0; i < len; ++i) residual[i] = a[i] - first - slope * static_cast<double>(i);
    auto y = resample_fourier(residual, n);
    const double step = static_cast<double>(len) / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) y[j] += first + slope * step * static_cast<double>(j);
    return y;
  };
  return map_axes(signal, rate, run);
}

SampledSignal3 differentiate(const SampledSignal3& signal) {
  const std::size_t n = signal.size();
  if (n < 3) throw Error(ErrorCode::TooShort, "differentiation needs >= 3 samples");
  const double inv2dt = signal.rate_hz() / 2.0;
  auto run = [&](std::span<const double> x) {
    std::vector<double> d(n);
    d[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) * inv2dt;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) * inv2dt;
    d[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) * inv2dt;
    return d;
  };
  return map_axes(signal, signal.rate_hz(), run);
}

std::vector<double> remove_linear_trend(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> out(x.begin(), x.end());
  if (n < 2) return out;
  const double mean_i = static_cast<double>(n - 1) / 2.0;
  double mean_x = 0.0;
  for (double v : x) mean_x += v;
  mean_x /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double di = static_cast<double>(i) - mean_i;
    sxy += di * (x[i] - mean_x);
    sxx += di * di;
  }
  const double slope = sxy / sxx;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] -= mean_x + slope * (static_cast<double>(i) - mean_i);
  }
  return out;
}

SampledSignal3 integrate(const SampledSignal3& signal, bool detrend) {
  const double dt = 1.0 / signal.rate_hz();
  auto run = [&](std::span<const double> x) {
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) y[i] = y[i - 1] + 0.5 * (x[i] + x[i - 1]) * dt;
    return detrend ? remove_linear_trend(y) : y;
  };
  return map_axes(signal, signal.rate_hz(), run);
}

FeatureVector to_feature_vector(const SampledSignal3& signal, ChannelKind kind) {
  if (signal.size() != kSamplesPerAxis) {
    throw Error(ErrorCode::WrongLength, "expected " + std::to_string(kSamplesPerAxis) +
                                            " samples per axis, got " +
                                            std::to_string(signal.size()));
  }
  FeatureVector fv;
  fv.kind = kind;
  for (std::size_t a = 0; a < 3; ++a) {
    std::copy(signal.axis(a).begin(), signal.axis(a).end(),
              fv.values.begin() + static_cast<std::ptrdiff_t>(a * kSamplesPerAxis));
  }
  return fv;
}

}  // namespace airdigit
