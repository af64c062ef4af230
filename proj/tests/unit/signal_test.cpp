#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "airdigit/error.hpp"
#include "airdigit/signal.hpp"

using namespace airdigit;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> tone(std::size_t n, double rate, double freq, double phase = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(2 * kPi * freq * static_cast<double>(i) / rate + phase);
  return v;
}

SampledSignal3 tone3(std::size_t n, double rate, double freq) {
  return SampledSignal3(tone(n, rate, freq), tone(n, rate, freq, 1.0), tone(n, rate, freq, 2.0), rate);
}

double rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

// Magnitude of an order-n digital Butterworth low-pass designed by the
// prewarped bilinear transform.
double butterworth_gain(double f, double fc, double fs, int order) {
  const double r = std::tan(kPi * f / fs) / std::tan(kPi * fc / fs);
  return 1.0 / std::sqrt(1.0 + std::pow(r, 2 * order));
}

// Amplitude of the best-fit sinusoid at `freq` over the middle half.
double amplitude_at(const std::vector<double>& x, double rate, double freq) {
  const std::size_t lo = x.size() / 4;
  const std::size_t hi = 3 * x.size() / 4;
  double c = 0.0, s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double w = 2 * kPi * freq * static_cast<double>(i) / rate;
    c += x[i] * std::cos(w);
    s += x[i] * std::sin(w);
  }
  return 2.0 * std::hypot(c, s) / static_cast<double>(hi - lo);
}

}  // namespace

TEST(SampledSignal3, RejectsBadInput) {
  EXPECT_THROW(SampledSignal3({1, 2}, {1, 2}, {1}, 100), Error);
  EXPECT_THROW(SampledSignal3({1}, {1}, {1}, 100), Error);
  EXPECT_THROW(SampledSignal3({1, 2}, {1, 2}, {1, 2}, 0), Error);
  EXPECT_THROW(SampledSignal3({1, NAN}, {1, 2}, {1, 2}, 100), Error);
  EXPECT_THROW(SampledSignal3({1, INFINITY}, {1, 2}, {1, 2}, 100), Error);
  EXPECT_DOUBLE_EQ(SampledSignal3::constant(300, 100, 0, 0, 0).duration_s(), 3.0);
}

TEST(ChannelNames, RoundTrip) {
  for (ChannelKind k : kAllChannels) EXPECT_EQ(parse_channel(short_name(k)), k);
  EXPECT_THROW(parse_channel("gyro"), Error);
}

TEST(Lowpass, ConstantPassesUnchanged) {
  const auto s = SampledSignal3::constant(250, 100, 1.5, -2.0, 9.81);
  const auto f = lowpass(s, {});
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NEAR(f.x()[i], 1.5, 1e-9);
    EXPECT_NEAR(f.y()[i], -2.0, 1e-9);
    EXPECT_NEAR(f.z()[i], 9.81, 1e-9);
  }
}

TEST(Lowpass, SectionResponseMatchesAnalyticButterworth) {
  for (int order : {1, 2, 3, 4, 6}) {
    const FilterSpec spec{20.0, order, true};
    const auto sos = butterworth_lowpass(spec, 100.0);
    for (double f : {0.0, 5.0, 10.0, 20.0, 30.0, 40.0, 45.0}) {
      const std::complex<double> z = std::polar(1.0, -2 * kPi * f / 100.0);
      std::complex<double> h = 1.0;
      for (const auto& b : sos) h *= (b.b0 + b.b1 * z + b.b2 * z * z) / (1.0 + b.a1 * z + b.a2 * z * z);
      EXPECT_NEAR(std::abs(h), butterworth_gain(f, 20.0, 100.0, order), 1e-9) << "order " << order << " f " << f;
    }
  }
}

TEST(Lowpass, StopbandTone) {
  const auto s = tone3(1000, 100, 40);
  const auto f = lowpass(s, {});
  const double a = amplitude_at(vec(f.x()), 100, 40);
  // Zero-phase squares the magnitude.
  EXPECT_LE(a, 0.01);
  EXPECT_NEAR(a, std::pow(butterworth_gain(40, 20, 100, 4), 2), 1e-4);
}

TEST(Lowpass, PassbandTone) {
  const auto s = tone3(1000, 100, 5);
  const auto f = lowpass(s, {});
  const double a = amplitude_at(vec(f.x()), 100, 5);
  EXPECT_GE(a, 0.999);
  EXPECT_NEAR(a, std::pow(butterworth_gain(5, 20, 100, 4), 2), 1e-4);
}

TEST(Lowpass, ZeroPhaseHasNoLag) {
  const auto s = tone3(400, 100, 3);
  const auto f = lowpass(s, {});
  const auto x = vec(s.x());
  const auto y = vec(f.x());
  auto xcorr = [&](int lag) {
    double acc = 0.0;
    for (std::size_t i = 50; i + 50 < x.size(); ++i) acc += x[i] * y[static_cast<std::size_t>(static_cast<int>(i) + lag)];
    return acc;
  };
  const double at0 = xcorr(0);
  for (int lag = -10; lag <= 10; ++lag) {
    if (lag != 0) EXPECT_LT(xcorr(lag), at0);
  }
}

TEST(Lowpass, ForwardOnlyDelaysTheSignal) {
  const auto s = tone3(400, 100, 3);
  const auto f = lowpass(s, {20.0, 4, false});
  EXPECT_GT(rms(vec(s.x()), vec(f.x())), 1e-3);
}

TEST(Lowpass, RejectsCutoffAtNyquist) {
  const auto s = tone3(100, 100, 5);
  EXPECT_THROW(lowpass(s, {50.0, 4, true}), Error);
  EXPECT_THROW(lowpass(s, {60.0, 4, true}), Error);
  EXPECT_THROW(lowpass(s, {20.0, 0, true}), Error);
  EXPECT_THROW(lowpass(s, {0.0, 4, true}), Error);
  try {
    lowpass(s, {50.0, 4, true});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidFilterSpec);
  }
}

TEST(ResampleFourier, ConstantStaysConstant) {
  for (std::size_t len : {2u, 7u, 64u, 301u}) {
    for (std::size_t n : {2u, 5u, 100u, 400u}) {
      const auto r = resample_fourier(SampledSignal3::constant(len, 100, 3.25, -1, 0), n);
      ASSERT_EQ(r.size(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r.x()[i], 3.25, 1e-9);
    }
  }
}

TEST(ResampleFourier, ToneDownsampleMatchesAnalytic) {
  const auto s = tone3(200, 100, 5);
  const auto r = resample_fourier(s, 100);
  EXPECT_DOUBLE_EQ(r.rate_hz(), 50.0);
  EXPECT_LE(rms(vec(r.x()), tone(100, 50, 5)), 1e-6);
  EXPECT_LE(rms(vec(r.y()), tone(100, 50, 5, 1.0)), 1e-6);
}

TEST(ResampleFourier, IdentityWhenLengthUnchanged) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  std::vector<double> x(137);
  for (auto& v : x) v = n01(rng);
  const auto r = resample_fourier(x, 137);
  EXPECT_LE(rms(r, x), 1e-9);
}

TEST(ResampleFourier, ToneSurvivesOddAndEvenLengths) {
  // A tone at an integer bin below both Nyquist limits is preserved exactly.
  for (std::size_t len : {120u, 121u, 300u, 301u}) {
    for (std::size_t n : {100u, 101u, 250u, 600u}) {
      const double dur = static_cast<double>(len) / 100.0;
      const double f = 3.0 / dur;
      const auto r = resample_fourier(tone(len, 100, f, 0.3), n);
      EXPECT_LE(rms(r, tone(n, static_cast<double>(n) / dur, f, 0.3)), 1e-6) << len << " -> " << n;
    }
  }
}

TEST(ResampleFourier, RejectsShortTargets) {
  const auto s = tone3(200, 100, 5);
  EXPECT_THROW(resample_fourier(s, 1), Error);
  EXPECT_THROW(resample_fourier(s, 0), Error);
}

TEST(ResampleFourier, AperiodicReproducesARamp) {
  std::vector<double> ramp(300);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.01 * static_cast<double>(i);
  const auto r = resample_fourier_aperiodic(SampledSignal3(ramp, ramp, ramp, 200), 63);
  for (std::size_t k = 0; k < r.size(); ++k) EXPECT_NEAR(r.x()[k], 0.01 * static_cast<double>(k) * 300.0 / 63.0, 1e-9);
}

TEST(Differentiate, RampGivesItsSlope) {
  std::vector<double> x(50), y(50), z(50);
  for (std::size_t i = 0; i < 50; ++i) {
    x[i] = 2.0 * static_cast<double>(i) / 100.0;
    y[i] = -0.5 * static_cast<double>(i) / 100.0 + 3;
    z[i] = 7.0;
  }
  const auto d = differentiate(SampledSignal3(x, y, z, 100));
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_NEAR(d.x()[i], 2.0, 1e-9);
    EXPECT_NEAR(d.y()[i], -0.5, 1e-9);
    EXPECT_NEAR(d.z()[i], 0.0, 1e-12);
  }
}

TEST(Differentiate, SineMatchesAnalyticDerivative) {
  const auto s = tone3(200, 100, 2);
  const auto d = differentiate(s);
  std::vector<double> expect(200);
  for (std::size_t i = 0; i < 200; ++i) expect[i] = 4 * kPi * std::cos(2 * kPi * 2 * static_cast<double>(i) / 100);
  // Tolerance relative to the RMS of the derivative.
  EXPECT_LE(rms(vec(d.x()), expect), 1e-2 * 4 * kPi / std::sqrt(2.0));
}

TEST(Differentiate, TooShort) {
  try {
    differentiate(SampledSignal3({1, 2}, {1, 2}, {1, 2}, 100));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooShort);
  }
}

TEST(Integrate, ConstantGivesRamp) {
  const auto s = SampledSignal3::constant(301, 100, 2.0, 0, -1);
  const auto i = integrate(s, false);
  EXPECT_NEAR(i.x().front(), 0.0, 1e-12);
  EXPECT_NEAR(i.x().back(), 2.0 * 3.0, 1e-9);
  EXPECT_NEAR(i.z().back(), -3.0, 1e-9);
}

TEST(Integrate, UndoesDifferentiate) {
  std::vector<double> x(300);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double t = static_cast<double>(k) / 100.0;
    x[k] = std::sin(2 * kPi * 0.7 * t) + 0.3 * std::cos(2 * kPi * 1.9 * t);
  }
  const SampledSignal3 s(x, x, x, 100);
  const auto r = integrate(differentiate(s), false);
  std::vector<double> expect(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) expect[k] = x[k] - x[0];
  EXPECT_LE(rms(vec(r.x()), expect), 1e-2);
}

TEST(Integrate, DetrendLeavesNoLine) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  std::vector<double> x(211), y(211), z(211);
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = n01(rng) + 1.0;
    y[k] = n01(rng);
    z[k] = std::sin(0.1 * static_cast<double>(k));
  }
  const auto r = integrate(SampledSignal3(x, y, z, 100), true);
  for (std::size_t a = 0; a < 3; ++a) {
    const auto v = r.axis(a);
    const double n = static_cast<double>(v.size());
    double st = 0, sv = 0, stt = 0, stv = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double t = static_cast<double>(k);
      st += t;
      sv += v[k];
      stt += t * t;
      stv += t * v[k];
    }
    const double slope = (n * stv - st * sv) / (n * stt - st * st);
    const double intercept = (sv - slope * st) / n;
    EXPECT_NEAR(slope, 0.0, 1e-9);
    EXPECT_NEAR(intercept, 0.0, 1e-9);
  }
}

TEST(FeatureVector, Layout) {
  const auto s = SampledSignal3::constant(100, 50, 1, 2, 3);
  const auto f = to_feature_vector(s, ChannelKind::Velocity);
  EXPECT_EQ(f.kind, ChannelKind::Velocity);
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_EQ(f.values[i], 1.0);
    EXPECT_EQ(f.values[100 + i], 2.0);
    EXPECT_EQ(f.values[200 + i], 3.0);
  }
}

TEST(FeatureVector, SliceBackIsIdentity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4, 4);
  std::vector<double> x(100), y(100), z(100);
  for (std::size_t k = 0; k < 100; ++k) {
    x[k] = u(rng);
    y[k] = u(rng);
    z[k] = u(rng);
  }
  const SampledSignal3 s(x, y, z, 50);
  EXPECT_EQ(to_feature_vector(s, ChannelKind::Trajectory).to_signal(50), s);
}

TEST(FeatureVector, TwoSecondCaptureGives300Values) {
  const auto f = to_feature_vector(resample_fourier(tone3(200, 100, 1), kSamplesPerAxis), ChannelKind::Acceleration);
  EXPECT_EQ(f.values.size(), 300u);
}

TEST(FeatureVector, WrongLength) {
  try {
    to_feature_vector(SampledSignal3::constant(99, 100, 0, 0, 0), ChannelKind::Acceleration);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongLength);
  }
}

TEST(SignalProperties, LowpassAndResampleCommuteOnBandLimitedInput) {
  // Gaussian-windowed tones: spectrum well below 5 Hz and negligible energy at
  // the record edges, so boundary handling does not enter the comparison.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<std::vector<double>, 3> ax;
    for (auto& x : ax) {
      const double f = 0.5 + 3.0 * u(rng);
      const double ph = 2 * kPi * u(rng);
      const double center = 1.3 + 0.4 * u(rng);
      const double width = 0.25 + 0.1 * u(rng);
      x.resize(300);
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double t = static_cast<double>(k) / 100.0;
        x[k] = std::exp(-std::pow((t - center) / width, 2)) * std::sin(2 * kPi * f * t + ph);
      }
    }
    const SampledSignal3 s(ax[0], ax[1], ax[2], 100);
    const FilterSpec spec{10.0, 4, true};
    const auto a = resample_fourier(lowpass(s, spec), 100);
    const auto b = lowpass(resample_fourier(s, 100), spec);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_LE(rms(vec(a.axis(k)), vec(b.axis(k))), 1e-3);
  }
}
