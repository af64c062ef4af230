#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "airdigit/dataset.hpp"
#include "airdigit/mlp.hpp"
#include "airdigit/robot.hpp"
#include "airdigit/signal.hpp"
#include "airdigit/synth.hpp"

using namespace airdigit;

namespace {

SampledSignal3 noise_signal(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  std::vector<double> axes[3];
  for (auto& a : axes) {
    a.resize(n);
    for (double& v : a) v = n01(rng);
  }
  return SampledSignal3(axes[0], axes[1], axes[2], 100.0);
}

void BM_ResampleFourier(benchmark::State& state) {
  const auto s = noise_signal(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(resample_fourier(s, kSamplesPerAxis));
}
BENCHMARK(BM_ResampleFourier)->Arg(200)->Arg(300)->Arg(401);

void BM_LowpassZeroPhase(benchmark::State& state) {
  const auto s = noise_signal(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lowpass(s, FilterSpec{}));
}
BENCHMARK(BM_LowpassZeroPhase)->Arg(300);

void BM_Preprocess(benchmark::State& state) {
  const auto s = noise_signal(300);
  for (auto _ : state) {
    benchmark::DoNotOptimize(to_feature_vector(resample_fourier(lowpass(s, FilterSpec{}), kSamplesPerAxis),
                                               ChannelKind::Velocity));
  }
}
BENCHMARK(BM_Preprocess);

void BM_ForwardKinematics(benchmark::State& state) {
  const auto m = irb120_model();
  Joints q;
  q << 0.1, 0.2, -0.3, 0.4, 0.5, 0.6;
  for (auto _ : state) benchmark::DoNotOptimize(fk(m, q));
}
BENCHMARK(BM_ForwardKinematics);

void BM_InverseKinematics(benchmark::State& state) {
  const auto m = irb120_model();
  Joints q;
  q << 0.1, 0.2, -0.3, 0.4, 0.5, 0.6;
  const Pose target = fk(m, q);
  Joints seed = q;
  seed.array() += 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(ik(m, target, seed));
}
BENCHMARK(BM_InverseKinematics);

void BM_RobotSample(benchmark::State& state) {
  const auto m = irb120_model();
  const GenerationConfig cfg;
  const auto& tmpl = cfg.templates[8];
  for (auto _ : state) benchmark::DoNotOptimize(make_robot_sample(m, tmpl, AugmentationParams{}, 0, 42, cfg));
}
BENCHMARK(BM_RobotSample)->Unit(benchmark::kMillisecond);

void BM_TrainingEpochForwardBackward(benchmark::State& state) {
  const auto m = init_model(64, 1);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(kFeatureLength), 648);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n01(rng);
  std::vector<int> y(648);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 10);
  for (auto _ : state) {
    Gradient g;
    benchmark::DoNotOptimize(cross_entropy(m, x, y, &g));
  }
}
BENCHMARK(BM_TrainingEpochForwardBackward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
