#include <benchmark/benchmark.h>

#include <random>

#include "chromatex/svm.hpp"

using namespace chromatex;

namespace {

// Two overlapping histogram-like classes of dimension 177.
std::vector<Sample> problem(int n) {
  std::mt19937_64 rng(7);
  std::gamma_distribution<double> g(2.0, 1.0);
  std::vector<Sample> out;
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.label = i % 2 ? Label::Genuine : Label::Attack;
    s.subject_id = "s" + std::to_string(i / 8);
    s.video_id = s.subject_id + "_" + std::to_string(i);
    s.descriptor.layout = {Segment{ColorSpace::YCbCr, 0, 59}, Segment{ColorSpace::YCbCr, 1, 59},
                           Segment{ColorSpace::YCbCr, 2, 59}};
    double sum = 0;
    for (int d = 0; d < 177; ++d) {
      const double v = g(rng) * (s.label == Label::Genuine && d % 7 == 0 ? 1.3 : 1.0);
      s.descriptor.values.push_back(v);
      sum += v;
    }
    for (double& v : s.descriptor.values) v /= sum;
    out.push_back(std::move(s));
  }
  return out;
}

void BM_SvmTrain(benchmark::State& state, KernelKind kind) {
  const auto samples = problem(static_cast<int>(state.range(0)));
  const KernelSpec kernel{kind, 4.0};
  for (auto _ : state) benchmark::DoNotOptimize(svm_train(samples, kernel, 10.0, TrainConfig{}));
}
BENCHMARK_CAPTURE(BM_SvmTrain, rbf, KernelKind::RBF)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SvmTrain, linear, KernelKind::Linear)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_DecisionValue(benchmark::State& state) {
  const auto samples = problem(400);
  const Model m = svm_train(samples, KernelSpec{KernelKind::RBF, 4.0}, 10.0, TrainConfig{});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decision_value(m, samples[i].descriptor));
    i = (i + 1) % samples.size();
  }
}
BENCHMARK(BM_DecisionValue);

}  // namespace
