#include <benchmark/benchmark.h>

#include <random>

#include "chromatex/descriptor.hpp"
#include "chromatex/lbp.hpp"
#include "chromatex/synth.hpp"

using namespace chromatex;

namespace {

Image random_rgb(int size) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> u(0, 255);
  Image img(size, size, ColorSpace::RGB);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(u(rng));
  return img;
}

void BM_LbpCounts(benchmark::State& state) {
  const Image gray = rgb_to_gray(random_rgb(64));
  LbpParams params;
  params.sampling = state.range(0) ? Sampling::Interpolated : Sampling::IntegerNeighborhood;
  for (auto _ : state) benchmark::DoNotOptimize(lbp_counts(gray.channel(0), params));
  state.SetItemsProcessed(state.iterations() * 62 * 62);
}
BENCHMARK(BM_LbpCounts)->Arg(0)->Arg(1);

void BM_ExtractDescriptor(benchmark::State& state, const char* spec) {
  const Image face = synth_genuine_face(0, 0, SynthParams{});
  const DescriptorSpec parsed = DescriptorSpec::parse(spec);
  for (auto _ : state) benchmark::DoNotOptimize(extract_descriptor(face, parsed, LbpParams{}));
}
BENCHMARK_CAPTURE(BM_ExtractDescriptor, gray, "gray");
BENCHMARK_CAPTURE(BM_ExtractDescriptor, ycbcr, "ycbcr");
BENCHMARK_CAPTURE(BM_ExtractDescriptor, ycbcr_hsv, "ycbcr+hsv");

void BM_NormalizeFace(benchmark::State& state) {
  const Image frame = random_rgb(72);
  for (auto _ : state) benchmark::DoNotOptimize(normalize_face(frame, FaceBox{4, 4, 64, 64}));
}
BENCHMARK(BM_NormalizeFace);

}  // namespace
