#pragma once

// Small synthetic datasets shared by the unit and acceptance tests.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "chromatex/sample.hpp"
#include "chromatex/svm.hpp"

namespace fixtures {

inline chromatex::Descriptor vector_descriptor(std::vector<double> values) {
  chromatex::Descriptor d;
  d.layout = {chromatex::Segment{chromatex::ColorSpace::Gray, 0, static_cast<int>(values.size())}};
  d.values = std::move(values);
  return d;
}

inline chromatex::Sample sample(std::vector<double> x, int label, std::string subject = "s0",
                                std::string video = "") {
  chromatex::Sample s;
  s.descriptor = vector_descriptor(std::move(x));
  s.label = label > 0 ? chromatex::Label::Genuine : chromatex::Label::Attack;
  s.subject_id = std::move(subject);
  s.video_id = video.empty() ? s.subject_id + "_v" : std::move(video);
  return s;
}

/// Two overlapping Gaussian classes in `dim` dimensions with both labels present.
struct RandomProblem {
  std::vector<chromatex::Sample> samples;
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  chromatex::KernelSpec kernel;
  double C = 1.0;
};

inline RandomProblem random_problem(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(6, 30), dims(1, 5), coin(0, 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double c_choices[] = {0.5, 1.0, 10.0, 100.0};
  const double gamma_choices[] = {0.1, 0.5, 1.0, 2.0};
  std::uniform_int_distribution<int> pick(0, 3);

  RandomProblem p;
  const int n = size(rng), d = dims(rng);
  const double shift = 0.3 + 0.5 * (seed % 3);
  for (int i = 0; i < n; ++i) {
    const int y = i < 2 ? (i == 0 ? 1 : -1) : (coin(rng) ? 1 : -1);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (auto& v : x) v = noise(rng) + y * shift;
    p.xs.push_back(x);
    p.ys.push_back(y);
    p.samples.push_back(sample(x, y, "s" + std::to_string(i)));
  }
  p.kernel = coin(rng) ? chromatex::KernelSpec{chromatex::KernelKind::RBF, gamma_choices[pick(rng)]}
                       : chromatex::KernelSpec{chromatex::KernelKind::Linear, 0.0};
  p.C = c_choices[pick(rng)];
  return p;
}

/// Kernel value computed from the textbook formulas, independent of the library.
inline double kernel_value(const RandomProblem& p, const std::vector<double>& a,
                           const std::vector<double>& b) {
  double dot = 0, dist = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    dist += (a[i] - b[i]) * (a[i] - b[i]);
  }
  return p.kernel.kind == chromatex::KernelKind::Linear ? dot : std::exp(-p.kernel.gamma * dist);
}

inline std::vector<std::vector<double>> gram(const RandomProblem& p) {
  std::vector<std::vector<double>> k(p.xs.size(), std::vector<double>(p.xs.size()));
  for (std::size_t i = 0; i < p.xs.size(); ++i)
    for (std::size_t j = 0; j < p.xs.size(); ++j) k[i][j] = kernel_value(p, p.xs[i], p.xs[j]);
  return k;
}

}  // namespace fixtures
