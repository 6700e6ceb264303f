#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chromatex/sample.hpp"
#include "chromatex/svm.hpp"

namespace chromatex {

/// Partitions the distinct subject ids into k folds. Subjects are sorted,
/// shuffled with the seed and dealt round-robin, so fold sizes differ by at
/// most one and the result depends only on (subject set, k, seed).
std::vector<std::vector<std::string>> subject_disjoint_folds(std::span<const Sample> samples,
                                                             int k, std::uint64_t seed);

struct GridPoint {
  double C = 0.0;
  double gamma = 0.0;  // 0 for the linear kernel
  double eer = 0.0;    // mean held-out EER across folds, or dev EER
};

struct TuningResult {
  double C = 0.0;
  double gamma = 0.0;
  double eer = 0.0;        // tuning EER of the chosen point
  double threshold = 0.0;  // EER threshold on the pooled held-out (or dev) scores
  std::vector<GridPoint> grid;

  KernelSpec kernel(KernelKind kind) const {
    return KernelSpec{kind, kind == KernelKind::RBF ? gamma : 0.0};
  }
};

/// k-fold subject-disjoint cross-validation over the C (and, for RBF,
/// gamma) grid. Picks the lowest mean fold EER; ties go to the smaller C,
/// then the smaller gamma.
TuningResult grid_search(std::span<const Sample> samples, KernelKind kind,
                         const TrainConfig& cfg, int k, std::uint64_t seed, int jobs = 1);

/// Same selection rule, but every grid point is trained on `train` and
/// scored on a separate development set.
TuningResult grid_search_dev(std::span<const Sample> train, std::span<const Sample> dev,
                             KernelKind kind, const TrainConfig& cfg, int jobs = 1);

}  // namespace chromatex
