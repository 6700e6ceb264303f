#include "chromatex/tuning.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "chromatex/error.hpp"
#include "chromatex/metrics.hpp"
#include "chromatex/parallel.hpp"

namespace chromatex {

std::vector<std::vector<std::string>> subject_disjoint_folds(std::span<const Sample> samples,
                                                             int k, std::uint64_t seed) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "fold count must be at least 1");
  std::set<std::string> unique;
  for (const auto& s : samples) unique.insert(s.subject_id);
  if (unique.size() < static_cast<std::size_t>(k)) {
    fail(ErrorCode::NotEnoughSubjects, std::to_string(unique.size()) + " subjects cannot fill " +
                                           std::to_string(k) + " folds");
  }
  std::vector<std::string> subjects(unique.begin(), unique.end());
  std::mt19937_64 rng(seed);
  std::shuffle(subjects.begin(), subjects.end(), rng);

  std::vector<std::vector<std::string>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    folds[i % folds.size()].push_back(subjects[i]);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

namespace {

struct Problem {
  std::vector<std::span<const double>> xs;
  std::vector<int> labels;
};

Problem make_problem(std::span<const Sample> a, std::span<const Sample> b = {}) {
  Problem p;
  for (auto part : {a, b}) {
    for (const auto& s : part) {
      p.xs.emplace_back(s.descriptor.values);
      p.labels.push_back(label_sign(s.label));
    }
  }
  if (!p.xs.empty()) {
    const Descriptor& first = a.front().descriptor;
    for (auto part : {a, b}) {
      for (const auto& s : part) {
        if (!same_stamp(s.descriptor, first) || s.descriptor.size() != first.size()) {
          fail(ErrorCode::DimMismatch, "tuning samples have mixed descriptor layouts");
        }
      }
    }
  }
  return p;
}

void require_both_classes(std::span<const int> labels, std::span<const std::size_t> idx,
                          const char* what) {
  bool pos = false, neg = false;
  for (auto i : idx) (labels[i] > 0 ? pos : neg) = true;
  if (!pos || !neg) {
    fail(ErrorCode::DegenerateTrainingSet, std::string(what) + " lacks one of the two classes");
  }
}

std::vector<GridPoint> grid_points(KernelKind kind, const TrainConfig& cfg) {
  std::vector<GridPoint> pts;
  for (double c : cfg.c_grid) {
    if (kind == KernelKind::Linear) {
      pts.push_back(GridPoint{c, 0.0, 0.0});
    } else {
      for (double g : cfg.gamma_grid) pts.push_back(GridPoint{c, g, 0.0});
    }
  }
  return pts;
}

// Trains on `train` rows of K and scores the `test` rows.
void fit_and_score(const KernelMatrix& k, std::span<const int> labels,
                   std::span<const std::size_t> train, std::span<const std::size_t> test,
                   double C, const TrainConfig& cfg, ScoreSet& out) {
  std::vector<int> sub_labels;
  sub_labels.reserve(train.size());
  for (auto i : train) sub_labels.push_back(labels[i]);
  const DualSolution sol =
      solve_dual(k.subset(train), sub_labels, C, cfg.tolerance, cfg.max_iterations);
  for (auto h : test) {
    double score = sol.bias;
    for (std::size_t a = 0; a < train.size(); ++a) {
      if (sol.alpha[a] > 0.0) score += sol.alpha[a] * sub_labels[a] * k(train[a], h);
    }
    (labels[h] > 0 ? out.genuine : out.attack).push_back(score);
  }
}

std::size_t select_best(const std::vector<GridPoint>& pts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto key = [&](const GridPoint& p) { return std::tuple(p.eer, p.C, p.gamma); };
    if (key(pts[i]) < key(pts[best])) best = i;
  }
  return best;
}

}  // namespace

TuningResult grid_search(std::span<const Sample> samples, KernelKind kind,
                         const TrainConfig& cfg, int k, std::uint64_t seed, int jobs) {
  cfg.validate();
  if (k < 2) fail(ErrorCode::InvalidArgument, "cross-validation needs at least 2 folds");
  if (samples.empty()) fail(ErrorCode::DegenerateTrainingSet, "no tuning samples");
  const auto folds = subject_disjoint_folds(samples, k, seed);
  std::map<std::string, std::size_t> fold_of;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (const auto& s : folds[f]) fold_of[s] = f;
  }
  std::vector<std::vector<std::size_t>> train_idx(folds.size()), test_idx(folds.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t f = fold_of.at(samples[i].subject_id);
    for (std::size_t g = 0; g < folds.size(); ++g) (g == f ? test_idx : train_idx)[g].push_back(i);
  }

  const Problem p = make_problem(samples);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    require_both_classes(p.labels, train_idx[f], "cross-validation training fold");
    require_both_classes(p.labels, test_idx[f], "cross-validation held-out fold");
  }
  const auto base = pairwise_base(p.xs, kind);

  auto pts = grid_points(kind, cfg);
  std::vector<ScoreSet> pooled(pts.size());
  parallel_for(pts.size(), jobs, [&](std::size_t g) {
    const KernelMatrix km = kernel_from_base(base, p.xs.size(), KernelSpec{kind, pts[g].gamma});
    double sum = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      ScoreSet fold_scores;
      fit_and_score(km, p.labels, train_idx[f], test_idx[f], pts[g].C, cfg, fold_scores);
      sum += eer(fold_scores).eer;
      pooled[g].genuine.insert(pooled[g].genuine.end(), fold_scores.genuine.begin(),
                               fold_scores.genuine.end());
      pooled[g].attack.insert(pooled[g].attack.end(), fold_scores.attack.begin(),
                              fold_scores.attack.end());
    }
    pts[g].eer = sum / static_cast<double>(folds.size());
  });

  const std::size_t best = select_best(pts);
  TuningResult out;
  out.C = pts[best].C;
  out.gamma = pts[best].gamma;
  out.eer = pts[best].eer;
  out.threshold = eer(pooled[best]).threshold;
  out.grid = std::move(pts);
  return out;
}

TuningResult grid_search_dev(std::span<const Sample> train, std::span<const Sample> dev,
                             KernelKind kind, const TrainConfig& cfg, int jobs) {
  cfg.validate();
  if (train.empty() || dev.empty()) {
    fail(ErrorCode::DegenerateTrainingSet, "dev tuning needs non-empty train and dev sets");
  }
  const Problem p = make_problem(train, dev);
  std::vector<std::size_t> train_idx(train.size()), dev_idx(dev.size());
  for (std::size_t i = 0; i < train.size(); ++i) train_idx[i] = i;
  for (std::size_t i = 0; i < dev.size(); ++i) dev_idx[i] = train.size() + i;
  require_both_classes(p.labels, train_idx, "training set");
  require_both_classes(p.labels, dev_idx, "development set");
  const auto base = pairwise_base(p.xs, kind);

  auto pts = grid_points(kind, cfg);
  std::vector<EerPoint> results(pts.size());
  parallel_for(pts.size(), jobs, [&](std::size_t g) {
    const KernelMatrix km = kernel_from_base(base, p.xs.size(), KernelSpec{kind, pts[g].gamma});
    ScoreSet scores;
    fit_and_score(km, p.labels, train_idx, dev_idx, pts[g].C, cfg, scores);
    results[g] = eer(scores);
    pts[g].eer = results[g].eer;
  });

  const std::size_t best = select_best(pts);
  TuningResult out;
  out.C = pts[best].C;
  out.gamma = pts[best].gamma;
  out.eer = pts[best].eer;
  out.threshold = results[best].threshold;
  out.grid = std::move(pts);
  return out;
}

}  // namespace chromatex
