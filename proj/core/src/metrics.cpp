#include "chromatex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chromatex/error.hpp"

namespace chromatex {

namespace {

void require_scores(const ScoreSet& s) {
  if (s.genuine.empty() || s.attack.empty()) {
    fail(ErrorCode::EmptyScores, "score set needs at least one genuine and one attack score");
  }
}

struct Sorted {
  std::vector<double> genuine;
  std::vector<double> attack;

  explicit Sorted(const ScoreSet& s) : genuine(s.genuine), attack(s.attack) {
    std::sort(genuine.begin(), genuine.end());
    std::sort(attack.begin(), attack.end());
  }

  ErrorRates at(double t) const {
    const auto accepted_attacks =
        attack.end() - std::lower_bound(attack.begin(), attack.end(), t);
    const auto rejected_genuine =
        std::lower_bound(genuine.begin(), genuine.end(), t) - genuine.begin();
    return {static_cast<double>(accepted_attacks) / static_cast<double>(attack.size()),
            static_cast<double>(rejected_genuine) / static_cast<double>(genuine.size())};
  }
};

std::vector<double> candidate_thresholds(const ScoreSet& s) {
  std::vector<double> pooled = s.genuine;
  pooled.insert(pooled.end(), s.attack.begin(), s.attack.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  std::vector<double> out;
  out.reserve(pooled.size() + 1);
  out.push_back(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 1; i < pooled.size(); ++i) {
    out.push_back(pooled[i - 1] + (pooled[i] - pooled[i - 1]) / 2.0);
  }
  out.push_back(std::numeric_limits<double>::infinity());
  return out;
}

}  // namespace

ErrorRates far_frr(const ScoreSet& scores, double threshold) {
  require_scores(scores);
  std::size_t accepted = 0, rejected = 0;
  for (double a : scores.attack) accepted += a >= threshold;
  for (double g : scores.genuine) rejected += g < threshold;
  return {static_cast<double>(accepted) / static_cast<double>(scores.attack.size()),
          static_cast<double>(rejected) / static_cast<double>(scores.genuine.size())};
}

EerPoint eer(const ScoreSet& scores) {
  require_scores(scores);
  const Sorted sorted(scores);
  EerPoint best;
  double best_gap = std::numeric_limits<double>::infinity();
  double best_sum = std::numeric_limits<double>::infinity();
  // Candidates ascend, so strict comparisons keep the lowest threshold on ties.
  for (double t : candidate_thresholds(scores)) {
    const ErrorRates r = sorted.at(t);
    const double gap = std::abs(r.far - r.frr);
    const double sum = r.far + r.frr;
    if (gap < best_gap || (gap == best_gap && sum < best_sum)) {
      best_gap = gap;
      best_sum = sum;
      best = EerPoint{sum / 2.0, t, r.far, r.frr};
    }
  }
  return best;
}

double hter(const ScoreSet& scores, double threshold) {
  const ErrorRates r = far_frr(scores, threshold);
  return (r.far + r.frr) / 2.0;
}

std::vector<RocPoint> roc_points(const ScoreSet& scores) {
  require_scores(scores);
  const Sorted sorted(scores);
  std::vector<RocPoint> out;
  for (double t : candidate_thresholds(scores)) {
    const ErrorRates r = sorted.at(t);
    out.push_back(RocPoint{t, r.far, r.frr});
  }
  return out;
}

}  // namespace chromatex
