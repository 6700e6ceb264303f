#pragma once

#include <string>
#include <vector>

namespace chromatex {

/// Classifier scores split by ground truth. Higher scores lean genuine; a
/// sample is accepted iff score >= threshold.
struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> attack;
};

struct ErrorRates {
  double far = 0.0;  // attacks accepted
  double frr = 0.0;  // genuine rejected
};

ErrorRates far_frr(const ScoreSet& scores, double threshold);

struct EerPoint {
  double eer = 0.0;  // (FAR + FRR) / 2 at the chosen threshold
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

/// Candidate thresholds are -inf, every midpoint between adjacent distinct
/// pooled scores, and +inf. The chosen one minimizes |FAR - FRR|; ties go
/// to the smaller FAR + FRR, then the lower threshold.
EerPoint eer(const ScoreSet& scores);

/// Half total error rate at a threshold fixed elsewhere (development set
/// or cross-validation), never one tuned on `scores`.
double hter(const ScoreSet& scores, double threshold);

struct RocPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

/// FAR/FRR at every EER candidate threshold, ascending.
std::vector<RocPoint> roc_points(const ScoreSet& scores);

}  // namespace chromatex
