#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "chromatex/error.hpp"
#include "chromatex/svm.hpp"
#include "chromatex/tuning.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace chromatex;
using fixtures::sample;

namespace {

KernelSpec linear() { return KernelSpec{KernelKind::Linear, 0.0}; }

/// Two subjects' worth of samples per subject id, both classes, separable
/// along the first coordinate.
std::vector<Sample> separable_subjects(int n_subjects, std::uint64_t seed, double gap = 2.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<Sample> out;
  for (int s = 0; s < n_subjects; ++s) {
    const std::string id = "s" + std::to_string(s);
    for (int y : {1, -1}) {
      for (int rep = 0; rep < 2; ++rep) {
        out.push_back(sample({y * gap + noise(rng), noise(rng)}, y, id,
                             id + (y > 0 ? "_g" : "_a") + std::to_string(rep)));
      }
    }
  }
  return out;
}

}  // namespace

TEST(KernelTest, Values) {
  const std::vector<double> a{1, 2}, b{3, -1};
  EXPECT_DOUBLE_EQ(linear()(a, b), 1.0);
  EXPECT_DOUBLE_EQ((KernelSpec{KernelKind::RBF, 0.5})(a, b), std::exp(-0.5 * 13));
  EXPECT_EQ(parse_kernel("rbf"), KernelKind::RBF);
  EXPECT_THROW(parse_kernel("poly"), Error);
  EXPECT_THROW((KernelSpec{KernelKind::RBF, 0.0}).validate(), Error);
}

TEST(SvmTest, SymmetricPair) {
  const std::vector<Sample> s{sample({-1.0}, -1), sample({1.0}, 1)};
  const Model m = svm_train(s, linear(), 10.0, TrainConfig{});
  EXPECT_GT(decision_value(m, s[1].descriptor), 0.0);
  EXPECT_LT(decision_value(m, s[0].descriptor), 0.0);
  EXPECT_NEAR(decision_value(m, fixtures::vector_descriptor({0.0})), 0.0, 1e-3);
  // Hard-margin optimum: w = 1, b = 0, alphas 0.5.
  ASSERT_EQ(m.support.size(), 2u);
  for (const auto& sv : m.support) EXPECT_NEAR(sv.alpha, 0.5, 1e-6);
}

TEST(SvmTest, XorWithRbf) {
  std::vector<Sample> s;
  for (int i = 0; i < 4; ++i) {
    const double x = (i & 1) ? 1.0 : -1.0, y = (i & 2) ? 1.0 : -1.0;
    s.push_back(sample({x, y}, x * y > 0 ? 1 : -1));
  }
  const Model m = svm_train(s, KernelSpec{KernelKind::RBF, 1.0}, 10.0, TrainConfig{});
  for (const auto& x : s) {
    EXPECT_EQ(decision_value(m, x.descriptor) > 0, x.label == Label::Genuine);
  }
}

TEST(SvmTest, SeparableBlobsHaveNoTrainingErrors) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.4);
  std::vector<Sample> s;
  for (int i = 0; i < 100; ++i) {
    const int y = i < 50 ? 1 : -1;
    s.push_back(sample({y * 2.5 + noise(rng), noise(rng)}, y));
  }
  const Model m = svm_train(s, linear(), 100.0, TrainConfig{});
  for (const auto& x : s) EXPECT_EQ(decision_value(m, x.descriptor) > 0, x.label == Label::Genuine);
}

TEST(SvmTest, LinearWeightVectorMatchesKernelExpansion) {
  const auto p = fixtures::random_problem(3);
  const Model m = svm_train(p.samples, linear(), 1.0, TrainConfig{});
  const auto w = m.weight_vector();
  ASSERT_TRUE(w.has_value());
  std::mt19937_64 rng(5);
  std::normal_distribution<double> u;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(p.xs[0].size());
    for (auto& v : x) v = u(rng);
    const double explicit_score = std::inner_product(w->begin(), w->end(), x.begin(), m.bias);
    EXPECT_NEAR(decision_value(m, std::span<const double>(x)), explicit_score, 1e-9);
  }
  EXPECT_FALSE(svm_train(p.samples, KernelSpec{KernelKind::RBF, 1.0}, 1.0, TrainConfig{})
                   .weight_vector()
                   .has_value());
}

TEST(SvmTest, DualFeasibilityAndKkt) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = fixtures::random_problem(seed);
    std::vector<std::span<const double>> xs(p.xs.begin(), p.xs.end());
    const auto k = kernel_from_base(pairwise_base(xs, p.kernel.kind), xs.size(), p.kernel);
    const TrainConfig cfg;
    const auto sol = solve_dual(k, p.ys, p.C, cfg.tolerance, cfg.max_iterations);
    ASSERT_TRUE(sol.converged);
    double balance = 0;
    for (std::size_t i = 0; i < sol.alpha.size(); ++i) {
      EXPECT_GE(sol.alpha[i], 0.0);
      EXPECT_LE(sol.alpha[i], p.C);
      balance += sol.alpha[i] * p.ys[i];
    }
    EXPECT_LE(std::abs(balance), 1e-6);
    EXPECT_LT(sol.kkt_gap, cfg.tolerance);
    // Per-point KKT conditions on y f(x), allowing the solver tolerance.
    for (std::size_t i = 0; i < sol.alpha.size(); ++i) {
      double f = sol.bias;
      for (std::size_t j = 0; j < sol.alpha.size(); ++j) f += sol.alpha[j] * p.ys[j] * k(i, j);
      const double margin = p.ys[i] * f;
      if (sol.alpha[i] <= 0.0) EXPECT_GE(margin, 1.0 - cfg.tolerance);
      else if (sol.alpha[i] >= p.C) EXPECT_LE(margin, 1.0 + cfg.tolerance);
      else EXPECT_NEAR(margin, 1.0, cfg.tolerance);
    }
  }
}

TEST(SvmTest, DecisionValuesMatchBruteForceDual) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = fixtures::random_problem(seed);
    const Model m = svm_train(p.samples, p.kernel, p.C, TrainConfig{});
    const auto ref = oracle::solve_dual(fixtures::gram(p), p.ys, p.C);
    std::mt19937_64 rng(seed + 100);
    std::normal_distribution<double> u;
    std::vector<std::vector<double>> queries = p.xs;
    for (int q = 0; q < 10; ++q) {
      std::vector<double> x(p.xs[0].size());
      for (auto& v : x) v = u(rng);
      queries.push_back(x);
    }
    for (const auto& x : queries) {
      std::vector<double> row;
      for (const auto& xi : p.xs) row.push_back(fixtures::kernel_value(p, xi, x));
      const double want = static_cast<double>(oracle::decision(ref, p.ys, row));
      EXPECT_NEAR(decision_value(m, std::span<const double>(x)), want, 1e-3) << "seed " << seed;
    }
  }
}

TEST(SvmTest, RejectsDegenerateInput) {
  const std::vector<Sample> one_class{sample({1.0}, 1), sample({2.0}, 1)};
  EXPECT_THROW(svm_train(one_class, linear(), 1.0, TrainConfig{}), Error);
  const std::vector<Sample> mixed{sample({1.0}, 1), sample({2.0, 3.0}, -1)};
  try {
    svm_train(mixed, linear(), 1.0, TrainConfig{});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
  const Model m = svm_train(std::vector<Sample>{sample({-1.0}, -1), sample({1.0}, 1)}, linear(), 1.0, TrainConfig{});
  EXPECT_THROW(decision_value(m, fixtures::vector_descriptor({1.0, 2.0})), Error);
}

TEST(SvmTest, ModelSerializationRoundTrips) {
  const auto p = fixtures::random_problem(11);
  const Model m = svm_train(p.samples, KernelSpec{KernelKind::RBF, 0.5}, 10.0, TrainConfig{});
  std::stringstream buf;
  write_model(buf, m);
  const Model back = read_model(buf);
  EXPECT_EQ(back.kernel, m.kernel);
  EXPECT_EQ(back.C, m.C);
  EXPECT_EQ(back.bias, m.bias);
  EXPECT_EQ(back.dim, m.dim);
  EXPECT_EQ(back.layout, m.layout);
  ASSERT_EQ(back.support.size(), m.support.size());
  for (const auto& x : p.xs) {
    EXPECT_EQ(decision_value(back, std::span<const double>(x)), decision_value(m, std::span<const double>(x)));
  }
  std::stringstream truncated(buf.str().substr(0, 20));
  EXPECT_THROW(read_model(truncated), Error);
}

TEST(FoldsTest, TwentySubjectsFourFolds) {
  const auto s = separable_subjects(20, 1);
  const auto folds = subject_disjoint_folds(s, 4, 9);
  ASSERT_EQ(folds.size(), 4u);
  std::set<std::string> seen;
  for (const auto& f : folds) {
    EXPECT_EQ(f.size(), 5u);
    for (const auto& id : f) EXPECT_TRUE(seen.insert(id).second) << id << " in two folds";
  }
  EXPECT_EQ(seen.size(), 20u);
}

TEST(FoldsTest, SingleFoldHoldsEverything) {
  const auto s = separable_subjects(7, 1);
  const auto folds = subject_disjoint_folds(s, 1, 3);
  ASSERT_EQ(folds.size(), 1u);
  EXPECT_EQ(folds[0].size(), 7u);
}

TEST(FoldsTest, DeterministicPerSeed) {
  const auto s = separable_subjects(20, 1);
  EXPECT_EQ(subject_disjoint_folds(s, 4, 42), subject_disjoint_folds(s, 4, 42));
  EXPECT_NE(subject_disjoint_folds(s, 4, 42), subject_disjoint_folds(s, 4, 43));
}

TEST(FoldsTest, TooFewSubjects) {
  const auto s = separable_subjects(3, 1);
  try {
    subject_disjoint_folds(s, 4, 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotEnoughSubjects);
  }
}

TEST(GridSearchTest, SinglePointIsReturned) {
  const auto s = separable_subjects(8, 2, 0.3);
  TrainConfig cfg;
  cfg.c_grid = {3.0};
  cfg.gamma_grid = {0.25};
  const auto r = grid_search(s, KernelKind::RBF, cfg, 4, 1);
  EXPECT_EQ(r.C, 3.0);
  EXPECT_EQ(r.gamma, 0.25);
  ASSERT_EQ(r.grid.size(), 1u);
}

TEST(GridSearchTest, SeparableDataReachesZeroEerAndTiesPickSmallerC) {
  const auto s = separable_subjects(8, 3);
  TrainConfig cfg;
  cfg.c_grid = {10.0, 1.0, 100.0};
  const auto r = grid_search(s, KernelKind::Linear, cfg, 4, 1);
  EXPECT_EQ(r.eer, 0.0);
  for (const auto& g : r.grid) EXPECT_EQ(g.eer, 0.0);
  EXPECT_EQ(r.C, 1.0);
  EXPECT_EQ(r.gamma, 0.0);
}

TEST(GridSearchTest, DeterministicAcrossJobCounts) {
  const auto s = separable_subjects(8, 4, 0.2);
  TrainConfig cfg;
  cfg.c_grid = {0.1, 1.0, 10.0};
  cfg.gamma_grid = {0.5, 2.0};
  const auto a = grid_search(s, KernelKind::RBF, cfg, 4, 5, 1);
  const auto b = grid_search(s, KernelKind::RBF, cfg, 4, 5, 3);
  EXPECT_EQ(a.C, b.C);
  EXPECT_EQ(a.gamma, b.gamma);
  EXPECT_EQ(a.eer, b.eer);
  EXPECT_EQ(a.threshold, b.threshold);
}

TEST(GridSearchTest, DevSetVariant) {
  const auto train = separable_subjects(4, 5);
  const auto dev = separable_subjects(3, 6);
  TrainConfig cfg;
  cfg.c_grid = {1.0, 10.0};
  const auto r = grid_search_dev(train, dev, KernelKind::Linear, cfg);
  EXPECT_EQ(r.eer, 0.0);
  EXPECT_EQ(r.C, 1.0);
}

TEST(GridSearchTest, RejectsFoldWithoutBothClasses) {
  std::vector<Sample> s;
  // One subject per fold, so every held-out fold has a single class.
  for (int i = 0; i < 3; ++i) s.push_back(sample({double(i)}, i < 2 ? 1 : -1, "s" + std::to_string(i)));
  try {
    grid_search(s, KernelKind::Linear, TrainConfig{}, 3, 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateTrainingSet);
  }
}
