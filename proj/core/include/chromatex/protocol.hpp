#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chromatex/dataset.hpp"
#include "chromatex/metrics.hpp"
#include "chromatex/svm.hpp"
#include "chromatex/tuning.hpp"

namespace chromatex {

/// The seven evaluation scenarios: three capture qualities, three attack
/// kinds (all genuine videos plus one attack kind) and everything.
const std::vector<std::string>& all_scenarios();
bool is_known_scenario(const std::string& name);
bool in_scenario(const Sample& s, const std::string& scenario);

struct ProtocolConfig {
  std::filesystem::path manifest;  // one manifest; videos carry train/dev/test splits
  std::vector<DescriptorSpec> descriptors;
  LbpParams lbp;
  WindowSpec window;
  KernelKind kernel = KernelKind::RBF;
  TrainConfig train;
  int folds = 4;
  std::uint64_t seed = 1;
  std::vector<std::string> scenarios = all_scenarios();
  int jobs = 1;

  /// Gray, RGB, HSV, YCbCr and the YCbCr+HSV fusion.
  static std::vector<DescriptorSpec> default_descriptors();
  void validate() const;
};

/// One (descriptor, kernel, corpus split, scenario) measurement.
struct ReportRow {
  std::string descriptor;
  std::string kernel;
  std::string corpus;  // "intra", or "<train corpus> -> <test corpus>"
  std::string split;
  std::string scenario;
  double eer = 0.0;
  double eer_threshold = 0.0;
  double hter = 0.0;       // at the tuned threshold
  double threshold = 0.0;  // the tuned threshold
  std::size_t n_genuine = 0;
  std::size_t n_attack = 0;
  double C = 0.0;
  double gamma = 0.0;
  double tuning_eer = 0.0;
  std::string threshold_source;
};

struct RocCurve {
  std::string descriptor;
  std::string kernel;
  std::string corpus;
  std::string split;
  std::vector<RocPoint> points;
};

enum class ReportKind { Intra, Cross };

struct Report {
  ReportKind kind = ReportKind::Intra;
  std::vector<std::string> scenarios;
  std::vector<ReportRow> rows;
  std::vector<RocCurve> curves;
};

/// A tuned and trained model with its operating threshold.
struct TrainedModel {
  Model model;
  ModelMeta meta;
  TuningResult tuning;
};

/// Tunes on the dev split when the set has one, otherwise by subject-disjoint
/// cross-validation on the train split; then fits on all training windows.
TrainedModel train_tuned(const DescriptorSet& set, KernelKind kernel, const TrainConfig& cfg,
                         int folds, std::uint64_t seed, int jobs = 1);

ScoreSet score_samples(const Model& model, std::span<const Sample> samples,
                       const std::string& scenario = "overall");

/// Scores the first window of every video in `split` and appends one row
/// per scenario (plus an overall ROC curve) to `report`.
void evaluate_split(const TrainedModel& trained, const DescriptorSet& set,
                    const std::string& split, const std::vector<std::string>& scenarios,
                    const std::string& corpus, Report& report);

/// Trains and tests every configured descriptor on one corpus.
Report run_intra_protocol(const ProtocolConfig& cfg);

/// Intra protocol on already extracted descriptor sets, one per descriptor.
Report run_intra_protocol(const std::vector<DescriptorSet>& sets, const ProtocolConfig& cfg);

/// Trains and thresholds on corpus A, reports HTER on corpus B's dev (or
/// train) and test splits, for both the linear and the RBF kernel.
Report run_cross_protocol(const ProtocolConfig& train_cfg, const ProtocolConfig& test_cfg);

Report run_cross_protocol(const std::vector<DescriptorSet>& train_sets,
                          const std::vector<DescriptorSet>& test_sets,
                          const ProtocolConfig& train_cfg, const std::string& train_name,
                          const std::string& test_name);

/// Extracts one descriptor set per configured descriptor from the manifest.
std::vector<DescriptorSet> extract_sets(const ProtocolConfig& cfg);

bool has_split(const DescriptorSet& set, const std::string& split);

// Report output.
std::string format_table(const Report& report);
std::string format_csv(const Report& report);
std::string format_roc(const Report& report);
/// Writes report.txt, report.csv and roc.csv into `dir`.
void write_report(const std::filesystem::path& dir, const Report& report);

}  // namespace chromatex
