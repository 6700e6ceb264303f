#include "chromatex/protocol.hpp"

#include <algorithm>
#include <limits>

#include "chromatex/error.hpp"

namespace chromatex {

const std::vector<std::string>& all_scenarios() {
  static const std::vector<std::string> names{"low",    "normal",  "high",   "print",
                                              "screen", "highdef", "overall"};
  return names;
}

bool is_known_scenario(const std::string& name) {
  const auto& all = all_scenarios();
  return std::find(all.begin(), all.end(), name) != all.end();
}

bool in_scenario(const Sample& s, const std::string& scenario) {
  if (scenario == "overall") return true;
  if (scenario == "low" || scenario == "normal" || scenario == "high") return s.quality == scenario;
  return s.label == Label::Genuine || s.attack_kind == scenario;
}

std::vector<DescriptorSpec> ProtocolConfig::default_descriptors() {
  return {DescriptorSpec{{ColorSpace::Gray}}, DescriptorSpec{{ColorSpace::RGB}},
          DescriptorSpec{{ColorSpace::HSV}}, DescriptorSpec{{ColorSpace::YCbCr}},
          DescriptorSpec{{ColorSpace::YCbCr, ColorSpace::HSV}}};
}

void ProtocolConfig::validate() const {
  lbp.validate();
  window.validate();
  train.validate();
  if (descriptors.empty()) fail(ErrorCode::InvalidArgument, "protocol names no descriptors");
  if (folds < 2) fail(ErrorCode::InvalidArgument, "protocol needs at least 2 folds");
  for (const auto& s : scenarios) {
    if (!is_known_scenario(s)) fail(ErrorCode::InvalidArgument, "unknown scenario '" + s + "'");
  }
}

bool has_split(const DescriptorSet& set, const std::string& split) {
  return std::any_of(set.samples.begin(), set.samples.end(),
                     [&](const Sample& s) { return s.split == split; });
}

TrainedModel train_tuned(const DescriptorSet& set, KernelKind kernel, const TrainConfig& cfg,
                         int folds, std::uint64_t seed, int jobs) {
  const auto train = select_training(set, "train");
  if (train.empty()) fail(ErrorCode::DegenerateTrainingSet, "corpus has no train split");
  TrainedModel out;
  if (has_split(set, "dev")) {
    const auto dev = select_first_windows(set, "dev");
    out.tuning = grid_search_dev(train, dev, kernel, cfg, jobs);
    out.meta.threshold_source = "dev";
  } else {
    out.tuning = grid_search(train, kernel, cfg, folds, seed, jobs);
    out.meta.threshold_source = "cv";
    out.meta.folds = folds;
  }
  out.model = svm_train(train, out.tuning.kernel(kernel), out.tuning.C, cfg);
  out.meta.descriptor = set.descriptor_name();
  out.meta.threshold = out.tuning.threshold;
  out.meta.tuning_eer = out.tuning.eer;
  out.meta.seed = seed;
  return out;
}

ScoreSet score_samples(const Model& model, std::span<const Sample> samples,
                       const std::string& scenario) {
  ScoreSet scores;
  for (const auto& s : samples) {
    if (!in_scenario(s, scenario)) continue;
    const double v = decision_value(model, s.descriptor);
    (s.label == Label::Genuine ? scores.genuine : scores.attack).push_back(v);
  }
  return scores;
}

void evaluate_split(const TrainedModel& trained, const DescriptorSet& set,
                    const std::string& split, const std::vector<std::string>& scenarios,
                    const std::string& corpus, Report& report) {
  const auto samples = select_first_windows(set, split);
  if (samples.empty()) fail(ErrorCode::EmptyScores, "corpus has no '" + split + "' videos");
  const std::string kernel(kernel_name(trained.model.kernel.kind));
  const std::string descriptor = trained.model.descriptor_name();

  // Score once; scenario filters only select.
  std::vector<double> values(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    values[i] = decision_value(trained.model, samples[i].descriptor);
  }
  for (const auto& scenario : scenarios) {
    ScoreSet scores;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!in_scenario(samples[i], scenario)) continue;
      (samples[i].label == Label::Genuine ? scores.genuine : scores.attack).push_back(values[i]);
    }
    ReportRow row;
    row.descriptor = descriptor;
    row.kernel = kernel;
    row.corpus = corpus;
    row.split = split;
    row.scenario = scenario;
    row.n_genuine = scores.genuine.size();
    row.n_attack = scores.attack.size();
    row.threshold = trained.meta.threshold;
    row.C = trained.tuning.C;
    row.gamma = trained.tuning.gamma;
    row.tuning_eer = trained.tuning.eer;
    row.threshold_source = trained.meta.threshold_source;
    if (scores.genuine.empty() || scores.attack.empty()) {
      // The corpus has no videos of one class in this scenario.
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.eer = row.eer_threshold = row.hter = nan;
      report.rows.push_back(row);
      continue;
    }
    const EerPoint e = eer(scores);
    row.eer = e.eer;
    row.eer_threshold = e.threshold;
    row.hter = hter(scores, trained.meta.threshold);
    report.rows.push_back(row);
    if (scenario == "overall") {
      report.curves.push_back(RocCurve{descriptor, kernel, corpus, split, roc_points(scores)});
    }
  }
}

std::vector<DescriptorSet> extract_sets(const ProtocolConfig& cfg) {
  const Manifest manifest = load_manifest(cfg.manifest);
  const ExtractedCorpus corpus = extract_corpus(manifest, cfg.descriptors, cfg.lbp, cfg.jobs);
  std::vector<DescriptorSet> sets;
  for (std::size_t i = 0; i < cfg.descriptors.size(); ++i) {
    sets.push_back(build_descriptor_set(corpus, i, cfg.window));
  }
  return sets;
}

Report run_intra_protocol(const std::vector<DescriptorSet>& sets, const ProtocolConfig& cfg) {
  cfg.validate();
  Report report;
  report.kind = ReportKind::Intra;
  report.scenarios = cfg.scenarios;
  for (const auto& set : sets) {
    const TrainedModel trained =
        train_tuned(set, cfg.kernel, cfg.train, cfg.folds, cfg.seed, cfg.jobs);
    evaluate_split(trained, set, "test", cfg.scenarios, "intra", report);
  }
  return report;
}

Report run_intra_protocol(const ProtocolConfig& cfg) {
  cfg.validate();
  return run_intra_protocol(extract_sets(cfg), cfg);
}

Report run_cross_protocol(const std::vector<DescriptorSet>& train_sets,
                          const std::vector<DescriptorSet>& test_sets,
                          const ProtocolConfig& train_cfg, const std::string& train_name,
                          const std::string& test_name) {
  train_cfg.validate();
  if (train_sets.size() != test_sets.size()) {
    fail(ErrorCode::DimMismatch, "train and test corpora were extracted with different descriptor lists");
  }
  Report report;
  report.kind = ReportKind::Cross;
  report.scenarios = {"overall"};
  const std::string corpus = train_name + " -> " + test_name;
  for (std::size_t i = 0; i < train_sets.size(); ++i) {
    const DescriptorSet& a = train_sets[i];
    const DescriptorSet& b = test_sets[i];
    if (!(a.params == b.params) || a.layout != b.layout) {
      fail(ErrorCode::DimMismatch, "descriptor stamp of '" + a.descriptor_name() +
                                       "' differs between the two corpora");
    }
    const std::string first_split = has_split(b, "dev") ? "dev" : "train";
    for (KernelKind kernel : {KernelKind::RBF, KernelKind::Linear}) {
      const TrainedModel trained =
          train_tuned(a, kernel, train_cfg.train, train_cfg.folds, train_cfg.seed, train_cfg.jobs);
      if (has_split(b, first_split)) {
        evaluate_split(trained, b, first_split, report.scenarios, corpus, report);
      }
      evaluate_split(trained, b, "test", report.scenarios, corpus, report);
    }
  }
  return report;
}

namespace {

std::string corpus_name(const std::filesystem::path& manifest, const char* fallback) {
  const auto dir = std::filesystem::absolute(manifest).parent_path().filename().string();
  return dir.empty() ? fallback : dir;
}

}  // namespace

Report run_cross_protocol(const ProtocolConfig& train_cfg, const ProtocolConfig& test_cfg) {
  train_cfg.validate();
  test_cfg.validate();
  if (!(train_cfg.lbp == test_cfg.lbp) || train_cfg.descriptors != test_cfg.descriptors) {
    fail(ErrorCode::DimMismatch, "cross protocol needs identical descriptor settings on both corpora");
  }
  const auto a = extract_sets(train_cfg);
  const auto b = extract_sets(test_cfg);
  return run_cross_protocol(a, b, train_cfg, corpus_name(train_cfg.manifest, "A"),
                            corpus_name(test_cfg.manifest, "B"));
}

}  // namespace chromatex
