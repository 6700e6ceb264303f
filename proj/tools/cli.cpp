#include "cli.hpp"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chromatex/dataset.hpp"
#include "chromatex/protocol.hpp"
#include "chromatex/synth.hpp"
#include "staged_output.hpp"

namespace chromatex::cli {

namespace fs = std::filesystem;

int exit_code(ErrorCode code) noexcept { return static_cast<int>(code); }

std::string error_line(std::string_view code_name, int exit, std::string_view message) {
  std::string escaped;
  escaped.reserve(message.size());
  for (char c : message) {
    switch (c) {
      case '"': escaped += "\\\""; break;
      case '\\': escaped += "\\\\"; break;
      case '\n': escaped += "\\n"; break;
      case '\r': escaped += "\\r"; break;
      case '\t': escaped += "\\t"; break;
      default: escaped += c;
    }
  }
  return "error code=" + std::string(code_name) + " exit=" + std::to_string(exit) + " msg=\"" +
         escaped + "\"";
}

namespace {

constexpr const char* kSetExtension = ".ctxs";
constexpr const char* kModelExtension = ".ctxm";

constexpr const char* kExitCodeHelp =
    "Exit codes: 0 ok, 1 InvalidArgument, 2 InvalidColorSpace, 3 InvalidBox,\n"
    "4 BorderViolation, 5 ImageTooSmall, 6 EmptySequence, 7 DegenerateTrainingSet,\n"
    "8 DimMismatch, 9 NotEnoughSubjects, 10 EmptyScores, 11 ManifestError, 12 IoError,\n"
    "13 FormatError, 14 OutputExists, 64 usage error, 70 internal error.\n"
    "Set CHROMATEX_LOG to trace, debug, info, warning, error or off (default warning).";

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  auto log = std::make_shared<spdlog::logger>("chromatex", sink);
  log->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("CHROMATEX_LOG"); env != nullptr && *env != '\0') {
    level = spdlog::level::from_str(env);
  }
  log->set_level(level);
  return log;
}

// Option groups shared by several subcommands.

struct DescriptorOptions {
  std::vector<std::string> spaces;
  std::vector<std::string> fusions;
  int neighbors = 8;
  double radius = 1.0;
  std::string sampling = "interp";

  void add(CLI::App& app) {
    app.add_option("--space", spaces, "Single color-space descriptor: gray, rgb, hsv or ycbcr (repeatable)");
    app.add_option("--fuse", fusions, "Fused descriptor such as ycbcr+hsv (repeatable)");
    app.add_option("--p", neighbors, "LBP neighbor count")->capture_default_str();
    app.add_option("--r", radius, "LBP radius in pixels")->capture_default_str();
    app.add_option("--sampling", sampling, "Neighbor sampling: interp or int")->capture_default_str();
  }

  LbpParams lbp() const {
    LbpParams p;
    p.neighbors = neighbors;
    p.radius = radius;
    p.sampling = parse_sampling(sampling);
    p.validate();
    return p;
  }

  /// Without --space/--fuse: gray, rgb, hsv, ycbcr and ycbcr+hsv.
  std::vector<DescriptorSpec> specs() const {
    if (spaces.empty() && fusions.empty()) return ProtocolConfig::default_descriptors();
    std::vector<DescriptorSpec> out;
    for (const auto& s : spaces) {
      DescriptorSpec spec = DescriptorSpec::parse(s);
      if (spec.spaces.size() != 1) {
        fail(ErrorCode::InvalidArgument, "--space takes one color space; use --fuse for '" + s + "'");
      }
      out.push_back(spec);
    }
    for (const auto& f : fusions) {
      DescriptorSpec spec = DescriptorSpec::parse(f);
      if (spec.spaces.size() < 2) {
        fail(ErrorCode::InvalidArgument, "--fuse needs at least two spaces joined by '+', got '" + f + "'");
      }
      out.push_back(spec);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (out[i] == out[j]) fail(ErrorCode::InvalidArgument, "descriptor '" + out[i].name() + "' requested twice");
      }
    }
    return out;
  }
};

struct WindowOptions {
  double length = 3.0;
  double stride = 1.0;

  void add(CLI::App& app, const std::string& prefix = "--window") {
    app.add_option(prefix + "-len", length, "Temporal window length in seconds")->capture_default_str();
    app.add_option(prefix + "-stride", stride, "Temporal window stride in seconds")->capture_default_str();
  }

  WindowSpec spec() const {
    WindowSpec w;
    w.length = length;
    w.stride = stride;
    w.validate();
    return w;
  }
};

struct TrainOptions {
  std::string kernel = "rbf";
  std::vector<double> c_grid = TrainConfig{}.c_grid;
  std::vector<double> gamma_grid = TrainConfig{}.gamma_grid;
  int folds = 4;

  void add(CLI::App& app, bool with_kernel) {
    if (with_kernel) {
      app.add_option("--kernel", kernel, "SVM kernel: linear or rbf")->capture_default_str();
    }
    app.add_option("--c-grid", c_grid, "Comma-separated C values searched")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--gamma-grid", gamma_grid, "Comma-separated RBF gamma values searched")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--folds", folds, "Subject-disjoint folds when the corpus has no dev split")
        ->capture_default_str();
  }

  TrainConfig config() const {
    TrainConfig cfg;
    cfg.c_grid = c_grid;
    cfg.gamma_grid = gamma_grid;
    cfg.validate();
    if (folds < 2) fail(ErrorCode::InvalidArgument, "--folds must be at least 2");
    return cfg;
  }
};

struct CommonOptions {
  std::uint64_t seed = 1;
  int jobs = 0;
  bool force = false;

  void add(CLI::App& app, bool with_seed) {
    if (with_seed) app.add_option("--seed", seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--jobs", jobs, "Worker threads; 0 uses every available core")->capture_default_str();
    app.add_flag("--force", force, "Replace an existing output instead of failing");
  }
};

void validate_scenarios(const std::vector<std::string>& scenarios) {
  for (const auto& s : scenarios) {
    if (!is_known_scenario(s)) fail(ErrorCode::InvalidArgument, "unknown scenario '" + s + "'");
  }
}

void require_input(const fs::path& p, const char* what) {
  if (!fs::exists(p)) fail(ErrorCode::IoError, std::string(what) + " " + p.string() + " does not exist");
}

/// An output may not be, or contain, any input: --force would otherwise
/// delete what the command reads.
void check_disjoint(const fs::path& out, const std::vector<fs::path>& inputs) {
  const auto o = fs::weakly_canonical(fs::absolute(out));
  for (const auto& in : inputs) {
    const auto i = fs::weakly_canonical(fs::absolute(in));
    const auto oi = std::mismatch(o.begin(), o.end(), i.begin(), i.end()).first;
    if (oi == o.end()) {
      fail(ErrorCode::InvalidArgument,
           "output " + out.string() + " overlaps input " + in.string());
    }
  }
}

std::string indexed_name(std::size_t index, const std::string& name, const char* ext) {
  char prefix[8];
  std::snprintf(prefix, sizeof prefix, "%02zu_", index);
  return prefix + name + ext;
}

/// A file, or every file with `ext` in a directory in name order.
std::vector<fs::path> collect_files(const fs::path& p, const char* ext, const char* what) {
  require_input(p, what);
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(p)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorCode::IoError, "no " + std::string(ext) + " files in " + p.string());
  return files;
}

struct LoadedModel {
  fs::path path;
  TrainedModel trained;
};

LoadedModel load_trained(const fs::path& path) {
  LoadedModel m;
  m.path = path;
  m.trained.model = load_model(path);
  const fs::path side = sidecar_path(path);
  require_input(side, "model sidecar");
  m.trained.meta = read_model_sidecar(side);
  m.trained.tuning.C = m.trained.model.C;
  m.trained.tuning.gamma =
      m.trained.model.kernel.kind == KernelKind::RBF ? m.trained.model.kernel.gamma : 0.0;
  m.trained.tuning.eer = m.trained.meta.tuning_eer;
  m.trained.tuning.threshold = m.trained.meta.threshold;
  return m;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), log_(make_logger(err)) {}

  int synth() {
    if (synth_preset_ != "casia" && synth_preset_ != "replay") {
      fail(ErrorCode::InvalidArgument, "unknown preset '" + synth_preset_ + "'");
    }
    SynthParams params = SynthParams::preset(synth_preset_);
    if (subjects_) params.n_subjects = *subjects_;
    if (frames_) params.frames_per_video = *frames_;
    if (train_fraction_) params.train_fraction = *train_fraction_;
    if (dev_fraction_) params.dev_fraction = *dev_fraction_;
    params.seed = common_.seed;
    params.validate();

    StagedOutput staged(out_path_, common_.force);
    log_->info("generating {} subjects into {}", params.n_subjects, out_path_.string());
    const Manifest m = generate_corpus(params, staged.dir(), common_.jobs);
    staged.commit();
    out_ << "wrote " << m.entries.size() << " videos to " << (out_path_ / "manifest.jsonl").string()
         << '\n';
    return 0;
  }

  int extract() {
    const auto specs = descriptor_.specs();
    const LbpParams lbp = descriptor_.lbp();
    const WindowSpec window = window_.spec();
    require_input(manifest_, "manifest");
    check_disjoint(out_path_, {manifest_});

    StagedOutput staged(out_path_, common_.force);
    const Manifest manifest = load_manifest(manifest_);
    log_->info("extracting {} descriptors from {} videos", specs.size(), manifest.entries.size());
    const ExtractedCorpus corpus = extract_corpus(manifest, specs, lbp, common_.jobs);
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const DescriptorSet set = build_descriptor_set(corpus, i, window);
      const fs::path file = staged.dir() / indexed_name(i, set.descriptor_name(), kSetExtension);
      write_descriptor_set(file, set);
      log_->info("{}: {} windows", set.descriptor_name(), set.samples.size());
    }
    staged.commit();
    out_ << "wrote " << specs.size() << " descriptor sets to " << out_path_.string() << '\n';
    return 0;
  }

  int train() {
    const TrainConfig cfg = train_.config();
    const KernelKind kernel = parse_kernel(train_.kernel);
    const auto files = collect_files(descriptors_, kSetExtension, "descriptors");
    check_disjoint(out_path_, {descriptors_});

    std::vector<DescriptorSet> sets;
    for (const auto& f : files) sets.push_back(read_descriptor_set(f));

    StagedOutput staged(out_path_, common_.force);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      log_->info("tuning {} ({} kernel)", sets[i].descriptor_name(), kernel_name(kernel));
      const TrainedModel t = train_tuned(sets[i], kernel, cfg, train_.folds, common_.seed, common_.jobs);
      const fs::path file = staged.dir() / indexed_name(i, sets[i].descriptor_name(), kModelExtension);
      save_model(file, t.model);
      write_model_sidecar(sidecar_path(file), t.model, t.meta);
      log_->info("{}: C={} gamma={} tuning EER={:.4f} threshold={}", t.meta.descriptor, t.tuning.C,
                 t.tuning.gamma, t.tuning.eer, t.meta.threshold);
    }
    staged.commit();
    out_ << "wrote " << sets.size() << " models to " << out_path_.string() << '\n';
    return 0;
  }

  int eval() {
    validate_scenarios(scenarios_);
    const bool from_manifest = !manifest_.empty();
    if (from_manifest == !descriptors_.empty()) {
      fail(ErrorCode::InvalidArgument, "eval needs exactly one of --manifest or --descriptors");
    }
    std::vector<LoadedModel> models;
    std::vector<fs::path> inputs;
    for (const auto& p : model_paths_) {
      inputs.push_back(p);
      for (const auto& f : collect_files(p, kModelExtension, "model")) models.push_back(load_trained(f));
    }
    inputs.push_back(from_manifest ? manifest_ : descriptors_);
    check_disjoint(out_path_, inputs);

    std::vector<DescriptorSet> sets;
    if (from_manifest) {
      sets = extract_for_models(models);
    } else {
      for (const auto& f : collect_files(descriptors_, kSetExtension, "descriptors")) {
        sets.push_back(read_descriptor_set(f));
      }
    }

    Report report;
    report.kind = ReportKind::Intra;
    report.scenarios = scenarios_;
    for (const auto& m : models) {
      const DescriptorSet& set = matching_set(m, sets);
      evaluate_split(m.trained, set, "test", scenarios_, "intra", report);
    }
    return emit_report(report);
  }

  int crosseval() {
    if (manifests_.size() != 2) {
      fail(ErrorCode::InvalidArgument, "crosseval needs --manifest twice: training corpus, then test corpus");
    }
    ProtocolConfig a = protocol_config(manifests_[0], window_.spec());
    ProtocolConfig b = a;
    b.manifest = manifests_[1];
    b.window = test_window_.spec();
    for (const auto& m : manifests_) require_input(m, "manifest");
    check_disjoint(out_path_, {manifests_[0], manifests_[1]});
    StagedOutput staged(out_path_, common_.force);
    const Report report = run_cross_protocol(a, b);
    return emit_report(report, &staged);
  }

  int protocol() {
    validate_scenarios(scenarios_);
    ProtocolConfig cfg = protocol_config(manifest_, window_.spec());
    cfg.kernel = parse_kernel(train_.kernel);
    cfg.scenarios = scenarios_;
    require_input(manifest_, "manifest");
    check_disjoint(out_path_, {manifest_});
    StagedOutput staged(out_path_, common_.force);
    const Report report = run_intra_protocol(cfg);
    return emit_report(report, &staged);
  }

  // Bound to the parser by build_parser().
  fs::path out_path_;
  fs::path manifest_;
  std::vector<fs::path> manifests_;
  fs::path descriptors_;
  std::vector<fs::path> model_paths_;
  std::vector<std::string> scenarios_ = all_scenarios();
  std::string synth_preset_ = "casia";
  std::optional<int> subjects_;
  std::optional<int> frames_;
  std::optional<double> train_fraction_;
  std::optional<double> dev_fraction_;
  DescriptorOptions descriptor_;
  WindowOptions window_;
  WindowOptions test_window_;
  TrainOptions train_;
  CommonOptions common_;

 private:
  ProtocolConfig protocol_config(const fs::path& manifest, const WindowSpec& window) const {
    ProtocolConfig cfg;
    cfg.manifest = manifest;
    cfg.descriptors = descriptor_.specs();
    cfg.lbp = descriptor_.lbp();
    cfg.window = window;
    cfg.train = train_.config();
    cfg.folds = train_.folds;
    cfg.seed = common_.seed;
    cfg.jobs = common_.jobs;
    cfg.validate();
    return cfg;
  }

  /// Extracts exactly the descriptors the models were trained on, once per
  /// distinct set of LBP parameters.
  std::vector<DescriptorSet> extract_for_models(const std::vector<LoadedModel>& models) const {
    const WindowSpec window = window_.spec();
    require_input(manifest_, "manifest");
    const Manifest manifest = load_manifest(manifest_);
    std::vector<DescriptorSet> sets;
    std::vector<bool> done(models.size(), false);
    for (std::size_t i = 0; i < models.size(); ++i) {
      if (done[i]) continue;
      const LbpParams params = models[i].trained.model.params;
      std::vector<DescriptorSpec> specs;
      for (std::size_t j = i; j < models.size(); ++j) {
        if (done[j] || !(models[j].trained.model.params == params)) continue;
        done[j] = true;
        const DescriptorSpec spec = DescriptorSpec::parse(models[j].trained.model.descriptor_name());
        if (std::find(specs.begin(), specs.end(), spec) == specs.end()) specs.push_back(spec);
      }
      const ExtractedCorpus corpus = extract_corpus(manifest, specs, params, common_.jobs);
      for (std::size_t s = 0; s < specs.size(); ++s) sets.push_back(build_descriptor_set(corpus, s, window));
    }
    return sets;
  }

  static const DescriptorSet& matching_set(const LoadedModel& m, const std::vector<DescriptorSet>& sets) {
    const Model& model = m.trained.model;
    for (const auto& set : sets) {
      if (set.params == model.params && set.layout == model.layout) return set;
    }
    fail(ErrorCode::DimMismatch, "no descriptor set matches model " + m.path.string() + " (" +
                                     model.descriptor_name() + ", P=" +
                                     std::to_string(model.params.neighbors) + ")");
  }

  int emit_report(const Report& report, StagedOutput* staged = nullptr) {
    std::unique_ptr<StagedOutput> own;
    if (staged == nullptr) {
      own = std::make_unique<StagedOutput>(out_path_, common_.force);
      staged = own.get();
    }
    write_report(staged->dir(), report);
    staged->commit();
    out_ << format_table(report);
    log_->info("report written to {}", out_path_.string());
    return 0;
  }

  std::ostream& out_;
  std::shared_ptr<spdlog::logger> log_;
};

void add_manifest(CLI::App& app, fs::path& target) {
  app.add_option("--manifest", target, "Corpus manifest (JSON lines)")->required();
}

void add_out(CLI::App& app, fs::path& target, const char* what) {
  app.add_option("--out", target, what)->required();
}

void add_scenarios(CLI::App& app, std::vector<std::string>& target) {
  app.add_option("--scenario", target,
                 "Scenario rows to report: low, normal, high, print, screen, highdef, overall (repeatable)")
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Runner r(out, err);
  CLI::App app{"Color texture face anti-spoofing toolkit", "chromatex"};
  app.require_subcommand(1);
  app.footer(kExitCodeHelp);

  auto* synth = app.add_subcommand("synth", "Generate a deterministic synthetic corpus");
  add_out(*synth, r.out_path_, "Output corpus directory (holds manifest.jsonl and frames/)");
  synth->add_option("--preset", r.synth_preset_, "Acquisition regime: casia or replay")->capture_default_str();
  synth->add_option("--subjects", r.subjects_, "Number of subjects [default: 50]");
  synth->add_option("--frames", r.frames_, "Frames per video [default: 12 casia, 15 replay]");
  synth->add_option("--train-fraction", r.train_fraction_, "Share of subjects in the train split [default: 0.4]");
  synth->add_option("--dev-fraction", r.dev_fraction_, "Share of subjects in the dev split [default: 0]");
  r.common_.add(*synth, true);

  auto* extract = app.add_subcommand("extract", "Extract windowed descriptors from a manifest");
  add_manifest(*extract, r.manifest_);
  add_out(*extract, r.out_path_, "Output directory, one .ctxs file per descriptor");
  r.descriptor_.add(*extract);
  r.window_.add(*extract);
  r.common_.add(*extract, false);

  auto* train = app.add_subcommand("train", "Tune and train one SVM per descriptor set");
  train->add_option("--descriptors", r.descriptors_, "A .ctxs file or a directory of them")->required();
  add_out(*train, r.out_path_, "Output directory, one .ctxm model (plus .ctxm.json) per set");
  r.train_.add(*train, true);
  r.common_.add(*train, true);

  auto* eval = app.add_subcommand("eval", "Score the test split and write report files");
  eval->add_option("--model", r.model_paths_, "A .ctxm file or a directory of them (repeatable)")->required();
  eval->add_option("--manifest", r.manifest_, "Corpus manifest to extract from");
  eval->add_option("--descriptors", r.descriptors_, "Previously extracted .ctxs file or directory");
  add_out(*eval, r.out_path_, "Report directory (report.txt, report.csv, roc.csv)");
  r.window_.add(*eval);
  add_scenarios(*eval, r.scenarios_);
  r.common_.add(*eval, false);

  auto* cross = app.add_subcommand("crosseval", "Train on one corpus and report HTER on another");
  cross->add_option("--manifest", r.manifests_, "Training corpus manifest, then test corpus manifest")
      ->required()
      ->expected(2);
  add_out(*cross, r.out_path_, "Report directory (report.txt, report.csv, roc.csv)");
  r.descriptor_.add(*cross);
  r.window_.add(*cross);
  r.test_window_.add(*cross, "--test-window");
  r.train_.add(*cross, false);
  r.common_.add(*cross, true);

  auto* protocol = app.add_subcommand("protocol", "Extract, tune, train and evaluate every descriptor on one corpus");
  add_manifest(*protocol, r.manifest_);
  add_out(*protocol, r.out_path_, "Report directory (report.txt, report.csv, roc.csv)");
  r.descriptor_.add(*protocol);
  r.window_.add(*protocol);
  r.train_.add(*protocol, true);
  add_scenarios(*protocol, r.scenarios_);
  r.common_.add(*protocol, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_line("Usage", kUsageExit, e.what()) << '\n';
    return kUsageExit;
  }

  try {
    if (synth->parsed()) return r.synth();
    if (extract->parsed()) return r.extract();
    if (train->parsed()) return r.train();
    if (eval->parsed()) return r.eval();
    if (cross->parsed()) return r.crosseval();
    return r.protocol();
  } catch (const Error& e) {
    const int code = exit_code(e.code());
    err << error_line(error_code_name(e.code()), code, e.what()) << '\n';
    return code;
  } catch (const std::exception& e) {
    err << error_line("Internal", kInternalExit, e.what()) << '\n';
    return kInternalExit;
  }
}

}  // namespace chromatex::cli
