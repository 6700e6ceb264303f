// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "chromatex/dataset.hpp"
#include "chromatex/descriptor.hpp"
#include "chromatex/lbp.hpp"
#include "chromatex/metrics.hpp"
#include "chromatex/protocol.hpp"
#include "chromatex/svm.hpp"
#include "chromatex/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

#ifdef CHROMATEX_ACCEPTANCE_CLI
#include "cli.hpp"
#endif

using namespace chromatex;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

int worker_count() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// 1. Optimized LBP counts against the per-pixel oracle.
Verdict lbp_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> value(0, 255), narrow(0, 3);
  int mismatches = 0, grids = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> grid(16 * 16);
    // Every fourth grid has few gray levels so that ties are frequent.
    for (int& v : grid) v = trial % 4 == 3 ? narrow(rng) : value(rng);
    Image img(16, 16, ColorSpace::Gray);
    for (std::size_t i = 0; i < grid.size(); ++i) img.data()[i] = static_cast<std::uint8_t>(grid[i]);
    for (bool interp : {true, false}) {
      LbpParams params;
      params.sampling = interp ? Sampling::Interpolated : Sampling::IntegerNeighborhood;
      const auto got = lbp_counts(img.channel(0), params);
      const auto want = oracle::lbp_counts(grid, 16, 16, 8, 1.0, interp);
      const auto hist = lbp_histogram(img.channel(0), params);
      std::uint64_t total = 0;
      for (auto c : got) total += c;
      bool normalized = hist.size() == got.size();
      for (std::size_t b = 0; normalized && b < got.size(); ++b) {
        normalized = hist[b] == static_cast<double>(got[b]) / static_cast<double>(total);
      }
      if (got != want || !normalized) ++mismatches;
      ++grids;
    }
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < 10.0,
          format("%d/%d grid-mode pairs identical to the oracle, %.2f s (limit 10 s)",
                 grids - mismatches, grids, elapsed)};
}

// 2. Uniform pattern census for P = 8.
Verdict census() {
  int uniform = 0, oracle_uniform = 0;
  bool bins_ok = true;
  for (std::uint32_t code = 0; code < 256; ++code) {
    const int u = circular_transitions(code, 8);
    uniform += u <= 2;
    oracle_uniform += oracle::transitions(code, 8) <= 2;
    if (uniform_bin(code, 8) != oracle::bin_of(code, 8)) bins_ok = false;
    if (u > 2 && uniform_bin(code, 8) != 58) bins_ok = false;
  }
  const int catch_all = 8 * 7 + 2;
  const bool pass = uniform == 58 && oracle_uniform == 58 && catch_all == 58 && bins_ok &&
                    LbpParams{}.bin_count() == 59;
  return {pass, format("%d uniform codes, catch-all bin %d, %d bins", uniform,
                       uniform_bin(0b01010101u, 8), LbpParams{}.bin_count())};
}

// 3. Descriptor dimensions.
Verdict dimensions() {
  Image img(64, 64, ColorSpace::RGB);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(0, 255);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(u(rng));
  const LbpParams params;
  const auto size = [&](const char* spec) {
    return extract_descriptor(img, DescriptorSpec::parse(spec), params).size();
  };
  const std::size_t gray = size("gray"), rgb = size("rgb"), hsv = size("hsv"), ycbcr = size("ycbcr"),
                    fused = size("ycbcr+hsv");
  const bool pass = gray == 59 && rgb == 177 && hsv == 177 && ycbcr == 177 && fused == 354;
  return {pass, format("gray %zu, rgb %zu, hsv %zu, ycbcr %zu, ycbcr+hsv %zu", gray, rgb, hsv,
                       ycbcr, fused)};
}

// 4. SMO solution against the brute-force dual.
Verdict svm_oracle() {
  const auto t0 = Clock::now();
  double worst_decision = 0, worst_balance = 0;
  bool box_ok = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = fixtures::random_problem(seed);
    const Model m = svm_train(p.samples, p.kernel, p.C, TrainConfig{});
    double balance = 0;
    for (const auto& sv : m.support) {
      balance += sv.alpha * sv.label;
      if (sv.alpha < 0.0 || sv.alpha > p.C) box_ok = false;
    }
    worst_balance = std::max(worst_balance, std::abs(balance));

    const auto ref = oracle::solve_dual(fixtures::gram(p), p.ys, p.C);
    std::mt19937_64 rng(seed + 500);
    std::normal_distribution<double> noise;
    std::vector<std::vector<double>> queries = p.xs;
    for (int q = 0; q < 10; ++q) {
      std::vector<double> x(p.xs[0].size());
      for (auto& v : x) v = noise(rng);
      queries.push_back(x);
    }
    for (const auto& x : queries) {
      std::vector<double> row;
      for (const auto& xi : p.xs) row.push_back(fixtures::kernel_value(p, xi, x));
      const double want = static_cast<double>(oracle::decision(ref, p.ys, row));
      worst_decision = std::max(worst_decision, std::abs(decision_value(m, std::span<const double>(x)) - want));
    }
  }
  const double elapsed = seconds_since(t0);
  const bool pass = worst_decision <= 1e-3 && worst_balance <= 1e-6 && box_ok && elapsed < 30.0;
  return {pass, format("max |f - f_ref| %.2e (limit 1e-3), max |sum a y| %.2e, box %s, %.2f s",
                       worst_decision, worst_balance, box_ok ? "ok" : "violated", elapsed)};
}

// 5. EER against the exhaustive sweep, and invariance to monotone maps.
Verdict eer_oracle() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> count(1, 50), coarse(0, 9);
  std::normal_distribution<double> noise;
  int exact = 0, invariant = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ScoreSet s;
    const bool ties = trial % 3 == 0;
    const double shift = 0.5 * (trial % 5);
    const auto draw = [&](double mean) { return ties ? coarse(rng) + mean : noise(rng) + mean; };
    for (int i = count(rng); i > 0; --i) s.genuine.push_back(draw(shift));
    for (int i = count(rng); i > 0; --i) s.attack.push_back(draw(0.0));
    const EerPoint got = eer(s);
    const auto want = oracle::exhaustive_eer(s.genuine, s.attack);
    exact += got.eer == want.eer && got.far == want.at.far && got.frr == want.at.frr;
    bool same = true;
    for (auto f : {+[](double x) { return 3.0 * x - 7.0; }, +[](double x) { return std::atan(x); },
                   +[](double x) { return std::exp(x); }}) {
      ScoreSet t = s;
      for (auto& v : t.genuine) v = f(v);
      for (auto& v : t.attack) v = f(v);
      same = same && eer(t).eer == got.eer;
    }
    invariant += same;
  }
  return {exact == 100 && invariant == 100,
          format("%d/100 exact, %d/100 invariant under monotone maps", exact, invariant)};
}

// Shared synthetic corpora for criteria 6 and 7.
struct SeedCorpora {
  std::vector<DescriptorSet> casia;   // gray, ycbcr, ycbcr+hsv
  std::vector<DescriptorSet> replay;  // ycbcr+hsv only
};

ProtocolConfig corpus_config(const fs::path& manifest, std::uint64_t seed, WindowSpec window) {
  ProtocolConfig cfg;
  cfg.manifest = manifest;
  cfg.seed = seed;
  cfg.window = window;
  cfg.descriptors = ProtocolConfig::default_descriptors();
  cfg.scenarios = {"overall"};
  cfg.jobs = worker_count();
  return cfg;
}

double overall_test_eer(const Report& r, const std::string& descriptor) {
  for (const auto& row : r.rows) {
    if (row.descriptor == descriptor && row.scenario == "overall") return row.eer;
  }
  return NAN;
}

Verdict trend(const std::vector<std::vector<DescriptorSet>>& casia_sets, double elapsed_extract) {
  const auto t0 = Clock::now();
  double sum[3] = {0, 0, 0};
  std::string per_seed;
  for (std::size_t i = 0; i < casia_sets.size(); ++i) {
    const auto cfg = corpus_config({}, i + 1, WindowSpec{3, 1});
    const Report r = run_intra_protocol(casia_sets[i], cfg);
    const double e[3] = {overall_test_eer(r, "gray"), overall_test_eer(r, "ycbcr"),
                         overall_test_eer(r, "ycbcr+hsv")};
    for (int k = 0; k < 3; ++k) sum[k] += e[k];
    per_seed += format(" [seed %zu: %.4f %.4f %.4f]", i + 1, e[0], e[1], e[2]);
  }
  const double n = static_cast<double>(casia_sets.size());
  const double gray = sum[0] / n, ycbcr = sum[1] / n, fused = sum[2] / n;
  const double elapsed = elapsed_extract + seconds_since(t0);
  const bool pass = ycbcr < gray && fused <= ycbcr + 0.02 && elapsed < 600.0;
  return {pass, format("mean test EER gray %.4f, ycbcr %.4f, ycbcr+hsv %.4f over %zu seeds, %.0f s (limit 600 s)",
                       gray, ycbcr, fused, casia_sets.size(), elapsed) +
                    per_seed};
}

Verdict generalization(const std::vector<SeedCorpora>& corpora) {
  double linear = 0, rbf = 0;
  int runs = 0;
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    const std::vector<DescriptorSet> a{corpora[i].casia.back()};
    const std::vector<DescriptorSet> b = corpora[i].replay;
    const auto cfg_a = corpus_config({}, i + 1, WindowSpec{3, 1});
    const auto cfg_b = corpus_config({}, i + 1, WindowSpec{4, 2});
    for (const Report& r : {run_cross_protocol(a, b, cfg_a, "casia", "replay"),
                            run_cross_protocol(b, a, cfg_b, "replay", "casia")}) {
      for (const auto& row : r.rows) {
        if (row.split != "test") continue;
        (row.kernel == "linear" ? linear : rbf) += row.hter;
      }
      ++runs;
    }
  }
  linear /= runs;
  rbf /= runs;
  return {linear <= rbf + 0.01,
          format("mean cross-corpus test HTER linear %.4f, rbf %.4f over %d runs (%zu seeds x 2 directions)",
                 linear, rbf, runs, corpora.size())};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// 8. Two full pipeline runs with the same seed and different worker counts.
Verdict determinism(const fs::path& root) {
  const auto run_once = [&](const std::string& tag, int jobs) -> std::string {
    const fs::path base = root / tag;
    const std::string j = std::to_string(jobs);
#ifdef CHROMATEX_ACCEPTANCE_CLI
    const auto cli = [](std::vector<std::string> args) {
      args.insert(args.begin(), "chromatex");
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream out, err;
      if (cli::run(static_cast<int>(argv.size()), argv.data(), out, err) != 0) {
        throw std::runtime_error(err.str());
      }
    };
    cli({"synth", "--out", (base / "corpus").string(), "--subjects", "10", "--frames", "6",
         "--seed", "11", "--jobs", j});
    cli({"extract", "--manifest", (base / "corpus" / "manifest.jsonl").string(), "--out",
         (base / "sets").string(), "--jobs", j});
    cli({"train", "--descriptors", (base / "sets").string(), "--out", (base / "models").string(),
         "--c-grid", "1,10", "--gamma-grid", "0.5,2", "--seed", "11", "--jobs", j});
    cli({"eval", "--model", (base / "models").string(), "--descriptors", (base / "sets").string(),
         "--out", (base / "report").string(), "--jobs", j});
#else
    SynthParams p;
    p.n_subjects = 10;
    p.frames_per_video = 6;
    p.seed = 11;
    generate_corpus(p, base / "corpus", jobs);
    ProtocolConfig cfg;
    cfg.manifest = base / "corpus" / "manifest.jsonl";
    cfg.descriptors = ProtocolConfig::default_descriptors();
    cfg.train.c_grid = {1, 10};
    cfg.train.gamma_grid = {0.5, 2};
    cfg.seed = 11;
    cfg.jobs = jobs;
    write_report(base / "report", run_intra_protocol(cfg));
#endif
    std::string bytes;
    for (const char* name : {"report.txt", "report.csv", "roc.csv"}) bytes += slurp(base / "report" / name);
    return bytes;
  };
  const std::string a = run_once("run-a", 1);
  const std::string b = run_once("run-b", 4);
  return {!a.empty() && a == b,
          format("reports from --jobs 1 and --jobs 4 are %s (%zu bytes)",
                 a == b ? "byte-identical" : "DIFFERENT", a.size())};
}

}  // namespace

int main() {
  fixtures::TempDir root("acceptance");
  int failures = 0;
  const auto report = [&](int id, const char* name, const std::function<Verdict()>& check) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("criterion %d %s: %s: %s (%.1f s)\n", id, name, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "lbp-oracle", lbp_oracle);
  report(2, "uniform-census", census);
  report(3, "descriptor-dimensions", dimensions);
  report(4, "svm-oracle", svm_oracle);
  report(5, "eer-oracle", eer_oracle);

  // Corpora for the trend criteria: casia-style for seeds 1..5, plus a
  // replay-style corpus per seed for the cross-corpus runs.
  std::vector<SeedCorpora> corpora;
  double casia_seconds = 0;
  std::string corpus_error;
  try {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SeedCorpora c;
      const auto t0 = Clock::now();
      SynthParams a = SynthParams::preset("casia");
      a.seed = seed;
      const fs::path dir_a = root / ("casia-" + std::to_string(seed));
      generate_corpus(a, dir_a, worker_count());
      auto cfg_a = corpus_config(dir_a / "manifest.jsonl", seed, WindowSpec{3, 1});
      cfg_a.descriptors = {DescriptorSpec::parse("gray"), DescriptorSpec::parse("ycbcr"),
                           DescriptorSpec::parse("ycbcr+hsv")};
      c.casia = extract_sets(cfg_a);
      casia_seconds += seconds_since(t0);
      fs::remove_all(dir_a);

      SynthParams b = SynthParams::preset("replay");
      b.seed = seed + 1000;
      const fs::path dir_b = root / ("replay-" + std::to_string(seed));
      generate_corpus(b, dir_b, worker_count());
      auto cfg_b = corpus_config(dir_b / "manifest.jsonl", seed, WindowSpec{4, 2});
      cfg_b.descriptors = {DescriptorSpec::parse("ycbcr+hsv")};
      c.replay = extract_sets(cfg_b);
      fs::remove_all(dir_b);
      corpora.push_back(std::move(c));
    }
  } catch (const std::exception& e) {
    corpus_error = e.what();
  }

  if (corpus_error.empty()) {
    std::vector<std::vector<DescriptorSet>> casia_sets;
    for (const auto& c : corpora) casia_sets.push_back(c.casia);
    report(6, "color-trend", [&] { return trend(casia_sets, casia_seconds); });
    report(7, "linear-generalizes", [&] { return generalization(corpora); });
  } else {
    report(6, "color-trend", [&]() -> Verdict { return {false, "corpus generation failed: " + corpus_error}; });
    report(7, "linear-generalizes", [&]() -> Verdict { return {false, "corpus generation failed: " + corpus_error}; });
  }
  report(8, "determinism", [&] { return determinism(root.path()); });

  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
