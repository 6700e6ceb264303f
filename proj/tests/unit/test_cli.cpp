#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "chromatex/error.hpp"
#include "cli.hpp"
#include "tempdir.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "chromatex");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = chromatex::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const std::regex kErrorLine(R"re(^error code=[A-Za-z]+ exit=[0-9]+ msg=".*"\n$)re");

// One small corpus shared by the pipeline tests.
class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fixtures::TempDir("cli");
    const auto r = run({"synth", "--out", (dir_->path() / "corpus").string(), "--subjects", "6",
                        "--frames", "6", "--train-fraction", "0.5", "--seed", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static fs::path path(const std::string& name) { return dir_->path() / name; }
  static std::string manifest() { return (path("corpus") / "manifest.jsonl").string(); }

  // synth is shared; the rest of the pipeline writes under `tag`.
  static Outcome pipeline(const std::string& tag, const std::string& jobs) {
    const std::string base = (dir_->path() / tag).string();
    auto r = run({"extract", "--manifest", manifest(), "--out", base + "/sets", "--space", "gray",
                  "--fuse", "ycbcr+hsv", "--jobs", jobs});
    if (r.code != 0) return r;
    r = run({"train", "--descriptors", base + "/sets", "--out", base + "/models", "--c-grid",
             "1,100", "--gamma-grid", "1", "--folds", "3", "--jobs", jobs});
    if (r.code != 0) return r;
    return run({"eval", "--model", base + "/models", "--descriptors", base + "/sets", "--out",
                base + "/report", "--jobs", jobs});
  }

  static inline fixtures::TempDir* dir_ = nullptr;
};

}  // namespace

TEST(CliFormatTest, ErrorLineEscapesTheMessage) {
  EXPECT_EQ(chromatex::cli::error_line("IoError", 12, "a \"b\"\nc\\d"),
            "error code=IoError exit=12 msg=\"a \\\"b\\\"\\nc\\\\d\"");
}

TEST(CliFormatTest, ExitCodesFollowErrorCodes) {
  using chromatex::ErrorCode;
  EXPECT_EQ(chromatex::cli::exit_code(ErrorCode::InvalidArgument), 1);
  EXPECT_EQ(chromatex::cli::exit_code(ErrorCode::IoError), 12);
  EXPECT_EQ(chromatex::cli::exit_code(ErrorCode::OutputExists), 14);
}

TEST(CliHelpTest, EverySubcommandDocumentsItsFlags) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> expected{
      {"synth", {"--out", "--preset", "--subjects", "--seed", "--jobs", "--force", "casia"}},
      {"extract", {"--manifest", "--space", "--fuse", "--p", "--r", "--sampling", "--window-len", "interp"}},
      {"train", {"--descriptors", "--kernel", "--c-grid", "--gamma-grid", "--folds", "rbf"}},
      {"eval", {"--model", "--manifest", "--descriptors", "--scenario", "--window-stride"}},
      {"crosseval", {"--manifest", "--test-window-len", "--c-grid", "--seed"}},
      {"protocol", {"--manifest", "--kernel", "--scenario", "--folds"}},
  };
  for (const auto& [cmd, flags] : expected) {
    const auto r = run({cmd, "--help"});
    EXPECT_EQ(r.code, 0) << cmd;
    for (const auto& f : flags) EXPECT_NE(r.out.find(f), std::string::npos) << cmd << " lacks " << f;
  }
  const auto top = run({"--help"});
  EXPECT_EQ(top.code, 0);
  EXPECT_NE(top.out.find("Exit codes"), std::string::npos);
  EXPECT_NE(top.out.find("CHROMATEX_LOG"), std::string::npos);
}

TEST(CliUsageTest, BadCommandLinesExitWithUsageCode) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{}, {"bogus"}, {"extract"}, {"synth", "--subjects", "many", "--out", "x"}}) {
    const auto r = run(args);
    EXPECT_EQ(r.code, chromatex::cli::kUsageExit);
    EXPECT_TRUE(std::regex_match(r.err, kErrorLine)) << r.err;
    EXPECT_NE(r.err.find("code=Usage"), std::string::npos) << r.err;
  }
}

TEST_F(PipelineTest, SmokeRunWritesOneRowPerDescriptorAndScenario) {
  const auto r = pipeline("smoke", "1");
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path report = path("smoke") / "report";
  ASSERT_TRUE(fs::is_regular_file(report / "report.txt"));
  ASSERT_TRUE(fs::is_regular_file(report / "roc.csv"));
  const std::string csv = slurp(report / "report.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  int rows = 0, gray = 0, fused = 0;
  while (std::getline(lines, line)) {
    ++rows;
    gray += line.rfind("gray,", 0) == 0;
    fused += line.rfind("ycbcr+hsv,", 0) == 0;
  }
  EXPECT_EQ(rows, 14);  // 2 descriptors x 7 scenarios
  EXPECT_EQ(gray, 7);
  EXPECT_EQ(fused, 7);
  EXPECT_EQ(r.out, slurp(report / "report.txt"));
  for (const char* name : {"00_gray.ctxs", "01_ycbcr+hsv.ctxs"}) {
    EXPECT_TRUE(fs::is_regular_file(path("smoke") / "sets" / name)) << name;
  }
  EXPECT_TRUE(fs::is_regular_file(path("smoke") / "models" / "00_gray.ctxm"));
  EXPECT_TRUE(fs::is_regular_file(path("smoke") / "models" / "00_gray.ctxm.json"));
}

TEST_F(PipelineTest, ReportsAreIdenticalAcrossJobCounts) {
  ASSERT_EQ(pipeline("jobs1", "1").code, 0);
  ASSERT_EQ(pipeline("jobs3", "3").code, 0);
  for (const char* name : {"report.txt", "report.csv", "roc.csv"}) {
    EXPECT_EQ(slurp(path("jobs1") / "report" / name), slurp(path("jobs3") / "report" / name)) << name;
  }
}

TEST_F(PipelineTest, MissingModelFailsWithoutOutput) {
  const fs::path out = path("missing-report");
  const auto r = run({"eval", "--model", path("nope.ctxm").string(), "--manifest", manifest(),
                      "--out", out.string()});
  EXPECT_EQ(r.code, 12);
  EXPECT_TRUE(std::regex_match(r.err, kErrorLine)) << r.err;
  EXPECT_NE(r.err.find("code=IoError"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(out));
  for (const auto& entry : fs::directory_iterator(dir_->path())) {
    EXPECT_EQ(entry.path().filename().string().find(".partial"), std::string::npos);
  }
}

TEST_F(PipelineTest, ExistingOutputNeedsForce) {
  const fs::path out = path("twice");
  const std::vector<std::string> args{"extract", "--manifest", manifest(), "--out", out.string(),
                                      "--space", "gray"};
  ASSERT_EQ(run(args).code, 0);
  const auto again = run(args);
  EXPECT_EQ(again.code, 14);
  EXPECT_NE(again.err.find("code=OutputExists"), std::string::npos) << again.err;
  auto forced = args;
  forced.push_back("--force");
  EXPECT_EQ(run(forced).code, 0);
}

TEST_F(PipelineTest, OutputMayNotOverwriteAnInput) {
  const auto r = run({"extract", "--manifest", manifest(), "--out", path("corpus").string(),
                      "--space", "gray", "--force"});
  EXPECT_NE(r.code, 0);
  EXPECT_TRUE(fs::is_regular_file(manifest()));
}

TEST_F(PipelineTest, ProtocolMatchesStepwisePipeline) {
  ASSERT_EQ(pipeline("stepwise", "1").code, 0);
  const auto r = run({"protocol", "--manifest", manifest(), "--out", path("protocol").string(),
                      "--space", "gray", "--fuse", "ycbcr+hsv", "--c-grid", "1,100", "--gamma-grid",
                      "1", "--folds", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("protocol") / "report.csv"), slurp(path("stepwise") / "report" / "report.csv"));
}

TEST(CliBinaryTest, ProcessExitStatusCarriesTheCode) {
  const std::string bin = CHROMATEX_BIN;
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " --help > /dev/null").c_str())), 0);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " synth 2> /dev/null").c_str())), 64);
  fixtures::TempDir dir("cli-bin");
  const std::string cmd = bin + " eval --model " + (dir / "none.ctxm").string() + " --descriptors " +
                          (dir / "none.ctxs").string() + " --out " + (dir / "r").string() +
                          " 2> /dev/null";
  EXPECT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 12);
}
