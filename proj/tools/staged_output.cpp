#include "staged_output.hpp"

#include <unistd.h>

#include <string>
#include <system_error>

#include "chromatex/error.hpp"

namespace chromatex::cli {

namespace fs = std::filesystem;

StagedOutput::StagedOutput(fs::path target, bool force)
    : target_(std::move(target)), force_(force) {
  if (target_.empty()) fail(ErrorCode::InvalidArgument, "empty output path");
  std::error_code ec;
  if (fs::exists(target_, ec) && !force_) {
    fail(ErrorCode::OutputExists,
         "output " + target_.string() + " already exists (pass --force to replace it)");
  }
  auto parent = fs::absolute(target_).parent_path();
  fs::create_directories(parent, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + parent.string() + ": " + ec.message());
  staging_ = parent / ("." + target_.filename().string() + ".partial-" +
                       std::to_string(static_cast<long>(::getpid())));
  fs::remove_all(staging_, ec);
  fs::create_directory(staging_, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + staging_.string() + ": " + ec.message());
}

StagedOutput::~StagedOutput() {
  if (committed_) return;
  std::error_code ec;
  fs::remove_all(staging_, ec);
}

void StagedOutput::commit() {
  std::error_code ec;
  if (fs::exists(target_, ec)) {
    if (!force_) fail(ErrorCode::OutputExists, "output " + target_.string() + " appeared while running");
    fs::remove_all(target_, ec);
    if (ec) fail(ErrorCode::IoError, "cannot replace " + target_.string() + ": " + ec.message());
  }
  fs::rename(staging_, target_, ec);
  if (ec) fail(ErrorCode::IoError, "cannot move output into " + target_.string() + ": " + ec.message());
  committed_ = true;
}

}  // namespace chromatex::cli
