#pragma once

#include <filesystem>

namespace chromatex::cli {

/// Write-once output directory. Work happens in a hidden sibling staging
/// directory that is renamed into place by commit(); if commit() is never
/// reached the staging directory is removed, so failures leave nothing
/// behind.
class StagedOutput {
 public:
  /// Fails with OutputExists if `target` exists and `force` is false.
  StagedOutput(std::filesystem::path target, bool force);
  ~StagedOutput();

  StagedOutput(const StagedOutput&) = delete;
  StagedOutput& operator=(const StagedOutput&) = delete;

  const std::filesystem::path& dir() const noexcept { return staging_; }
  const std::filesystem::path& target() const noexcept { return target_; }
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  bool force_;
  bool committed_ = false;
};

}  // namespace chromatex::cli
