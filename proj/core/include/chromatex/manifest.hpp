#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chromatex/image.hpp"
#include "chromatex/sample.hpp"

namespace chromatex {

struct FrameRef {
  std::string path;  // relative to the manifest's directory unless absolute
  FaceBox box;

  friend bool operator==(const FrameRef&, const FrameRef&) = default;
};

struct ManifestEntry {
  std::string video_id;
  std::string subject_id;
  Label label = Label::Genuine;
  std::string attack_kind = "none";  // none | print | screen | highdef
  std::string quality = "normal";    // low | normal | high
  std::string split = "train";       // train | dev | test
  double fps = 0.0;
  std::vector<FrameRef> frames;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// JSON-lines file: a header object, then one video per line.
struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const FrameRef& f) const;
  friend bool operator==(const Manifest& a, const Manifest& b) { return a.entries == b.entries; }
};

inline constexpr int kManifestVersion = 1;

bool is_known_attack_kind(const std::string& s);
bool is_known_quality(const std::string& s);
bool is_known_split(const std::string& s);

/// Parses and validates; errors name the offending line. When
/// `check_frames` is set every frame file must exist.
Manifest load_manifest(const std::filesystem::path& path, bool check_frames = true);
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace chromatex
