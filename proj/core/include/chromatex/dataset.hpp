#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chromatex/descriptor.hpp"
#include "chromatex/manifest.hpp"
#include "chromatex/sample.hpp"
#include "chromatex/temporal.hpp"

namespace chromatex {

/// Per-frame descriptors of every manifest video, one sequence per
/// requested descriptor spec. Each distinct color space is extracted once
/// per frame and shared by the specs (fusions) that use it.
struct ExtractedCorpus {
  std::vector<ManifestEntry> videos;                   // frame lists dropped
  std::vector<DescriptorSpec> specs;
  std::vector<std::vector<FrameSequence>> sequences;  // [spec][video]
};

ExtractedCorpus extract_corpus(const Manifest& manifest, const std::vector<DescriptorSpec>& specs,
                               const LbpParams& params, int jobs = 1);

/// Window-averaged samples of one video, tagged with its metadata. Window
/// indices count from 0, so window 0 is also the test-stage window.
std::vector<Sample> window_samples(const ManifestEntry& video, const FrameSequence& seq,
                                   const WindowSpec& spec);

/// Every training window of every video, for one descriptor spec.
struct DescriptorSet {
  LbpParams params;
  std::vector<Segment> layout;
  WindowSpec window;
  std::vector<Sample> samples;

  std::string descriptor_name() const { return layout_name(layout); }
};

DescriptorSet build_descriptor_set(const ExtractedCorpus& corpus, std::size_t spec_index,
                                   const WindowSpec& window);

/// All windows of the videos in `split` (training-stage rule).
std::vector<Sample> select_training(const DescriptorSet& set, const std::string& split);
/// First window only of the videos in `split` (test-stage rule).
std::vector<Sample> select_first_windows(const DescriptorSet& set, const std::string& split);

inline constexpr std::uint32_t kDescriptorSetVersion = 1;

void write_descriptor_set(const std::filesystem::path& path, const DescriptorSet& set);
DescriptorSet read_descriptor_set(const std::filesystem::path& path);

}  // namespace chromatex
