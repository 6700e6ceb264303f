#include "chromatex/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "chromatex/binary_io.hpp"
#include "chromatex/error.hpp"
#include "chromatex/parallel.hpp"
#include "chromatex/pnm.hpp"

namespace chromatex {

ExtractedCorpus extract_corpus(const Manifest& manifest, const std::vector<DescriptorSpec>& specs,
                               const LbpParams& params, int jobs) {
  params.validate();
  if (specs.empty()) fail(ErrorCode::InvalidArgument, "no descriptor specs requested");
  std::vector<ColorSpace> spaces;
  for (const auto& spec : specs) {
    if (spec.spaces.empty()) fail(ErrorCode::InvalidArgument, "descriptor spec names no space");
    for (ColorSpace s : spec.spaces) {
      if (std::find(spaces.begin(), spaces.end(), s) == spaces.end()) spaces.push_back(s);
    }
  }

  ExtractedCorpus out;
  out.specs = specs;
  out.sequences.assign(specs.size(), std::vector<FrameSequence>(manifest.entries.size()));
  out.videos.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    ManifestEntry meta = e;
    meta.frames.clear();
    out.videos.push_back(std::move(meta));
  }

  parallel_for(manifest.entries.size(), jobs, [&](std::size_t v) {
    const ManifestEntry& entry = manifest.entries[v];
    for (std::size_t s = 0; s < specs.size(); ++s) {
      out.sequences[s][v].video_id = entry.video_id;
      out.sequences[s][v].fps = entry.fps;
    }
    for (std::size_t f = 0; f < entry.frames.size(); ++f) {
      const FrameRef& ref = entry.frames[f];
      Image face;
      try {
        face = normalize_face(read_pnm(manifest.resolve(ref)), ref.box);
      } catch (const Error& e) {
        fail(e.code(), "video '" + entry.video_id + "' frame " + std::to_string(f) + ": " + e.what());
      }
      std::map<ColorSpace, Descriptor> per_space;
      for (ColorSpace s : spaces) per_space[s] = color_lbp_descriptor(face, s, params);
      const double t = static_cast<double>(f) / entry.fps;
      for (std::size_t s = 0; s < specs.size(); ++s) {
        Descriptor d;
        for (ColorSpace cs : specs[s].spaces) d = fuse_descriptors(d, per_space.at(cs));
        out.sequences[s][v].frames.push_back(TimedDescriptor{t, std::move(d)});
      }
    }
  });
  return out;
}

std::vector<Sample> window_samples(const ManifestEntry& video, const FrameSequence& seq,
                                   const WindowSpec& spec) {
  std::vector<Sample> out;
  const auto windows = make_windows(seq, spec);
  for (std::size_t w = 0; w < windows.size(); ++w) {
    Sample s;
    s.descriptor = average_window(seq, windows[w]);
    s.label = video.label;
    s.subject_id = video.subject_id;
    s.video_id = video.video_id;
    s.attack_kind = video.attack_kind;
    s.quality = video.quality;
    s.split = video.split;
    s.window = static_cast<int>(w);
    out.push_back(std::move(s));
  }
  return out;
}

DescriptorSet build_descriptor_set(const ExtractedCorpus& corpus, std::size_t spec_index,
                                   const WindowSpec& window) {
  if (spec_index >= corpus.specs.size()) fail(ErrorCode::InvalidArgument, "spec index out of range");
  WindowSpec all = window;
  all.mode = WindowMode::TrainAllWindows;
  DescriptorSet set;
  set.window = all;
  const auto& seqs = corpus.sequences[spec_index];
  for (std::size_t v = 0; v < corpus.videos.size(); ++v) {
    auto samples = window_samples(corpus.videos[v], seqs[v], all);
    for (auto& s : samples) set.samples.push_back(std::move(s));
  }
  if (!set.samples.empty()) {
    set.params = set.samples.front().descriptor.params;
    set.layout = set.samples.front().descriptor.layout;
  }
  return set;
}

std::vector<Sample> select_training(const DescriptorSet& set, const std::string& split) {
  std::vector<Sample> out;
  for (const auto& s : set.samples) {
    if (s.split == split) out.push_back(s);
  }
  return out;
}

std::vector<Sample> select_first_windows(const DescriptorSet& set, const std::string& split) {
  std::vector<Sample> out;
  for (const auto& s : set.samples) {
    if (s.split == split && s.window == 0) out.push_back(s);
  }
  return out;
}

void write_descriptor_set(const std::filesystem::path& path, const DescriptorSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  BinaryWriter w(out);
  w.magic("CTXS");
  w.u32(kDescriptorSetVersion);
  write_stamp(w, set.params, set.layout);
  w.f64(set.window.length);
  w.f64(set.window.stride);
  w.u64(set.samples.size());
  for (const auto& s : set.samples) {
    w.str(s.video_id);
    w.str(s.subject_id);
    w.u8(s.label == Label::Genuine ? 1 : 0);
    w.str(s.attack_kind);
    w.str(s.quality);
    w.str(s.split);
    w.u32(static_cast<std::uint32_t>(s.window));
    w.f64s(s.descriptor.values);
  }
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

DescriptorSet read_descriptor_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open descriptor set " + path.string());
  BinaryReader r(in, path.string());
  r.expect_magic("CTXS");
  if (r.u32() != kDescriptorSetVersion) r.corrupt("unsupported descriptor set version");
  DescriptorSet set;
  read_stamp(r, set.params, set.layout);
  set.window.length = r.f64();
  set.window.stride = r.f64();
  std::size_t dim = 0;
  for (const auto& seg : set.layout) dim += static_cast<std::size_t>(seg.bins);
  const std::uint64_t count = r.u64();
  if (count > (1u << 26)) r.corrupt("sample count out of range");
  set.samples.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Sample s;
    s.video_id = r.str();
    s.subject_id = r.str();
    s.label = r.u8() ? Label::Genuine : Label::Attack;
    s.attack_kind = r.str();
    s.quality = r.str();
    s.split = r.str();
    s.window = static_cast<int>(r.u32());
    s.descriptor.params = set.params;
    s.descriptor.layout = set.layout;
    s.descriptor.values = r.f64s(dim);
    set.samples.push_back(std::move(s));
  }
  return set;
}

}  // namespace chromatex
