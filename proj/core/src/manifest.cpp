#include "chromatex/manifest.hpp"

#include <array>
#include <fstream>
#include <set>

#include "chromatex/error.hpp"
#include "json.hpp"

namespace chromatex {

namespace {

constexpr std::array kAttackKinds{"none", "print", "screen", "highdef"};
constexpr std::array kQualities{"low", "normal", "high"};
constexpr std::array kSplits{"train", "dev", "test"};

template <std::size_t N>
bool contains(const std::array<const char*, N>& vocab, const std::string& s) {
  for (const char* v : vocab) {
    if (s == v) return true;
  }
  return false;
}

}  // namespace

std::string_view label_name(Label l) noexcept { return l == Label::Genuine ? "genuine" : "attack"; }

Label parse_label(std::string_view text) {
  if (text == "genuine") return Label::Genuine;
  if (text == "attack") return Label::Attack;
  fail(ErrorCode::InvalidArgument, "unknown label '" + std::string(text) + "'");
}

bool is_known_attack_kind(const std::string& s) { return contains(kAttackKinds, s); }
bool is_known_quality(const std::string& s) { return contains(kQualities, s); }
bool is_known_split(const std::string& s) { return contains(kSplits, s); }

std::filesystem::path Manifest::resolve(const FrameRef& f) const {
  const std::filesystem::path p(f.path);
  return p.is_absolute() ? p : base_dir / p;
}

namespace {

ManifestEntry parse_entry(const nlohmann::json& j) {
  ManifestEntry e;
  e.video_id = j.at("video_id").get<std::string>();
  e.subject_id = j.at("subject_id").get<std::string>();
  e.label = parse_label(j.at("label").get<std::string>());
  e.attack_kind = j.value("attack_kind", std::string(e.label == Label::Genuine ? "none" : ""));
  e.quality = j.value("quality", std::string("normal"));
  e.split = j.value("split", std::string("train"));
  e.fps = j.at("fps").get<double>();
  for (const auto& f : j.at("frames")) {
    FrameRef ref;
    ref.path = f.at("path").get<std::string>();
    const auto& box = f.at("box");
    if (!box.is_array() || box.size() != 4) {
      fail(ErrorCode::ManifestError, "frame box must be [x, y, w, h]");
    }
    ref.box = FaceBox{box[0].get<int>(), box[1].get<int>(), box[2].get<int>(), box[3].get<int>()};
    e.frames.push_back(std::move(ref));
  }
  if (e.video_id.empty() || e.subject_id.empty()) {
    fail(ErrorCode::ManifestError, "video_id and subject_id must be non-empty");
  }
  if (!is_known_attack_kind(e.attack_kind)) {
    fail(ErrorCode::ManifestError, "unknown attack_kind '" + e.attack_kind + "'");
  }
  if ((e.label == Label::Genuine) != (e.attack_kind == "none")) {
    fail(ErrorCode::ManifestError, "attack_kind 'none' is reserved for genuine videos");
  }
  if (!is_known_quality(e.quality)) fail(ErrorCode::ManifestError, "unknown quality '" + e.quality + "'");
  if (!is_known_split(e.split)) fail(ErrorCode::ManifestError, "unknown split '" + e.split + "'");
  if (!(e.fps > 0.0)) fail(ErrorCode::ManifestError, "fps must be positive");
  if (e.frames.empty()) fail(ErrorCode::ManifestError, "video has no frames");
  for (const auto& f : e.frames) {
    if (f.box.w < kMinFaceBoxSide || f.box.h < kMinFaceBoxSide || f.box.x < 0 || f.box.y < 0) {
      fail(ErrorCode::ManifestError, "invalid face box for frame '" + f.path + "'");
    }
  }
  return e;
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path, bool check_frames) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open manifest " + path.string());
  Manifest m;
  m.base_dir = path.parent_path();
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) fail(ErrorCode::ManifestError, "line is not a JSON object");
      if (!header_seen && j.contains("format")) {
        if (j.at("format") != "chromatex-manifest") {
          fail(ErrorCode::ManifestError, "not a chromatex manifest");
        }
        if (j.value("version", 0) != kManifestVersion) {
          fail(ErrorCode::ManifestError, "unsupported manifest version");
        }
        header_seen = true;
        continue;
      }
      header_seen = true;
      ManifestEntry e = parse_entry(j);
      if (!seen.insert(e.video_id).second) {
        fail(ErrorCode::ManifestError, "duplicate video_id '" + e.video_id + "'");
      }
      if (check_frames) {
        for (const auto& f : e.frames) {
          if (!std::filesystem::is_regular_file(m.resolve(f))) {
            fail(ErrorCode::ManifestError, "frame not found: " + m.resolve(f).string());
          }
        }
      }
      m.entries.push_back(std::move(e));
    } catch (const Error& e) {
      fail(ErrorCode::ManifestError, where + e.what());
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ManifestError, where + e.what());
    }
  }
  return m;
}

void save_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  nlohmann::ordered_json header{{"format", "chromatex-manifest"}, {"version", kManifestVersion}};
  out << header.dump() << '\n';
  for (const auto& e : manifest.entries) {
    nlohmann::ordered_json j;
    j["video_id"] = e.video_id;
    j["subject_id"] = e.subject_id;
    j["label"] = label_name(e.label);
    j["attack_kind"] = e.attack_kind;
    j["quality"] = e.quality;
    j["split"] = e.split;
    j["fps"] = e.fps;
    auto frames = nlohmann::ordered_json::array();
    for (const auto& f : e.frames) {
      frames.push_back({{"path", f.path}, {"box", {f.box.x, f.box.y, f.box.w, f.box.h}}});
    }
    j["frames"] = std::move(frames);
    out << j.dump() << '\n';
  }
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace chromatex
