#include "chromatex/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "chromatex/error.hpp"
#include "chromatex/parallel.hpp"
#include "chromatex/pnm.hpp"

namespace chromatex {

void RecaptureParams::validate() const {
  if (!(gamut_compression >= 0.0 && gamut_compression <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "gamut_compression must lie in [0, 1]");
  }
  for (double c : color_cast) {
    if (std::abs(c) > 64.0) fail(ErrorCode::InvalidArgument, "color_cast offsets must be within +-64");
  }
  if (!(blur_radius >= 0.0 && blur_radius <= 8.0)) {
    fail(ErrorCode::InvalidArgument, "blur_radius must lie in [0, 8]");
  }
  if (!(chroma_noise_sigma >= 0.0 && chroma_noise_sigma <= 64.0)) {
    fail(ErrorCode::InvalidArgument, "chroma_noise_sigma must lie in [0, 64]");
  }
  if (!(moire_amplitude >= 0.0 && moire_amplitude <= 64.0) || !(moire_period >= 2.0)) {
    fail(ErrorCode::InvalidArgument, "moire amplitude must lie in [0, 64], period >= 2");
  }
}

void SynthParams::validate() const {
  if (n_subjects < 1 || n_subjects > 100000) fail(ErrorCode::InvalidArgument, "n_subjects out of range");
  if (frames_per_video < 1 || frames_per_video > 10000) {
    fail(ErrorCode::InvalidArgument, "frames_per_video out of range");
  }
  if (!(fps > 0.0 && fps <= 240.0)) fail(ErrorCode::InvalidArgument, "fps must lie in (0, 240]");
  if (!(train_fraction >= 0.0 && dev_fraction >= 0.0 && train_fraction + dev_fraction <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "split fractions must be non-negative and sum to <= 1");
  }
  if (frame_size < kNormalizedFaceSize || frame_size > 1024) {
    fail(ErrorCode::InvalidArgument, "frame_size must be at least 64");
  }
  for (double v : {illumination, texture_scale, camera_noise_scale, camera_blur_scale}) {
    if (!(v >= 0.0 && v <= 4.0)) fail(ErrorCode::InvalidArgument, "regime multipliers must lie in [0, 4]");
  }
  recapture.validate();
}

SynthParams SynthParams::preset(std::string_view regime) {
  SynthParams p;
  if (regime == "casia" || regime.empty()) return p;
  if (regime == "replay") {
    p.illumination = 0.85;
    p.texture_scale = 1.4;
    p.camera_noise_scale = 1.5;
    p.camera_blur_scale = 0.6;
    p.frames_per_video = 15;
    p.recapture.gamut_compression = 0.7;
    p.recapture.color_cast = {-6.0, 4.0, -5.0};
    p.recapture.blur_radius = 0.9;
    p.recapture.chroma_noise_sigma = 1.5;
    return p;
  }
  fail(ErrorCode::InvalidArgument, "unknown synthetic regime '" + std::string(regime) + "'");
}

RecaptureParams attack_preset(const SynthParams& params, std::string_view attack_kind) {
  RecaptureParams r = params.recapture;
  if (attack_kind == "print") {
    r.blur_radius *= 1.6;
    r.color_cast = {r.color_cast[0] + 6.0, r.color_cast[1] - 3.0, r.color_cast[2] + 4.0};
    r.moire_amplitude = 0.0;
  } else if (attack_kind == "screen") {
    r.gamut_compression = std::min(1.0, r.gamut_compression * 0.9);
    r.blur_radius *= 0.8;
    r.moire_amplitude = std::max(r.moire_amplitude, 3.0);
  } else if (attack_kind == "highdef") {
    r.gamut_compression = 1.0 - 0.6 * (1.0 - r.gamut_compression);
    r.blur_radius *= 0.5;
    r.chroma_noise_sigma *= 0.8;
    r.moire_amplitude = 0.0;
  } else {
    fail(ErrorCode::InvalidArgument, "unknown attack kind '" + std::string(attack_kind) + "'");
  }
  return r;
}

std::mt19937_64 derived_stream(std::uint64_t seed, std::string_view key) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

namespace {

// Float plane used while compositing; quantized only at the end.
struct Plane {
  int w = 0, h = 0;
  std::vector<double> v;

  Plane(int width, int height, double fill = 0.0)
      : w(width), h(height), v(static_cast<std::size_t>(width) * height, fill) {}
  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * i * i / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable Gaussian blur with clamped borders.
void blur(Plane& p, double sigma) {
  if (sigma <= 0.0) return;
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int taps = static_cast<int>(k.size());
  std::vector<double> line(static_cast<std::size_t>(std::max(p.w, p.h) + 2 * r));
  const auto convolve = [&](int len, auto get, auto put) {
    for (int i = -r; i < len + r; ++i) line[static_cast<std::size_t>(i + r)] = get(std::clamp(i, 0, len - 1));
    for (int i = 0; i < len; ++i) {
      double s = 0.0;
      const double* src = line.data() + i;
      for (int t = 0; t < taps; ++t) s += k[static_cast<std::size_t>(t)] * src[t];
      put(i, s);
    }
  };
  for (int y = 0; y < p.h; ++y) {
    convolve(p.w, [&](int x) { return p.at(x, y); }, [&](int x, double v) { p.at(x, y) = v; });
  }
  for (int x = 0; x < p.w; ++x) {
    convolve(p.h, [&](int y) { return p.at(x, y); }, [&](int y, double v) { p.at(x, y) = v; });
  }
}

// Zero-mean, unit-variance noise low-passed at `sigma`.
Plane band_limited_noise(int w, int h, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Plane p(w, h);
  for (double& v : p.v) v = normal(rng);
  blur(p, sigma);
  double mean = 0.0;
  for (double v : p.v) mean += v;
  mean /= static_cast<double>(p.v.size());
  double var = 0.0;
  for (double& v : p.v) {
    v -= mean;
    var += v * v;
  }
  const double sd = std::sqrt(var / static_cast<double>(p.v.size()));
  if (sd > 0.0) {
    for (double& v : p.v) v /= sd;
  }
  return p;
}

struct Ycc {
  double y, cb, cr;
};

struct SubjectLook {
  Ycc skin, background, hair, lips, eyes;
  double luma_texture, chroma_texture, texture_sigma;
  double cx, cy, rx, ry;
};

constexpr int kTexturePad = 8;

SubjectLook subject_look(int subject, const SynthParams& params) {
  auto rng = derived_stream(params.seed, "subject-look:" + std::to_string(subject));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  SubjectLook s{};
  s.skin = {in(110, 190), in(100, 122), in(135, 165)};
  s.background = {in(40, 220), in(90, 166), in(90, 166)};
  s.hair = {in(20, 90), 128 + in(-12, 12), 128 + in(-12, 12)};
  s.lips = {s.skin.y - in(10, 30), s.skin.cb - in(2, 8), s.skin.cr + in(8, 20)};
  s.eyes = {in(30, 70), 128 + in(-5, 5), 128 + in(-5, 5)};
  s.luma_texture = in(5, 10) * params.texture_scale;
  s.chroma_texture = in(2.5, 5) * params.texture_scale;
  s.texture_sigma = in(0.8, 1.6);
  s.cx = 32 + in(-2, 2);
  s.cy = 34 + in(-2, 2);
  s.rx = in(20, 24);
  s.ry = in(25, 29);
  return s;
}

bool inside_ellipse(double x, double y, double cx, double cy, double rx, double ry) {
  const double dx = (x - cx) / rx, dy = (y - cy) / ry;
  return dx * dx + dy * dy <= 1.0;
}

Image ycc_planes_to_rgb(const Plane& y, const Plane& cb, const Plane& cr) {
  Image out(y.w, y.h, ColorSpace::RGB);
  for (int py = 0; py < y.h; ++py) {
    for (int px = 0; px < y.w; ++px) {
      const double Y = y.at(px, py), Cb = cb.at(px, py) - 128.0, Cr = cr.at(px, py) - 128.0;
      out.at(px, py, 0) = round_to_u8(Y + 1.402 * Cr);
      out.at(px, py, 1) = round_to_u8(Y - 0.344136 * Cb - 0.714136 * Cr);
      out.at(px, py, 2) = round_to_u8(Y + 1.772 * Cb);
    }
  }
  return out;
}

// Everything about a subject that does not change between frames.
class FaceModel {
 public:
  FaceModel(int subject, const SynthParams& params)
      : subject_(subject), params_(params), look_(subject_look(subject, params)) {
    const int tex = kNormalizedFaceSize + kTexturePad;
    auto rng = derived_stream(params.seed, "subject-texture:" + std::to_string(subject));
    ty_ = band_limited_noise(tex, tex, look_.texture_sigma, rng);
    tcb_ = band_limited_noise(tex, tex, look_.texture_sigma * 1.3, rng);
    tcr_ = band_limited_noise(tex, tex, look_.texture_sigma * 1.3, rng);
  }

  Image frame(int frame_index) const {
    constexpr int n = kNormalizedFaceSize;
    auto frame_rng = derived_stream(
        params_.seed, "frame:" + std::to_string(subject_) + ":" + std::to_string(frame_index));
    std::uniform_int_distribution<int> shift(0, kTexturePad - 1);
    const int ox = shift(frame_rng), oy = shift(frame_rng);
    std::uniform_real_distribution<double> gain_dist(0.97, 1.03);
    const double gain = gain_dist(frame_rng) * params_.illumination;

    const SubjectLook& look = look_;
    Plane y(n, n), cb(n, n), cr(n, n);
    for (int py = 0; py < n; ++py) {
      for (int px = 0; px < n; ++px) {
        const double fx = px + 0.5, fy = py + 0.5;
        Ycc base = look.background;
        double amp = 0.5;
        if (inside_ellipse(fx, fy, look.cx, look.cy - 8, look.rx + 3, look.ry - 6)) base = look.hair;
        if (inside_ellipse(fx, fy, look.cx, look.cy + 2, look.rx, look.ry - 4)) {
          base = look.skin;
          amp = 1.0;
          if (inside_ellipse(fx, fy, look.cx - 9, look.cy - 3, 4.5, 2.5) ||
              inside_ellipse(fx, fy, look.cx + 9, look.cy - 3, 4.5, 2.5)) {
            base = look.eyes;
          } else if (inside_ellipse(fx, fy, look.cx, look.cy + 15, 8.0, 3.0)) {
            base = look.lips;
          }
        }
        y.at(px, py) = gain * (base.y + amp * look.luma_texture * ty_.at(px + ox, py + oy));
        cb.at(px, py) = base.cb + amp * look.chroma_texture * tcb_.at(px + ox, py + oy);
        cr.at(px, py) = base.cr + amp * look.chroma_texture * tcr_.at(px + ox, py + oy);
      }
    }
    return ycc_planes_to_rgb(y, cb, cr);
  }

 private:
  int subject_;
  SynthParams params_;
  SubjectLook look_;
  Plane ty_{0, 0}, tcb_{0, 0}, tcr_{0, 0};
};

}  // namespace

Image synth_genuine_face(int subject, int frame_index, const SynthParams& params) {
  return FaceModel(subject, params).frame(frame_index);
}

Image synth_recapture(const Image& img, const RecaptureParams& params, std::mt19937_64& rng) {
  params.validate();
  if (img.space() != ColorSpace::RGB) {
    fail(ErrorCode::InvalidColorSpace, "synth_recapture expects an RGB image");
  }
  const int w = img.width(), h = img.height();
  Plane y(w, h), cb(w, h), cr(w, h);
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      const double r = img.at(px, py, 0), g = img.at(px, py, 1), b = img.at(px, py, 2);
      y.at(px, py) = 0.299 * r + 0.587 * g + 0.114 * b;
      cb.at(px, py) = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
      cr.at(px, py) = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
    }
  }
  // (1) limited gamut: pull chroma toward neutral
  for (double& v : cb.v) v = 128.0 + params.gamut_compression * (v - 128.0);
  for (double& v : cr.v) v = 128.0 + params.gamut_compression * (v - 128.0);
  // (2) medium-dependent cast
  for (double& v : y.v) v += params.color_cast[0];
  for (double& v : cb.v) v += params.color_cast[1];
  for (double& v : cr.v) v += params.color_cast[2];
  // (3) reproduction blur
  blur(y, params.blur_radius);
  blur(cb, params.blur_radius);
  blur(cr, params.blur_radius);
  // (4) local chroma variations
  if (params.chroma_noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, params.chroma_noise_sigma);
    for (double& v : cb.v) v += noise(rng);
    for (double& v : cr.v) v += noise(rng);
  }
  // (5) moire from display pixel grid beating against the sensor
  if (params.moire_amplitude > 0.0) {
    std::uniform_real_distribution<double> angle_dist(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
    const double theta = angle_dist(rng), phase = phase_dist(rng);
    const double kx = 2.0 * std::numbers::pi * std::cos(theta) / params.moire_period;
    const double ky = 2.0 * std::numbers::pi * std::sin(theta) / params.moire_period;
    for (int py = 0; py < h; ++py) {
      for (int px = 0; px < w; ++px) {
        y.at(px, py) += params.moire_amplitude * std::sin(kx * px + ky * py + phase);
      }
    }
  }
  for (auto* p : {&y, &cb, &cr}) {
    for (double& v : p->v) v = std::clamp(v, 0.0, 255.0);
  }
  return ycc_planes_to_rgb(y, cb, cr);
}

Image simulate_camera(const Image& img, const SynthParams& params, std::string_view quality,
                      std::mt19937_64& rng) {
  if (img.space() != ColorSpace::RGB) {
    fail(ErrorCode::InvalidColorSpace, "simulate_camera expects an RGB image");
  }
  double blur_sigma, noise_sigma;
  if (quality == "low") {
    blur_sigma = 1.0;
    noise_sigma = 3.0;
  } else if (quality == "normal") {
    blur_sigma = 0.7;
    noise_sigma = 2.0;
  } else if (quality == "high") {
    blur_sigma = 0.4;
    noise_sigma = 1.5;
  } else {
    fail(ErrorCode::InvalidArgument, "unknown quality '" + std::string(quality) + "'");
  }
  blur_sigma *= params.camera_blur_scale;
  noise_sigma *= params.camera_noise_scale;

  const int w = img.width(), h = img.height();
  std::normal_distribution<double> noise(0.0, noise_sigma);
  Image out(w, h, ColorSpace::RGB);
  for (int c = 0; c < 3; ++c) {
    Plane p(w, h);
    for (int py = 0; py < h; ++py) {
      for (int px = 0; px < w; ++px) p.at(px, py) = img.at(px, py, c);
    }
    blur(p, blur_sigma);
    for (int py = 0; py < h; ++py) {
      for (int px = 0; px < w; ++px) {
        out.at(px, py, c) = round_to_u8(p.at(px, py) + (noise_sigma > 0.0 ? noise(rng) : 0.0));
      }
    }
  }
  return out;
}

namespace {

struct VideoPlan {
  int subject;
  std::string quality;
  std::string attack_kind;  // "none" for genuine
  std::string split;
};

std::string subject_name(int s) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "s%03d", s);
  return buf;
}

}  // namespace

Manifest generate_corpus(const SynthParams& params, const std::filesystem::path& out_dir,
                         int jobs) {
  params.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "frames", ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + (out_dir / "frames").string() + ": " + ec.message());

  const int n_train = static_cast<int>(std::lround(params.n_subjects * params.train_fraction));
  const int n_dev = static_cast<int>(std::lround(params.n_subjects * params.dev_fraction));

  std::vector<VideoPlan> plans;
  for (int s = 0; s < params.n_subjects; ++s) {
    const std::string split = s < n_train ? "train" : (s < n_train + n_dev ? "dev" : "test");
    for (const char* q : {"low", "normal", "high"}) {
      for (const char* kind : {"none", "print", "screen", "highdef"}) {
        plans.push_back(VideoPlan{s, q, kind, split});
      }
    }
  }

  Manifest manifest;
  manifest.base_dir = out_dir;
  manifest.entries.resize(plans.size());
  const int margin = params.frame_size - kNormalizedFaceSize;

  parallel_for(plans.size(), jobs, [&](std::size_t v) {
    const VideoPlan& plan = plans[v];
    const bool genuine = plan.attack_kind == "none";
    ManifestEntry& e = manifest.entries[v];
    e.subject_id = subject_name(plan.subject);
    e.video_id = e.subject_id + "_" + plan.quality + "_" + (genuine ? "genuine" : plan.attack_kind);
    e.label = genuine ? Label::Genuine : Label::Attack;
    e.attack_kind = plan.attack_kind;
    e.quality = plan.quality;
    e.split = plan.split;
    e.fps = params.fps;

    const fs::path dir = out_dir / "frames" / e.video_id;
    std::error_code dir_ec;
    fs::create_directories(dir, dir_ec);
    if (dir_ec) fail(ErrorCode::IoError, "cannot create " + dir.string());

    auto rng = derived_stream(params.seed, "video:" + e.video_id);
    const RecaptureParams recapture =
        genuine ? RecaptureParams{} : attack_preset(params, plan.attack_kind);
    std::uniform_int_distribution<int> place(0, margin);
    std::uniform_real_distribution<double> bg(0.0, 255.0);
    const Triple backdrop{round_to_u8(bg(rng)), round_to_u8(bg(rng)), round_to_u8(bg(rng))};

    const FaceModel model(plan.subject, params);
    for (int f = 0; f < params.frames_per_video; ++f) {
      Image face = model.frame(f);
      if (!genuine) face = synth_recapture(face, recapture, rng);
      const int bx = place(rng), by = place(rng);
      Image frame(params.frame_size, params.frame_size, ColorSpace::RGB);
      for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
          for (int c = 0; c < 3; ++c) frame.at(x, y, c) = backdrop[static_cast<std::size_t>(c)];
        }
      }
      for (int y = 0; y < kNormalizedFaceSize; ++y) {
        for (int x = 0; x < kNormalizedFaceSize; ++x) {
          for (int c = 0; c < 3; ++c) frame.at(bx + x, by + y, c) = face.at(x, y, c);
        }
      }
      frame = simulate_camera(frame, params, plan.quality, rng);

      char name[32];
      std::snprintf(name, sizeof name, "%03d.ppm", f);
      write_pnm(dir / name, frame);
      e.frames.push_back(FrameRef{(fs::path("frames") / e.video_id / name).generic_string(),
                                  FaceBox{bx, by, kNormalizedFaceSize, kNormalizedFaceSize}});
    }
  });

  save_manifest(out_dir / "manifest.jsonl", manifest);
  return manifest;
}

}  // namespace chromatex
