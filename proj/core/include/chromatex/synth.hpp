#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>

#include "chromatex/image.hpp"
#include "chromatex/manifest.hpp"

namespace chromatex {

/// Recapture distortions, applied in YCbCr in this order: chroma
/// compression toward neutral, global cast, Gaussian blur, chroma-only
/// noise, luma moire.
struct RecaptureParams {
  double gamut_compression = 0.55;           // (0, 1]; 1 keeps chroma, 0 removes it
  std::array<double, 3> color_cast{0, 0, 0};  // offsets on Y, Cb, Cr
  double blur_radius = 0.6;                  // Gaussian sigma in pixels; 0 disables
  double chroma_noise_sigma = 2.0;
  double moire_amplitude = 0.0;
  double moire_period = 3.3;  // pixels

  void validate() const;
};

/// Synthetic corpus recipe. Identical params (seed included) give
/// byte-identical corpora.
struct SynthParams {
  int n_subjects = 50;
  int frames_per_video = 12;
  double fps = 3.0;
  double train_fraction = 0.4;  // leading subjects go to train, then dev, rest test
  double dev_fraction = 0.0;
  int frame_size = 72;          // square frame holding the 64x64 face

  // Acquisition regime shared by genuine and attack videos.
  double illumination = 1.0;        // gain on content luma
  double texture_scale = 1.0;       // skin micro-texture amplitude multiplier
  double camera_noise_scale = 1.0;  // sensor noise multiplier
  double camera_blur_scale = 1.0;   // optics blur multiplier

  RecaptureParams recapture;  // base preset; attack kinds derive from it
  std::uint64_t seed = 1;

  void validate() const;

  /// "casia" (default, 3 s windows) or "replay" (different camera,
  /// lighting and recapture media, 4 s windows).
  static SynthParams preset(std::string_view regime);
};

/// Per-kind recapture settings: print (strong blur and cast), screen (moire
/// and compression) and highdef (mild everything).
RecaptureParams attack_preset(const SynthParams& params, std::string_view attack_kind);

/// Deterministic 64x64 face content for (seed, subject, frame): subject
/// palette regions, band-limited texture and per-frame jitter. No camera
/// effects.
Image synth_genuine_face(int subject, int frame_index, const SynthParams& params);

/// Simulates re-imaging `img` (RGB) through a spoofing medium.
Image synth_recapture(const Image& img, const RecaptureParams& params, std::mt19937_64& rng);

/// Acquisition camera: optics blur and per-channel sensor noise, scaled by
/// the quality tag ("low", "normal", "high").
Image simulate_camera(const Image& img, const SynthParams& params, std::string_view quality,
                      std::mt19937_64& rng);

/// Random stream for a (seed, key) pair; independent of generation order.
std::mt19937_64 derived_stream(std::uint64_t seed, std::string_view key);

/// Writes frames/<video_id>/NNN.ppm and manifest.jsonl under `out_dir`
/// and returns the manifest. Per subject: one genuine and three attack
/// videos (print, screen, highdef) at each quality level.
Manifest generate_corpus(const SynthParams& params, const std::filesystem::path& out_dir,
                         int jobs = 1);

}  // namespace chromatex
