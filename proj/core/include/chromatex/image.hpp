#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace chromatex {

enum class ColorSpace : std::uint8_t { Gray = 0, RGB = 1, HSV = 2, YCbCr = 3 };

std::string_view color_space_name(ColorSpace space) noexcept;
/// Parses "gray", "rgb", "hsv" or "ycbcr" (case-insensitive).
ColorSpace parse_color_space(std::string_view name);
constexpr int channel_count(ColorSpace space) noexcept {
  return space == ColorSpace::Gray ? 1 : 3;
}

/// Read-only view of one channel of an interleaved image.
struct ChannelView {
  std::span<const std::uint8_t> samples;  // starts at the channel's first sample
  int width = 0;
  int height = 0;
  int stride = 1;  // samples per pixel

  std::uint8_t operator()(int x, int y) const noexcept {
    return samples[static_cast<std::size_t>(y * width + x) * stride];
  }
};

/// Owned 8-bit image, row-major, channels interleaved.
class Image {
 public:
  Image() = default;
  Image(int width, int height, ColorSpace space);
  Image(int width, int height, ColorSpace space, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channel_count(space_); }
  ColorSpace space() const noexcept { return space_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::uint8_t at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }

  ChannelView channel(int c) const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels() + c;
  }

  int width_ = 0;
  int height_ = 0;
  ColorSpace space_ = ColorSpace::Gray;
  std::vector<std::uint8_t> data_;
};

/// Face bounding box in source-image pixel coordinates.
struct FaceBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const FaceBox&, const FaceBox&) = default;
};

inline constexpr int kNormalizedFaceSize = 64;
inline constexpr int kMinFaceBoxSide = 8;

using Triple = std::array<std::uint8_t, 3>;

/// Nearest integer, half away from zero, clamped to [0, 255].
std::uint8_t round_to_u8(double v) noexcept;

// Per-pixel conversions. All are pure; the image-level functions below apply
// them to every pixel.
std::uint8_t luma(Triple rgb) noexcept;
Triple hsv_from_rgb(Triple rgb) noexcept;
Triple ycbcr_from_rgb(Triple rgb) noexcept;
Triple rgb_from_ycbcr(Triple ycc) noexcept;

Image rgb_to_gray(const Image& img);
Image rgb_to_hsv(const Image& img);
Image rgb_to_ycbcr(const Image& img);
Image ycbcr_to_rgb(const Image& img);

/// Converts an RGB image (or an image already in `target`) to `target`.
Image convert(const Image& img, ColorSpace target);

/// Throws InvalidBox unless the box lies inside an image of the given size
/// and both sides are at least kMinFaceBoxSide.
void validate_box(const FaceBox& box, int image_width, int image_height);

/// Bilinear resample with pixel-center alignment; edge samples clamp.
Image resize_bilinear(const Image& img, int out_width, int out_height);

Image crop(const Image& img, const FaceBox& box);

/// Crops `box` and resamples it to a 64x64 face.
Image normalize_face(const Image& img, const FaceBox& box);

}  // namespace chromatex
