#include "chromatex/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <type_traits>

#include "chromatex/error.hpp"

namespace chromatex {

std::string_view color_space_name(ColorSpace space) noexcept {
  switch (space) {
    case ColorSpace::Gray: return "gray";
    case ColorSpace::RGB: return "rgb";
    case ColorSpace::HSV: return "hsv";
    case ColorSpace::YCbCr: return "ycbcr";
  }
  return "unknown";
}

ColorSpace parse_color_space(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "gray" || lower == "grey") return ColorSpace::Gray;
  if (lower == "rgb") return ColorSpace::RGB;
  if (lower == "hsv") return ColorSpace::HSV;
  if (lower == "ycbcr") return ColorSpace::YCbCr;
  fail(ErrorCode::InvalidColorSpace, "unknown color space '" + std::string(name) + "'");
}

Image::Image(int width, int height, ColorSpace space)
    : Image(width, height, space,
            std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                      std::max(height, 0) * channel_count(space))) {}

Image::Image(int width, int height, ColorSpace space, std::vector<std::uint8_t> data)
    : width_(width), height_(height), space_(space), data_(std::move(data)) {
  if (width < 0 || height < 0) {
    fail(ErrorCode::InvalidArgument, "image dimensions must be non-negative");
  }
  const auto expected = static_cast<std::size_t>(width) * height * channel_count(space);
  if (data_.size() != expected) {
    fail(ErrorCode::InvalidArgument,
         "image buffer holds " + std::to_string(data_.size()) + " samples, expected " +
             std::to_string(expected));
  }
}

ChannelView Image::channel(int c) const {
  if (c < 0 || c >= channels()) {
    fail(ErrorCode::InvalidArgument, "channel index " + std::to_string(c) + " out of range");
  }
  std::span<const std::uint8_t> all = data_;
  return ChannelView{empty() ? all : all.subspan(static_cast<std::size_t>(c)), width_, height_,
                     channels()};
}

std::uint8_t round_to_u8(double v) noexcept {
  const double r = std::round(v);  // half away from zero
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

// The forward conversions use exact integer arithmetic so that half-way
// cases (frequent with 8-bit inputs) round away from zero without depending
// on floating-point representation error.

std::uint8_t luma(Triple rgb) noexcept {
  const int sum = 299 * rgb[0] + 587 * rgb[1] + 114 * rgb[2];
  return static_cast<std::uint8_t>((sum + 500) / 1000);
}

Triple hsv_from_rgb(Triple rgb) noexcept {
  const int r = rgb[0], g = rgb[1], b = rgb[2];
  const int hi = std::max({r, g, b});
  const int lo = std::min({r, g, b});
  const int delta = hi - lo;
  if (delta == 0) return {0, 0, static_cast<std::uint8_t>(hi)};

  // Hue in sixths of a turn times delta, in [0, 6 delta).
  int sixths;
  if (hi == r) {
    sixths = g - b;
    if (sixths < 0) sixths += 6 * delta;
  } else if (hi == g) {
    sixths = b - r + 2 * delta;
  } else {
    sixths = r - g + 4 * delta;
  }
  const int hue = (510 * sixths + 6 * delta) / (12 * delta);  // round(255 * sixths / (6 delta))
  const int sat = (510 * delta + hi) / (2 * hi);              // round(255 * delta / hi)
  return {static_cast<std::uint8_t>(hue), static_cast<std::uint8_t>(sat),
          static_cast<std::uint8_t>(hi)};
}

Triple ycbcr_from_rgb(Triple rgb) noexcept {
  // Full-range coefficients scaled by 10^6; every chroma numerator is
  // positive, so adding half and truncating rounds half away from zero.
  const std::int64_t r = rgb[0], g = rgb[1], b = rgb[2];
  const std::int64_t cb = 128'000'000 - 168'736 * r - 331'264 * g + 500'000 * b;
  const std::int64_t cr = 128'000'000 + 500'000 * r - 418'688 * g - 81'312 * b;
  auto to_u8 = [](std::int64_t scaled) {
    return static_cast<std::uint8_t>(std::min<std::int64_t>((scaled + 500'000) / 1'000'000, 255));
  };
  return {luma(rgb), to_u8(cb), to_u8(cr)};
}

Triple rgb_from_ycbcr(Triple ycc) noexcept {
  const double y = ycc[0], cb = ycc[1] - 128.0, cr = ycc[2] - 128.0;
  return {round_to_u8(y + 1.402 * cr), round_to_u8(y - 0.344136 * cb - 0.714136 * cr),
          round_to_u8(y + 1.772 * cb)};
}

namespace {

void require_space(const Image& img, ColorSpace expected, std::string_view op) {
  if (img.space() != expected) {
    fail(ErrorCode::InvalidColorSpace,
         std::string(op) + " expects a " + std::string(color_space_name(expected)) +
             " image, got " + std::string(color_space_name(img.space())));
  }
}

template <typename PixelFn>
Image map_triples(const Image& img, ColorSpace out_space, PixelFn fn) {
  Image out(img.width(), img.height(), out_space);
  auto src = img.data();
  auto dst = out.data();
  const int out_channels = out.channels();
  const std::size_t pixels = static_cast<std::size_t>(img.width()) * img.height();
  for (std::size_t i = 0; i < pixels; ++i) {
    const Triple px{src[3 * i], src[3 * i + 1], src[3 * i + 2]};
    if constexpr (std::is_same_v<decltype(fn(px)), Triple>) {
      const Triple o = fn(px);
      dst[3 * i] = o[0];
      dst[3 * i + 1] = o[1];
      dst[3 * i + 2] = o[2];
    } else {
      dst[i * out_channels] = fn(px);
    }
  }
  return out;
}

}  // namespace

Image rgb_to_gray(const Image& img) {
  require_space(img, ColorSpace::RGB, "rgb_to_gray");
  return map_triples(img, ColorSpace::Gray, luma);
}

Image rgb_to_hsv(const Image& img) {
  require_space(img, ColorSpace::RGB, "rgb_to_hsv");
  return map_triples(img, ColorSpace::HSV, hsv_from_rgb);
}

Image rgb_to_ycbcr(const Image& img) {
  require_space(img, ColorSpace::RGB, "rgb_to_ycbcr");
  return map_triples(img, ColorSpace::YCbCr, ycbcr_from_rgb);
}

Image ycbcr_to_rgb(const Image& img) {
  require_space(img, ColorSpace::YCbCr, "ycbcr_to_rgb");
  return map_triples(img, ColorSpace::RGB, rgb_from_ycbcr);
}

Image convert(const Image& img, ColorSpace target) {
  if (img.space() == target) return img;
  switch (target) {
    case ColorSpace::Gray: return rgb_to_gray(img);
    case ColorSpace::HSV: return rgb_to_hsv(img);
    case ColorSpace::YCbCr: return rgb_to_ycbcr(img);
    case ColorSpace::RGB:
      if (img.space() == ColorSpace::YCbCr) return ycbcr_to_rgb(img);
      break;
  }
  fail(ErrorCode::InvalidColorSpace,
       "no conversion from " + std::string(color_space_name(img.space())) + " to " +
           std::string(color_space_name(target)));
}

void validate_box(const FaceBox& box, int image_width, int image_height) {
  if (box.w < kMinFaceBoxSide || box.h < kMinFaceBoxSide) {
    fail(ErrorCode::InvalidBox, "face box " + std::to_string(box.w) + "x" +
                                    std::to_string(box.h) + " is smaller than the 8x8 minimum");
  }
  if (box.x < 0 || box.y < 0 || box.x + box.w > image_width || box.y + box.h > image_height) {
    fail(ErrorCode::InvalidBox, "face box (" + std::to_string(box.x) + "," +
                                    std::to_string(box.y) + "," + std::to_string(box.w) + "," +
                                    std::to_string(box.h) + ") exceeds image " +
                                    std::to_string(image_width) + "x" +
                                    std::to_string(image_height));
  }
}

Image crop(const Image& img, const FaceBox& box) {
  validate_box(box, img.width(), img.height());
  Image out(box.w, box.h, img.space());
  const int ch = img.channels();
  auto src = img.data();
  auto dst = out.data();
  for (int y = 0; y < box.h; ++y) {
    const auto row = src.subspan((static_cast<std::size_t>(box.y + y) * img.width() + box.x) * ch,
                                 static_cast<std::size_t>(box.w) * ch);
    std::copy(row.begin(), row.end(), dst.begin() + static_cast<std::ptrdiff_t>(y) * box.w * ch);
  }
  return out;
}

namespace {

struct Tap {
  int i0;
  int i1;
  double t;
};

std::vector<Tap> resample_taps(int in_size, int out_size) {
  std::vector<Tap> taps(static_cast<std::size_t>(out_size));
  const double scale = static_cast<double>(in_size) / out_size;
  for (int o = 0; o < out_size; ++o) {
    double s = (o + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in_size - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const int i1 = std::min(i0 + 1, in_size - 1);
    taps[static_cast<std::size_t>(o)] = Tap{i0, i1, s - i0};
  }
  return taps;
}

}  // namespace

Image resize_bilinear(const Image& img, int out_width, int out_height) {
  if (img.empty() || out_width <= 0 || out_height <= 0) {
    fail(ErrorCode::InvalidArgument, "resize_bilinear needs a non-empty image and target");
  }
  if (out_width == img.width() && out_height == img.height()) return img;
  const auto xs = resample_taps(img.width(), out_width);
  const auto ys = resample_taps(img.height(), out_height);
  Image out(out_width, out_height, img.space());
  const int ch = img.channels();
  for (int y = 0; y < out_height; ++y) {
    const Tap& ty = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < out_width; ++x) {
      const Tap& tx = xs[static_cast<std::size_t>(x)];
      for (int c = 0; c < ch; ++c) {
        const double top = img.at(tx.i0, ty.i0, c) +
                           tx.t * (img.at(tx.i1, ty.i0, c) - img.at(tx.i0, ty.i0, c));
        const double bottom = img.at(tx.i0, ty.i1, c) +
                              tx.t * (img.at(tx.i1, ty.i1, c) - img.at(tx.i0, ty.i1, c));
        out.at(x, y, c) = round_to_u8(top + ty.t * (bottom - top));
      }
    }
  }
  return out;
}

Image normalize_face(const Image& img, const FaceBox& box) {
  return resize_bilinear(crop(img, box), kNormalizedFaceSize, kNormalizedFaceSize);
}

}  // namespace chromatex
