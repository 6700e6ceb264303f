#include "chromatex/lbp.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "chromatex/error.hpp"

namespace chromatex {

std::string_view sampling_name(Sampling s) noexcept {
  return s == Sampling::Interpolated ? "interp" : "int";
}

Sampling parse_sampling(std::string_view name) {
  if (name == "interp" || name == "interpolated") return Sampling::Interpolated;
  if (name == "int" || name == "integer") return Sampling::IntegerNeighborhood;
  fail(ErrorCode::InvalidArgument, "unknown sampling mode '" + std::string(name) + "'");
}

void LbpParams::validate() const {
  if (neighbors < 4 || neighbors > 16) {
    fail(ErrorCode::InvalidArgument,
         "LBP neighbor count must be in [4, 16], got " + std::to_string(neighbors));
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    fail(ErrorCode::InvalidArgument, "LBP radius must be positive");
  }
}

int LbpParams::margin() const { return static_cast<int>(std::ceil(radius)); }

namespace {

// One neighbor's bilinear footprint relative to the center pixel.
struct Tap {
  int x0, y0, x1, y1;
  double tx, ty;
};

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < 1e-9 ? r : v;
}

std::vector<Tap> make_taps(const LbpParams& params) {
  std::vector<Tap> taps;
  taps.reserve(static_cast<std::size_t>(params.neighbors));
  for (int n = 0; n < params.neighbors; ++n) {
    const double angle = 2.0 * std::numbers::pi * n / params.neighbors;
    const double dx = snap(params.radius * std::cos(angle));
    const double dy = snap(-params.radius * std::sin(angle));
    Tap t{};
    if (params.sampling == Sampling::IntegerNeighborhood) {
      t.x0 = t.x1 = static_cast<int>(std::lround(dx));
      t.y0 = t.y1 = static_cast<int>(std::lround(dy));
    } else {
      t.x0 = static_cast<int>(std::floor(dx));
      t.y0 = static_cast<int>(std::floor(dy));
      t.tx = dx - t.x0;
      t.ty = dy - t.y0;
      t.x1 = t.tx > 0.0 ? t.x0 + 1 : t.x0;
      t.y1 = t.ty > 0.0 ? t.y0 + 1 : t.y0;
    }
    taps.push_back(t);
  }
  return taps;
}

void require_interior(const ChannelView& channel, int x, int y, int margin) {
  if (x < margin || y < margin || x >= channel.width - margin || y >= channel.height - margin) {
    fail(ErrorCode::BorderViolation, "pixel (" + std::to_string(x) + "," + std::to_string(y) +
                                         ") is closer than " + std::to_string(margin) +
                                         " px to the border");
  }
}

}  // namespace

std::vector<double> sample_neighbors(const ChannelView& channel, int x, int y,
                                     const LbpParams& params) {
  params.validate();
  require_interior(channel, x, y, params.margin());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(params.neighbors));
  for (const Tap& t : make_taps(params)) {
    const double v00 = channel(x + t.x0, y + t.y0);
    const double v10 = channel(x + t.x1, y + t.y0);
    const double v01 = channel(x + t.x0, y + t.y1);
    const double v11 = channel(x + t.x1, y + t.y1);
    const double top = v00 + t.tx * (v10 - v00);
    const double bottom = v01 + t.tx * (v11 - v01);
    out.push_back(top + t.ty * (bottom - top));
  }
  return out;
}

int circular_transitions(std::uint32_t code, int neighbors) noexcept {
  const std::uint32_t mask = neighbors >= 32 ? ~0u : ((1u << neighbors) - 1u);
  const std::uint32_t rotated = ((code >> 1) | (code << (neighbors - 1))) & mask;
  return std::popcount((code ^ rotated) & mask);
}

LbpCode lbp_code(double center, std::span<const double> neighbors) {
  LbpCode out;
  for (std::size_t n = 0; n < neighbors.size(); ++n) {
    if (neighbors[n] - center >= -kThresholdEpsilon) out.code |= 1u << n;
  }
  out.transitions = circular_transitions(out.code, static_cast<int>(neighbors.size()));
  return out;
}

UniformTable::UniformTable(int neighbors) : neighbors_(neighbors) {
  if (neighbors < 4 || neighbors > 16) {
    fail(ErrorCode::InvalidArgument, "uniform table supports 4..16 neighbors");
  }
  const std::uint32_t codes = 1u << neighbors;
  lut_.assign(codes, 0);
  for (std::uint32_t code = 0; code < codes; ++code) {
    if (circular_transitions(code, neighbors) <= 2) {
      lut_[code] = static_cast<std::uint16_t>(uniform_count_++);
    }
  }
  if (uniform_count_ != neighbors * (neighbors - 1) + 2) {
    fail(ErrorCode::InvalidArgument, "uniform pattern census mismatch");
  }
  for (std::uint32_t code = 0; code < codes; ++code) {
    if (circular_transitions(code, neighbors) > 2) {
      lut_[code] = static_cast<std::uint16_t>(uniform_count_);
    }
  }
}

const UniformTable& UniformTable::get(int neighbors) {
  if (neighbors < 4 || neighbors > 16) {
    fail(ErrorCode::InvalidArgument, "uniform table supports 4..16 neighbors");
  }
  static std::array<std::once_flag, 17> once;
  static std::array<std::unique_ptr<UniformTable>, 17> tables;
  const auto idx = static_cast<std::size_t>(neighbors);
  std::call_once(once[idx], [&] { tables[idx] = std::make_unique<UniformTable>(neighbors); });
  return *tables[idx];
}

int uniform_bin(std::uint32_t code, int neighbors) {
  if (neighbors < 32 && code >= (1u << neighbors)) {
    fail(ErrorCode::InvalidArgument, "code " + std::to_string(code) + " exceeds 2^P - 1");
  }
  return UniformTable::get(neighbors).bin(code);
}

std::vector<std::uint64_t> lbp_counts(const ChannelView& channel, const LbpParams& params) {
  params.validate();
  const int m = params.margin();
  if (channel.width < 2 * m + 1 || channel.height < 2 * m + 1) {
    fail(ErrorCode::ImageTooSmall, "channel " + std::to_string(channel.width) + "x" +
                                       std::to_string(channel.height) +
                                       " too small for LBP radius " +
                                       std::to_string(params.radius));
  }
  const UniformTable& table = UniformTable::get(params.neighbors);
  const auto taps = make_taps(params);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(table.bin_count()), 0);

  const std::uint8_t* base = channel.samples.data();
  const std::ptrdiff_t stride = channel.stride;
  const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(channel.width) * stride;

  // Per-tap sample offsets relative to the center pointer.
  struct Flat {
    std::ptrdiff_t o00, o10, o01, o11;
    double tx, ty;
    bool exact;  // lands on a pixel center
  };
  std::vector<Flat> flat;
  flat.reserve(taps.size());
  for (const Tap& t : taps) {
    flat.push_back(Flat{t.y0 * row + t.x0 * stride, t.y0 * row + t.x1 * stride,
                        t.y1 * row + t.x0 * stride, t.y1 * row + t.x1 * stride, t.tx, t.ty,
                        t.tx == 0.0 && t.ty == 0.0});
  }

  const bool integer = params.sampling == Sampling::IntegerNeighborhood;
  for (int y = m; y < channel.height - m; ++y) {
    const std::uint8_t* p = base + y * row + m * stride;
    for (int x = m; x < channel.width - m; ++x, p += stride) {
      const int c = *p;
      std::uint32_t code = 0;
      if (integer) {
        for (std::size_t n = 0; n < flat.size(); ++n) {
          code |= static_cast<std::uint32_t>(p[flat[n].o00] >= c) << n;
        }
      } else {
        for (std::size_t n = 0; n < flat.size(); ++n) {
          const Flat& f = flat[n];
          if (f.exact) {
            code |= static_cast<std::uint32_t>(p[f.o00] >= c) << n;
            continue;
          }
          // Interpolate differences to the center so flat regions give an
          // exact zero.
          const double d00 = p[f.o00] - c;
          const double d10 = p[f.o10] - c;
          const double d01 = p[f.o01] - c;
          const double d11 = p[f.o11] - c;
          const double top = d00 + f.tx * (d10 - d00);
          const double bottom = d01 + f.tx * (d11 - d01);
          const double diff = top + f.ty * (bottom - top);
          code |= static_cast<std::uint32_t>(diff >= -kThresholdEpsilon) << n;
        }
      }
      ++counts[table.bin(code)];
    }
  }
  return counts;
}

std::vector<double> lbp_histogram(const ChannelView& channel, const LbpParams& params) {
  const auto counts = lbp_counts(channel, params);
  std::uint64_t total = 0;
  for (auto v : counts) total += v;
  std::vector<double> hist(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    hist[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return hist;
}

}  // namespace chromatex
