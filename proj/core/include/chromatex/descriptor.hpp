#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "chromatex/image.hpp"
#include "chromatex/lbp.hpp"

namespace chromatex {

/// Provenance of one contiguous histogram inside a descriptor.
struct Segment {
  ColorSpace space = ColorSpace::Gray;
  int channel = 0;
  int bins = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Concatenated per-channel LBP histograms plus the record of where each
/// segment came from. `params` is the extraction stamp; descriptors with
/// different stamps are never compared.
struct Descriptor {
  std::vector<double> values;
  std::vector<Segment> layout;
  LbpParams params;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty() && layout.empty(); }

  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

/// Same extraction params and identical layout.
bool same_stamp(const Descriptor& a, const Descriptor& b) noexcept;

/// "gray", "ycbcr", "ycbcr+hsv", ... derived from the layout.
std::string layout_name(const std::vector<Segment>& layout);

/// Which color spaces to extract and concatenate, e.g. {YCbCr, HSV}.
struct DescriptorSpec {
  std::vector<ColorSpace> spaces;

  std::string name() const;
  /// Parses "ycbcr" or "ycbcr+hsv".
  static DescriptorSpec parse(std::string_view text);

  friend bool operator==(const DescriptorSpec&, const DescriptorSpec&) = default;
};

/// Converts `img` (RGB, or already in `target`) and concatenates the
/// per-channel uniform LBP histograms in channel order.
Descriptor color_lbp_descriptor(const Image& img, ColorSpace target, const LbpParams& params);

/// Concatenates values and layouts. An empty operand is the identity;
/// otherwise both must share LbpParams.
Descriptor fuse_descriptors(const Descriptor& a, const Descriptor& b);

Descriptor extract_descriptor(const Image& img, const DescriptorSpec& spec,
                              const LbpParams& params);

// Versioned binary form: "CTXD", version, params, layout, then the values
// as little-endian IEEE-754 doubles.
inline constexpr std::uint32_t kDescriptorFormatVersion = 1;

void write_descriptor(std::ostream& out, const Descriptor& d);
Descriptor read_descriptor(std::istream& in);

// Header fragment shared with the descriptor-set and model formats.
class BinaryWriter;
class BinaryReader;
void write_stamp(BinaryWriter& w, const LbpParams& params, const std::vector<Segment>& layout);
void read_stamp(BinaryReader& r, LbpParams& params, std::vector<Segment>& layout);

/// Debug export: one "space,channel,bin,value" row per value.
std::string descriptor_csv(const Descriptor& d);

}  // namespace chromatex
