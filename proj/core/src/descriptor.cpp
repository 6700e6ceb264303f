#include "chromatex/descriptor.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include "chromatex/binary_io.hpp"
#include "chromatex/error.hpp"

namespace chromatex {

bool same_stamp(const Descriptor& a, const Descriptor& b) noexcept {
  return a.params == b.params && a.layout == b.layout;
}

std::string layout_name(const std::vector<Segment>& layout) {
  std::string name;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].channel != 0) continue;
    if (!name.empty()) name += '+';
    name += color_space_name(layout[i].space);
  }
  return name.empty() ? "empty" : name;
}

std::string DescriptorSpec::name() const {
  std::string out;
  for (ColorSpace s : spaces) {
    if (!out.empty()) out += '+';
    out += color_space_name(s);
  }
  return out;
}

DescriptorSpec DescriptorSpec::parse(std::string_view text) {
  DescriptorSpec spec;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t plus = text.find('+', start);
    const auto part = text.substr(start, plus == std::string_view::npos ? text.npos : plus - start);
    spec.spaces.push_back(parse_color_space(part));
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return spec;
}

Descriptor color_lbp_descriptor(const Image& img, ColorSpace target, const LbpParams& params) {
  params.validate();
  const Image converted = convert(img, target);
  Descriptor d;
  d.params = params;
  for (int c = 0; c < converted.channels(); ++c) {
    const auto hist = lbp_histogram(converted.channel(c), params);
    d.values.insert(d.values.end(), hist.begin(), hist.end());
    d.layout.push_back(Segment{target, c, static_cast<int>(hist.size())});
  }
  return d;
}

Descriptor fuse_descriptors(const Descriptor& a, const Descriptor& b) {
  if (b.empty()) return a;
  if (a.empty()) return b;
  if (!(a.params == b.params)) {
    fail(ErrorCode::DimMismatch, "cannot fuse descriptors extracted with different LBP params");
  }
  Descriptor out = a;
  out.values.insert(out.values.end(), b.values.begin(), b.values.end());
  out.layout.insert(out.layout.end(), b.layout.begin(), b.layout.end());
  return out;
}

Descriptor extract_descriptor(const Image& img, const DescriptorSpec& spec,
                              const LbpParams& params) {
  if (spec.spaces.empty()) fail(ErrorCode::InvalidArgument, "descriptor spec names no space");
  Descriptor out;
  for (ColorSpace s : spec.spaces) {
    out = fuse_descriptors(out, color_lbp_descriptor(img, s, params));
  }
  return out;
}

void write_stamp(BinaryWriter& w, const LbpParams& params, const std::vector<Segment>& layout) {
  w.u32(static_cast<std::uint32_t>(params.neighbors));
  w.f64(params.radius);
  w.u8(static_cast<std::uint8_t>(params.sampling));
  w.u32(static_cast<std::uint32_t>(layout.size()));
  for (const Segment& s : layout) {
    w.u8(static_cast<std::uint8_t>(s.space));
    w.u8(static_cast<std::uint8_t>(s.channel));
    w.u32(static_cast<std::uint32_t>(s.bins));
  }
}

void read_stamp(BinaryReader& r, LbpParams& params, std::vector<Segment>& layout) {
  params.neighbors = static_cast<int>(r.u32());
  params.radius = r.f64();
  const std::uint8_t sampling = r.u8();
  if (sampling > 1) r.corrupt("unknown sampling mode");
  params.sampling = static_cast<Sampling>(sampling);
  try {
    params.validate();
  } catch (const Error& e) {
    r.corrupt(e.what());
  }
  const std::uint32_t segments = r.u32();
  if (segments > 4096) r.corrupt("segment count out of range");
  layout.clear();
  for (std::uint32_t i = 0; i < segments; ++i) {
    Segment s;
    const std::uint8_t space = r.u8();
    if (space > 3) r.corrupt("unknown color space tag");
    s.space = static_cast<ColorSpace>(space);
    s.channel = r.u8();
    s.bins = static_cast<int>(r.u32());
    if (s.bins <= 0 || s.bins > 1 << 16) r.corrupt("segment bin count out of range");
    layout.push_back(s);
  }
}

void write_descriptor(std::ostream& out, const Descriptor& d) {
  BinaryWriter w(out);
  w.magic("CTXD");
  w.u32(kDescriptorFormatVersion);
  write_stamp(w, d.params, d.layout);
  w.u64(d.values.size());
  w.f64s(d.values);
}

Descriptor read_descriptor(std::istream& in) {
  BinaryReader r(in, "descriptor");
  r.expect_magic("CTXD");
  if (r.u32() != kDescriptorFormatVersion) r.corrupt("unsupported descriptor version");
  Descriptor d;
  read_stamp(r, d.params, d.layout);
  std::size_t expected = 0;
  for (const Segment& s : d.layout) expected += static_cast<std::size_t>(s.bins);
  const std::uint64_t n = r.u64();
  if (n != expected) r.corrupt("value count does not match layout");
  d.values = r.f64s(n);
  return d;
}

std::string descriptor_csv(const Descriptor& d) {
  std::string out = "space,channel,bin,value\n";
  std::size_t offset = 0;
  char buf[64];
  for (const Segment& s : d.layout) {
    for (int b = 0; b < s.bins; ++b) {
      std::snprintf(buf, sizeof buf, ",%d,%d,%.17g\n", s.channel, b, d.values[offset + b]);
      out += color_space_name(s.space);
      out += buf;
    }
    offset += static_cast<std::size_t>(s.bins);
  }
  return out;
}

}  // namespace chromatex
