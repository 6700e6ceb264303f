#include "chromatex/pnm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "chromatex/error.hpp"

namespace chromatex {

std::vector<std::uint8_t> encode_pnm(const Image& img) {
  if (img.space() != ColorSpace::RGB && img.space() != ColorSpace::Gray) {
    fail(ErrorCode::InvalidColorSpace, "PNM export supports only rgb and gray images");
  }
  const std::string header = std::string(img.space() == ColorSpace::RGB ? "P6" : "P5") + "\n" +
                             std::to_string(img.width()) + " " + std::to_string(img.height()) +
                             "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data().begin(), img.data().end());
  return out;
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string tok;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) {
      tok.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (tok.empty()) fail(ErrorCode::FormatError, "truncated PNM header");
    return tok;
  }

  int integer() {
    const std::string tok = token();
    int value = 0;
    for (char c : tok) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        fail(ErrorCode::FormatError, "invalid PNM header field '" + tok + "'");
      }
      value = value * 10 + (c - '0');
      if (value > 1 << 20) fail(ErrorCode::FormatError, "PNM dimension too large");
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      fail(ErrorCode::FormatError, "missing separator before PNM raster");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image decode_pnm(const std::vector<std::uint8_t>& bytes) {
  HeaderReader reader(bytes);
  const std::string magic = reader.token();
  ColorSpace space;
  if (magic == "P6") {
    space = ColorSpace::RGB;
  } else if (magic == "P5") {
    space = ColorSpace::Gray;
  } else {
    fail(ErrorCode::FormatError, "unsupported PNM magic '" + magic + "'");
  }
  const int width = reader.integer();
  const int height = reader.integer();
  const int maxval = reader.integer();
  if (maxval != 255) fail(ErrorCode::FormatError, "only maxval 255 is supported");
  const std::size_t offset = reader.raster_offset();
  const std::size_t expected = static_cast<std::size_t>(width) * height * channel_count(space);
  if (bytes.size() < offset + expected) fail(ErrorCode::FormatError, "truncated PNM raster");
  std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(offset + expected));
  return Image(width, height, space, std::move(data));
}

void write_pnm(const std::filesystem::path& path, const Image& img) {
  const auto bytes = encode_pnm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_pnm(bytes);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace chromatex
