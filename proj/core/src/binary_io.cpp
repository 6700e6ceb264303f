#include "chromatex/binary_io.hpp"

#include <array>
#include <bit>
#include <cstring>

#include "chromatex/error.hpp"

namespace chromatex {

namespace {

template <typename T>
std::array<char, sizeof(T)> to_le(T v) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  }
  return bytes;
}

template <typename T>
T from_le(const unsigned char* bytes) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[i]) << (8 * i);
  return v;
}

constexpr std::uint32_t kMaxString = 1u << 20;

}  // namespace

void BinaryWriter::magic(const char (&tag)[5]) { out_.write(tag, 4); }

void BinaryWriter::u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }

void BinaryWriter::u32(std::uint32_t v) {
  const auto b = to_le(v);
  out_.write(b.data(), b.size());
}

void BinaryWriter::u64(std::uint64_t v) {
  const auto b = to_le(v);
  out_.write(b.data(), b.size());
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(const std::string& s) {
  u32(static_cast<std::uint32_t>(s.size()));
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::f64s(std::span<const double> values) {
  for (double v : values) f64(v);
}

void BinaryReader::read(void* dst, std::size_t n) {
  in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) corrupt("unexpected end of file");
}

void BinaryReader::corrupt(const std::string& what) const {
  fail(ErrorCode::FormatError, context_ + ": " + what);
}

void BinaryReader::expect_magic(const char (&tag)[5]) {
  char got[4];
  read(got, 4);
  if (std::memcmp(got, tag, 4) != 0) corrupt(std::string("bad magic, expected ") + tag);
}

std::uint8_t BinaryReader::u8() {
  unsigned char b;
  read(&b, 1);
  return b;
}

std::uint32_t BinaryReader::u32() {
  unsigned char b[4];
  read(b, 4);
  return from_le<std::uint32_t>(b);
}

std::uint64_t BinaryReader::u64() {
  unsigned char b[8];
  read(b, 8);
  return from_le<std::uint64_t>(b);
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
  const std::uint32_t n = u32();
  if (n > kMaxString) corrupt("string length out of range");
  std::string s(n, '\0');
  read(s.data(), n);
  return s;
}

std::vector<double> BinaryReader::f64s(std::size_t count) {
  std::vector<double> v(count);
  for (auto& x : v) x = f64();
  return v;
}

}  // namespace chromatex
