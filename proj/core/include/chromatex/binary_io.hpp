#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace chromatex {

// Little-endian primitives shared by the descriptor and model file formats.

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void magic(const char (&tag)[5]);
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(const std::string& s);
  void f64s(std::span<const double> values);

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string context) : in_(in), context_(std::move(context)) {}

  /// Throws FormatError if the next four bytes differ from `tag`.
  void expect_magic(const char (&tag)[5]);
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();
  std::vector<double> f64s(std::size_t count);

  [[noreturn]] void corrupt(const std::string& what) const;

 private:
  void read(void* dst, std::size_t n);

  std::istream& in_;
  std::string context_;
};

}  // namespace chromatex
