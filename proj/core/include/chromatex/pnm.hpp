#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chromatex/image.hpp"

namespace chromatex {

// Binary PPM (P6, RGB) and PGM (P5, Gray) with maxval 255. These are the
// interchange format for frames; byte layout is exact and reproducible.

std::vector<std::uint8_t> encode_pnm(const Image& img);
Image decode_pnm(const std::vector<std::uint8_t>& bytes);

void write_pnm(const std::filesystem::path& path, const Image& img);
Image read_pnm(const std::filesystem::path& path);

}  // namespace chromatex
