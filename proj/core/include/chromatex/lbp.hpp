#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "chromatex/image.hpp"

namespace chromatex {

enum class Sampling : std::uint8_t {
  /// Bilinear samples on the circle; compared to the center as reals.
  Interpolated = 0,
  /// Neighbor coordinates rounded to the nearest pixel (3x3 for P=8, R=1).
  IntegerNeighborhood = 1,
};

std::string_view sampling_name(Sampling s) noexcept;
/// Accepts "interp" / "interpolated" and "int" / "integer".
Sampling parse_sampling(std::string_view name);

/// Circular neighborhood: `neighbors` points on a circle of `radius` pixels.
/// Neighbor n sits at angle 2*pi*n/P, starting east and running
/// counter-clockwise on screen (y grows downward, so its offset is
/// (R cos a, -R sin a)); it contributes bit 2^n to the code.
struct LbpParams {
  int neighbors = 8;
  double radius = 1.0;
  Sampling sampling = Sampling::Interpolated;

  /// Throws InvalidArgument unless 4 <= P <= 16 and R > 0.
  void validate() const;
  /// Pixels excluded at each border: ceil(R).
  int margin() const;
  /// P(P-1)+2 uniform bins plus one catch-all.
  int bin_count() const { return neighbors * (neighbors - 1) + 3; }

  friend bool operator==(const LbpParams&, const LbpParams&) = default;
};

/// Real-valued differences inside this band count as zero, so they set the
/// bit. Interpolation weights are irrational for the diagonal taps and any
/// genuine non-zero difference of 8-bit samples is orders of magnitude
/// larger.
inline constexpr double kThresholdEpsilon = 1e-9;

struct LbpCode {
  std::uint32_t code = 0;
  int transitions = 0;  // circular 0/1 changes (uniformity measure U)

  friend bool operator==(const LbpCode&, const LbpCode&) = default;
};

std::vector<double> sample_neighbors(const ChannelView& channel, int x, int y,
                                     const LbpParams& params);

/// Thresholds each neighbor against the center (bit set iff r_n - r_c >= 0)
/// and counts circular transitions.
LbpCode lbp_code(double center, std::span<const double> neighbors);

/// Number of circular 0/1 transitions of the low `neighbors` bits of `code`.
int circular_transitions(std::uint32_t code, int neighbors) noexcept;

/// Maps codes to histogram bins: uniform codes (U <= 2) take consecutive
/// bins in ascending code order; every other code shares the last bin.
class UniformTable {
 public:
  /// Shared, lazily built, read-only table for P neighbors.
  static const UniformTable& get(int neighbors);

  explicit UniformTable(int neighbors);

  int neighbors() const noexcept { return neighbors_; }
  int uniform_count() const noexcept { return uniform_count_; }
  int catch_all_bin() const noexcept { return uniform_count_; }
  int bin_count() const noexcept { return uniform_count_ + 1; }
  std::uint16_t bin(std::uint32_t code) const noexcept { return lut_[code]; }

 private:
  int neighbors_;
  int uniform_count_ = 0;
  std::vector<std::uint16_t> lut_;
};

int uniform_bin(std::uint32_t code, int neighbors);

/// Unnormalized code counts over all pixels at least margin() from the
/// border. Throws ImageTooSmall when no such pixel exists.
std::vector<std::uint64_t> lbp_counts(const ChannelView& channel, const LbpParams& params);

/// lbp_counts L1-normalized to sum 1.
std::vector<double> lbp_histogram(const ChannelView& channel, const LbpParams& params);

}  // namespace chromatex
