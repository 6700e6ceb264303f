#include "chromatex/temporal.hpp"

#include <cmath>

#include "chromatex/error.hpp"

namespace chromatex {

namespace {
constexpr double kTimeEps = 1e-9;
}

double FrameSequence::duration() const {
  if (frames.empty()) return 0.0;
  const double tail = fps > 0.0 ? 1.0 / fps : 0.0;
  return frames.back().timestamp - frames.front().timestamp + tail;
}

void FrameSequence::validate() const {
  if (frames.empty()) fail(ErrorCode::EmptySequence, "video '" + video_id + "' has no frames");
  if (!(fps > 0.0)) fail(ErrorCode::InvalidArgument, "video '" + video_id + "' has fps <= 0");
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (!(frames[i].timestamp > frames[i - 1].timestamp)) {
      fail(ErrorCode::InvalidArgument,
           "video '" + video_id + "' timestamps are not strictly increasing");
    }
    if (!same_stamp(frames[i].descriptor, frames[0].descriptor)) {
      fail(ErrorCode::DimMismatch, "video '" + video_id + "' mixes descriptor layouts");
    }
  }
}

void WindowSpec::validate() const {
  if (!(length > 0.0) || !(stride > 0.0) || stride > length + kTimeEps) {
    fail(ErrorCode::InvalidArgument, "window spec requires 0 < stride <= length");
  }
}

std::vector<FrameRange> make_windows(const FrameSequence& seq, const WindowSpec& spec) {
  seq.validate();
  spec.validate();
  const double t0 = seq.frames.front().timestamp;
  const double duration = seq.duration();
  if (duration + kTimeEps < spec.length) return {FrameRange{0, seq.frames.size()}};

  std::vector<FrameRange> out;
  const auto count = static_cast<std::size_t>(std::floor((duration - spec.length) / spec.stride + kTimeEps)) + 1;
  std::size_t first = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double start = k * spec.stride;
    const double stop = start + spec.length;
    while (first < seq.frames.size() && seq.frames[first].timestamp - t0 < start - kTimeEps) ++first;
    std::size_t last = first;
    while (last < seq.frames.size() && seq.frames[last].timestamp - t0 < stop - kTimeEps) ++last;
    if (last > first) out.push_back(FrameRange{first, last});
    if (spec.mode == WindowMode::TestFirstWindow) break;
  }
  if (out.empty()) out.push_back(FrameRange{0, seq.frames.size()});
  return out;
}

Descriptor average_window(const FrameSequence& seq, FrameRange range) {
  if (range.begin >= range.end || range.end > seq.frames.size()) {
    fail(ErrorCode::InvalidArgument, "empty or out-of-range frame window");
  }
  Descriptor out = seq.frames[range.begin].descriptor;
  for (std::size_t i = range.begin + 1; i < range.end; ++i) {
    const Descriptor& d = seq.frames[i].descriptor;
    if (!same_stamp(d, out)) fail(ErrorCode::DimMismatch, "window mixes descriptor layouts");
    for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += d.values[j];
  }
  const double n = static_cast<double>(range.size());
  if (range.size() > 1) {
    for (double& v : out.values) v /= n;
  }
  return out;
}

}  // namespace chromatex
