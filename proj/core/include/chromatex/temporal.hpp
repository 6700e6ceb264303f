#pragma once

#include <string>
#include <vector>

#include "chromatex/descriptor.hpp"

namespace chromatex {

struct TimedDescriptor {
  double timestamp = 0.0;  // seconds
  Descriptor descriptor;
};

/// Per-frame descriptors of one video, timestamps strictly increasing.
struct FrameSequence {
  std::string video_id;
  double fps = 0.0;
  std::vector<TimedDescriptor> frames;

  /// Span from the first frame to the end of the last frame's interval.
  double duration() const;
  /// Throws on empty input, non-increasing timestamps or mixed layouts.
  void validate() const;
};

enum class WindowMode {
  TrainAllWindows,  // every full window, stepping by the stride
  TestFirstWindow,  // only the window starting at the first frame
};

struct WindowSpec {
  double length = 3.0;  // seconds
  double stride = 1.0;  // seconds; length minus overlap
  WindowMode mode = WindowMode::TrainAllWindows;

  void validate() const;
};

/// Half-open range of frame indices.
struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

/// Windows start at the first frame's time and advance by the stride; only
/// windows that fit within the duration are emitted. A video shorter than
/// one window yields a single window over all its frames.
std::vector<FrameRange> make_windows(const FrameSequence& seq, const WindowSpec& spec);

/// Element-wise mean of the descriptors in `range`.
Descriptor average_window(const FrameSequence& seq, FrameRange range);

}  // namespace chromatex
