#pragma once

#include <string>
#include <string_view>

#include "chromatex/descriptor.hpp"

namespace chromatex {

enum class Label { Genuine, Attack };

/// Score polarity: genuine is the positive class everywhere.
constexpr int label_sign(Label l) noexcept { return l == Label::Genuine ? 1 : -1; }
std::string_view label_name(Label l) noexcept;
Label parse_label(std::string_view text);

/// One classifier input: a (window-averaged) descriptor with its video's tags.
struct Sample {
  Descriptor descriptor;
  Label label = Label::Genuine;
  std::string subject_id;
  std::string video_id;
  std::string attack_kind = "none";
  std::string quality = "normal";
  std::string split = "train";
  int window = 0;  // index within the video's training windows
};

}  // namespace chromatex
