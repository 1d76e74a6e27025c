#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

#include "senti/error.hpp"

namespace senti {

// Negative sorts first; several tie-breaks rely on that ordering.
enum class Label { Negative = 0, Positive = 1 };

inline std::string_view to_string(Label label) {
  return label == Label::Positive ? "positive" : "negative";
}

inline Label parse_label(std::string_view text) {
  std::string lowered(text);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "positive") return Label::Positive;
  if (lowered == "negative") return Label::Negative;
  throw Error(ErrorCode::UnknownLabel, std::string(text));
}

inline int as_target(Label label) { return label == Label::Positive ? 1 : 0; }

}  // namespace senti
