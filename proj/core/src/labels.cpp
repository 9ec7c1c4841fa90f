#include "capsim/labels.hpp"

namespace capsim {

std::string_view to_string(ActivityLabel label) {
  switch (label) {
    case ActivityLabel::Walk: return "WALK";
    case ActivityLabel::Run: return "RUN";
    case ActivityLabel::StairsUp: return "SU";
    case ActivityLabel::StairsDown: return "SD";
    case ActivityLabel::Stationary: return "ST";
  }
  return "?";
}

std::optional<ActivityLabel> parse_activity_label(std::string_view text) {
  for (ActivityLabel label : kAllActivityLabels) {
    if (text == to_string(label)) return label;
  }
  return std::nullopt;
}

std::string_view to_string(PehPosition position) {
  return position == PehPosition::Front ? "front" : "rear";
}

std::optional<PehPosition> parse_peh_position(std::string_view text) {
  if (text == "front") return PehPosition::Front;
  if (text == "rear") return PehPosition::Rear;
  return std::nullopt;
}

}  // namespace capsim
