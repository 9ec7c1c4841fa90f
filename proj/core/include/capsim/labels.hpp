#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace capsim {

// Activity classes. Enumerator order is the fixed tie-break order used by the
// classifiers and the canonical order of confusion-matrix rows/columns.
enum class ActivityLabel : std::uint8_t {
  Walk = 0,
  Run,
  StairsUp,
  StairsDown,
  Stationary,
};

inline constexpr int kNumActivityLabels = 5;

inline constexpr std::array<ActivityLabel, kNumActivityLabels> kAllActivityLabels = {
    ActivityLabel::Walk,       ActivityLabel::Run,        ActivityLabel::StairsUp,
    ActivityLabel::StairsDown, ActivityLabel::Stationary,
};

std::string_view to_string(ActivityLabel label);

// Parses the short names used in CSV files and CLI schedules (WALK, RUN, SU, SD, ST).
std::optional<ActivityLabel> parse_activity_label(std::string_view text);

inline constexpr int label_index(ActivityLabel label) { return static_cast<int>(label); }

// Which of the two in-sole harvesters a signal belongs to.
enum class PehPosition : std::uint8_t {
  Front = 0,
  Rear,
};

std::string_view to_string(PehPosition position);
std::optional<PehPosition> parse_peh_position(std::string_view text);

}  // namespace capsim
