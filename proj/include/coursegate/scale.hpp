#pragma once

#include "coursegate/module_meta.hpp"

namespace coursegate {

// Upper bounds (inclusive) of each duration class, in minutes.
inline constexpr std::int64_t kNanoMaxMinutes = 30;
inline constexpr std::int64_t kMicroMaxMinutes = 8 * Duration::kMinutesPerHour;
inline constexpr std::int64_t kMiniMaxMinutes = 14 * Duration::kMinutesPerDay;
// Longer than this is still macro, but flagged OVERSIZE.
inline constexpr std::int64_t kMacroMaxMinutes = 6 * Duration::kMinutesPerMonth;

// Total classification: the gaps between the published ranges fall to the
// smaller neighbouring level's upper bound rule.
ScaleLevel classify_scale(Duration d) noexcept;

struct ScaleClassification {
  ScaleLevel level;
  bool oversize;
};

ScaleClassification classify_scale_checked(Duration d) noexcept;

}  // namespace coursegate
