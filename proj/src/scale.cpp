#include "coursegate/scale.hpp"

namespace coursegate {

ScaleLevel classify_scale(Duration d) noexcept {
  if (d.minutes <= kNanoMaxMinutes) return ScaleLevel::kNano;
  if (d.minutes <= kMicroMaxMinutes) return ScaleLevel::kMicro;
  if (d.minutes <= kMiniMaxMinutes) return ScaleLevel::kMini;
  return ScaleLevel::kMacro;
}

ScaleClassification classify_scale_checked(Duration d) noexcept {
  return {classify_scale(d), d.minutes > kMacroMaxMinutes};
}

}  // namespace coursegate
