#pragma once

#include <algorithm>
#include <array>
#include <string_view>

namespace cais {

/// Names of the per-trace summary metrics that event conditions and
/// indicators may refer to.
inline constexpr std::array<std::string_view, 5> kTraceMetrics = {
    "min_margin", "min_distance", "objects_fallen", "detection_miss_ratio", "collision"};

inline bool is_trace_metric(std::string_view name) {
  return std::find(kTraceMetrics.begin(), kTraceMetrics.end(), name) != kTraceMetrics.end();
}

}  // namespace cais
