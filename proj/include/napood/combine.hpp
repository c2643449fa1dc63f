#pragma once

#include <span>

namespace napood {

inline constexpr double kDefaultCombineFloor = 1e-12;

struct CombineConfig {
  /// Exponent on the base score; 1 - w goes to the NAP score.
  double w = 0.5;
  /// Bases at or below this are clamped before the fractional power.
  double floor = kDefaultCombineFloor;
};

/// Weighted geometric mean max(base, floor)^w * max(nap, floor)^(1 - w),
/// evaluated in the log domain. The endpoints w = 1 and w = 0 return the
/// clamped base and clamped NAP score unchanged.
double combine_geometric(double s_base, double s_nap, const CombineConfig& cfg);

/// Product of per-layer scores.
double combine_multilayer(std::span<const double> scores);

}  // namespace napood
