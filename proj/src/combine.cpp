#include "napood/combine.hpp"

#include <algorithm>
#include <cmath>

#include "napood/errors.hpp"

namespace napood {

double combine_geometric(double s_base, double s_nap, const CombineConfig& cfg) {
  if (!(cfg.w >= 0.0 && cfg.w <= 1.0)) throw ArgumentError("combination weight w must lie in [0, 1]");
  if (!(cfg.floor > 0.0) || !std::isfinite(cfg.floor)) {
    throw ArgumentError("combination floor must be a positive finite value");
  }
  if (!std::isfinite(s_base) || !std::isfinite(s_nap)) throw DataError("non-finite score to combine");
  if (s_nap < 0.0) throw ArgumentError("NAP score must be >= 0");

  const double base = std::max(s_base, cfg.floor);
  const double nap = std::max(s_nap, cfg.floor);
  if (cfg.w == 1.0) return base;
  if (cfg.w == 0.0) return nap;
  return std::exp(cfg.w * std::log(base) + (1.0 - cfg.w) * std::log(nap));
}

double combine_multilayer(std::span<const double> scores) {
  if (scores.empty()) throw ArgumentError("multi-layer combination needs at least one score");
  double product = 1.0;
  for (double s : scores) {
    if (!std::isfinite(s)) throw DataError("non-finite layer score");
    if (s < 0.0) throw ArgumentError("layer scores must be >= 0");
    product *= s;
  }
  return product;
}

}  // namespace napood
