#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "napood/head.hpp"
#include "napood/manifest.hpp"

namespace napood {

inline constexpr double kDefaultReactPercentile = 90.0;
inline constexpr double kDefaultAshKeepPercent = 10.0;
inline constexpr double kDefaultDiceSparsity = 0.7;
inline constexpr std::size_t kDefaultKnnK = 50;
inline constexpr std::size_t kDefaultBankSize = 50000;

/// Row-major bank of unit-norm ID features.
struct FeatureBank {
  std::size_t dim = 0;
  std::vector<double> rows;

  std::size_t size() const noexcept { return dim == 0 ? 0 : rows.size() / dim; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(rows).subspan(i * dim, dim);
  }
};

struct CalibrationStats {
  double react_threshold = 0.0;
  std::vector<double> mean_feature;
  FeatureBank feature_bank;
};

struct CalibrationOptions {
  double react_percentile = kDefaultReactPercentile;
  std::size_t bank_size = kDefaultBankSize;
};

/// Order statistic at index ceil((N - 1) * percent / 100) of the sorted values.
double percentile_higher(std::vector<double> values, double percent);

/// Calibrates from a list of ID pooled features (all of equal length).
CalibrationStats calibrate_features(std::span<const std::vector<double>> id_features,
                                    const CalibrationOptions& opts = {});

/// Uses the records labelled `id`; each must carry a feature of length head.features().
CalibrationStats calibrate(const Dataset& id_data, const ClassifierHead& head,
                           const CalibrationOptions& opts = {});

/// Clips the feature at the ReAct threshold, re-applies the head, returns energy.
double react_score(std::span<const double> feature, const ClassifierHead& head,
                   const CalibrationStats& stats);

enum class AshVariant {
  Prune,
  Scale,
};

/// Keeps the top ceil(keep_percent * C / 100) entries (lower index wins ties)
/// and zeroes the rest; Scale multiplies survivors by exp(sum_before / sum_after).
std::vector<double> ash_transform(std::span<const double> feature, double keep_percent,
                                  AshVariant variant);

double ash_score(std::span<const double> feature, const ClassifierHead& head,
                 double keep_percent = kDefaultAshKeepPercent, AshVariant variant = AshVariant::Scale);

enum class DiceMasking {
  PerClass,
  Global,
};

/// Classifier head with DICE weight sparsification precomputed.
///
/// Contributions v_k = w_k * mean_feature decide which weights survive: the
/// top ceil((1 - sparsity) * C) per class row, or of all K*C entries when
/// masking is Global.
class DiceHead {
 public:
  DiceHead(const ClassifierHead& head, const CalibrationStats& stats, double sparsity,
           DiceMasking masking = DiceMasking::PerClass);

  std::vector<double> logits(std::span<const double> feature) const;
  double score(std::span<const double> feature) const;

  /// 1 where the weight is kept, row-major K x C.
  const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }

 private:
  ClassifierHead masked_;
  std::vector<std::uint8_t> mask_;
};

double dice_score(std::span<const double> feature, const ClassifierHead& head,
                  const CalibrationStats& stats, double sparsity = kDefaultDiceSparsity,
                  DiceMasking masking = DiceMasking::PerClass);

/// Negative Euclidean distance from the unit-normalized feature to its k-th
/// nearest bank row.
double knn_score(std::span<const double> feature, const CalibrationStats& stats,
                 std::size_t k = kDefaultKnnK);

}  // namespace napood
