#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "napood/combine.hpp"
#include "napood/metrics.hpp"

namespace napood {

/// Base and NAP scores for ID and pseudo-OOD (corrupted ID) samples. Within
/// each set the two score lists are matched by sample_id.
struct TuneInput {
  std::vector<ScoredSample> id_base;
  std::vector<ScoredSample> id_nap;
  std::vector<ScoredSample> pseudo_base;
  std::vector<ScoredSample> pseudo_nap;
};

struct TuneOptions {
  std::size_t iters = 30;
  std::size_t grid_points = 11;
  double floor = kDefaultCombineFloor;
};

struct TuneResult {
  double w = 0.5;
  double auroc = 0.0;
  std::size_t evaluations = 0;
};

/// Base/NAP scores paired per sample, ordered by sample_id.
struct PairedScores {
  std::vector<double> base;
  std::vector<double> nap;
};

/// Throws DataError when the two lists do not cover the same sample ids.
PairedScores pair_by_id(const std::vector<ScoredSample>& base, const std::vector<ScoredSample>& nap);

/// AUROC of the weighted geometric combination at weight w, ID vs pseudo-OOD.
double combined_auroc(const PairedScores& id, const PairedScores& pseudo, double w,
                      double floor = kDefaultCombineFloor);

/// Maximizes combined_auroc over w in [0, 1].
///
/// A uniform grid is scanned first; golden-section search then refines inside
/// the grid cells adjacent to the grid maximum. The best point over every
/// evaluation is returned; equal objective values prefer the w closest to
/// 0.5, then the smaller w.
TuneResult tune_w(const TuneInput& input, const TuneOptions& opts = {});

/// Weights tuned on corrupted pseudo-OOD data reported for the reference
/// benchmarks ("cifar10", "cifar100", "imagenet") and base methods
/// ("ash", "dice", "energy", "knn", "msp", "react").
std::optional<double> reference_weight(std::string_view method, std::string_view benchmark);

}  // namespace napood
