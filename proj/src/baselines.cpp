#include "napood/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "napood/errors.hpp"
#include "napood/scoring.hpp"

namespace napood {
namespace {

// ceil(fraction * n) with a small snap so that e.g. 0.3 * 10 keeps 3, not 4.
std::size_t keep_count(double fraction, std::size_t n) {
  const double x = fraction * static_cast<double>(n);
  const double r = std::round(x);
  const double c = std::abs(x - r) < 1e-9 ? r : std::ceil(x);
  return std::clamp<std::size_t>(static_cast<std::size_t>(c), 1, n);
}

// Indices of the `keep` largest values; equal values prefer the lower index.
std::vector<std::size_t> top_indices(std::span<const double> values, std::size_t keep) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return values[a] > values[b] || (values[a] == values[b] && a < b);
                    });
  idx.resize(keep);
  return idx;
}

void check_feature(std::span<const double> feature, std::size_t expected) {
  if (feature.size() != expected) {
    throw DataError("feature length " + std::to_string(feature.size()) + " does not match C=" +
                    std::to_string(expected));
  }
  for (double v : feature) {
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  }
}

}  // namespace

double percentile_higher(std::vector<double> values, double percent) {
  if (values.empty()) throw ArgumentError("percentile of an empty set");
  if (!(percent > 0.0 && percent < 100.0)) {
    throw ArgumentError("percentile must lie in (0, 100)");
  }
  const double pos = static_cast<double>(values.size() - 1) * percent / 100.0;
  const double r = std::round(pos);
  const auto index = static_cast<std::size_t>(std::abs(pos - r) < 1e-9 ? r : std::ceil(pos));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(index), values.end());
  return values[index];
}

CalibrationStats calibrate_features(std::span<const std::vector<double>> id_features,
                                    const CalibrationOptions& opts) {
  if (id_features.empty()) throw DataError("calibration needs at least one ID feature");
  if (opts.bank_size == 0) throw ArgumentError("bank_size must be >= 1");
  const std::size_t dim = id_features.front().size();
  if (dim == 0) throw DataError("ID features are empty");

  CalibrationStats stats;
  stats.mean_feature.assign(dim, 0.0);
  std::vector<double> pooled;
  pooled.reserve(id_features.size() * dim);
  for (const auto& f : id_features) {
    check_feature(f, dim);
    for (std::size_t c = 0; c < dim; ++c) stats.mean_feature[c] += f[c];
    pooled.insert(pooled.end(), f.begin(), f.end());
  }
  for (auto& m : stats.mean_feature) m /= static_cast<double>(id_features.size());

  stats.react_threshold = percentile_higher(std::move(pooled), opts.react_percentile);
  if (!(stats.react_threshold > 0.0)) {
    throw DataError("ReAct threshold at the requested percentile is not positive");
  }

  const std::size_t bank_rows = std::min(opts.bank_size, id_features.size());
  stats.feature_bank.dim = dim;
  stats.feature_bank.rows.reserve(bank_rows * dim);
  for (std::size_t i = 0; i < bank_rows; ++i) {
    const auto& f = id_features[i];
    double norm = 0.0;
    for (double v : f) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw DataError("cannot normalize an all-zero ID feature for the KNN bank");
    for (double v : f) stats.feature_bank.rows.push_back(v / norm);
  }
  return stats;
}

CalibrationStats calibrate(const Dataset& id_data, const ClassifierHead& head,
                           const CalibrationOptions& opts) {
  std::vector<std::vector<double>> features;
  for (const auto* r : id_data.with_label(SampleLabel::Id)) {
    if (!r->feature) {
      throw DataError("ID sample '" + r->sample_id + "' has no pooled feature");
    }
    if (r->feature->size() != head.features()) {
      throw DataError("ID sample '" + r->sample_id + "' feature length does not match head C");
    }
    features.push_back(*r->feature);
  }
  return calibrate_features(features, opts);
}

double react_score(std::span<const double> feature, const ClassifierHead& head,
                   const CalibrationStats& stats) {
  check_feature(feature, head.features());
  std::vector<double> clipped(feature.begin(), feature.end());
  for (auto& v : clipped) v = std::min(v, stats.react_threshold);
  return energy_score(head.logits(clipped));
}

std::vector<double> ash_transform(std::span<const double> feature, double keep_percent,
                                  AshVariant variant) {
  if (!(keep_percent > 0.0 && keep_percent <= 100.0)) {
    throw ArgumentError("ASH keep percent must lie in (0, 100]");
  }
  if (feature.empty()) throw DataError("empty feature");
  const std::size_t keep = keep_count(keep_percent / 100.0, feature.size());
  std::vector<double> out(feature.size(), 0.0);
  double before = 0.0;
  for (double v : feature) before += v;
  double after = 0.0;
  for (std::size_t i : top_indices(feature, keep)) {
    out[i] = feature[i];
    after += feature[i];
  }
  if (variant == AshVariant::Scale && after != 0.0) {
    const double factor = std::exp(before / after);
    for (auto& v : out) v *= factor;
  }
  return out;
}

double ash_score(std::span<const double> feature, const ClassifierHead& head, double keep_percent,
                 AshVariant variant) {
  check_feature(feature, head.features());
  return energy_score(head.logits(ash_transform(feature, keep_percent, variant)));
}

namespace {

ClassifierHead apply_mask(const ClassifierHead& head, const std::vector<std::uint8_t>& mask) {
  std::vector<double> w(head.weights().begin(), head.weights().end());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!mask[i]) w[i] = 0.0;
  }
  return ClassifierHead(head.classes(), head.features(), std::move(w),
                        std::vector<double>(head.bias().begin(), head.bias().end()));
}

std::vector<std::uint8_t> dice_mask(const ClassifierHead& head, const CalibrationStats& stats,
                                    double sparsity, DiceMasking masking) {
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw ArgumentError("DICE sparsity must lie in [0, 1)");
  }
  if (stats.mean_feature.size() != head.features()) {
    throw DataError("DICE needs a calibrated mean feature of length C");
  }
  const std::size_t K = head.classes();
  const std::size_t C = head.features();
  std::vector<double> contrib(K * C);
  for (std::size_t k = 0; k < K; ++k) {
    const auto w = head.row(k);
    for (std::size_t c = 0; c < C; ++c) contrib[k * C + c] = w[c] * stats.mean_feature[c];
  }
  std::vector<std::uint8_t> mask(K * C, 0);
  if (masking == DiceMasking::Global) {
    for (std::size_t i : top_indices(contrib, keep_count(1.0 - sparsity, K * C))) mask[i] = 1;
  } else {
    const std::size_t keep = keep_count(1.0 - sparsity, C);
    for (std::size_t k = 0; k < K; ++k) {
      const auto row = std::span<const double>(contrib).subspan(k * C, C);
      for (std::size_t c : top_indices(row, keep)) mask[k * C + c] = 1;
    }
  }
  return mask;
}

}  // namespace

DiceHead::DiceHead(const ClassifierHead& head, const CalibrationStats& stats, double sparsity,
                   DiceMasking masking)
    : masked_(head), mask_(dice_mask(head, stats, sparsity, masking)) {
  masked_ = apply_mask(head, mask_);
}

std::vector<double> DiceHead::logits(std::span<const double> feature) const {
  check_feature(feature, masked_.features());
  return masked_.logits(feature);
}

double DiceHead::score(std::span<const double> feature) const {
  return energy_score(logits(feature));
}

double dice_score(std::span<const double> feature, const ClassifierHead& head,
                  const CalibrationStats& stats, double sparsity, DiceMasking masking) {
  return DiceHead(head, stats, sparsity, masking).score(feature);
}

double knn_score(std::span<const double> feature, const CalibrationStats& stats, std::size_t k) {
  const auto& bank = stats.feature_bank;
  if (bank.size() == 0) throw DataError("KNN feature bank is empty");
  if (k == 0 || k > bank.size()) {
    throw ArgumentError("KNN k must lie in [1, bank size=" + std::to_string(bank.size()) + "]");
  }
  check_feature(feature, bank.dim);
  double norm = 0.0;
  for (double v : feature) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw DataError("KNN query feature is all zero");

  std::vector<double> query(feature.begin(), feature.end());
  for (auto& v : query) v /= norm;

  std::vector<double> dist(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const auto row = bank.row(i);
    double d2 = 0.0;
    for (std::size_t c = 0; c < bank.dim; ++c) {
      const double diff = query[c] - row[c];
      d2 += diff * diff;
    }
    dist[i] = std::sqrt(d2);
  }
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
  return -dist[k - 1];
}

}  // namespace napood
