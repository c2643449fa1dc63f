#include "napood/head.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "napood/errors.hpp"

namespace napood {

ClassifierHead::ClassifierHead(std::size_t classes, std::size_t features, std::vector<double> weights,
                               std::vector<double> bias)
    : classes_(classes), features_(features), weights_(std::move(weights)), bias_(std::move(bias)) {
  if (classes_ < 2 || features_ < 1) {
    throw DataError("classifier head needs K >= 2 classes and C >= 1 features");
  }
  if (weights_.size() != classes_ * features_ || bias_.size() != classes_) {
    throw DataError("classifier head weights must be K x C and bias K");
  }
  for (double v : weights_) {
    if (!std::isfinite(v)) throw DataError("non-finite classifier weight");
  }
  for (double v : bias_) {
    if (!std::isfinite(v)) throw DataError("non-finite classifier bias");
  }
}

ClassifierHead ClassifierHead::from_tensors(const Tensor& weights, const Tensor& bias) {
  if (weights.ndim() != 2) {
    throw DataError("head weights must be 2-D, got shape " + weights.shape_string());
  }
  if (bias.ndim() != 1) {
    throw DataError("head bias must be 1-D, got shape " + bias.shape_string());
  }
  if (weights.dims()[0] != bias.dims()[0]) {
    throw DataError("head weights have " + std::to_string(weights.dims()[0]) + " rows but bias has " +
                    std::to_string(bias.dims()[0]) + " entries");
  }
  return ClassifierHead(static_cast<std::size_t>(weights.dims()[0]),
                        static_cast<std::size_t>(weights.dims()[1]), weights.to_doubles(),
                        bias.to_doubles());
}

std::span<const double> ClassifierHead::row(std::size_t k) const {
  if (k >= classes_) {
    throw ArgumentError("class index " + std::to_string(k) + " out of range");
  }
  return std::span<const double>(weights_).subspan(k * features_, features_);
}

std::vector<double> ClassifierHead::logits(std::span<const double> feature) const {
  if (feature.size() != features_) {
    throw DataError("feature length " + std::to_string(feature.size()) + " does not match head C=" +
                    std::to_string(features_));
  }
  std::vector<double> out(classes_);
  for (std::size_t k = 0; k < classes_; ++k) {
    const double* w = weights_.data() + k * features_;
    double acc = bias_[k];
    for (std::size_t c = 0; c < features_; ++c) acc += w[c] * feature[c];
    out[k] = acc;
  }
  return out;
}

}  // namespace napood
