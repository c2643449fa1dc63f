#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "napood/tensor.hpp"

namespace napood {

/// Final fully connected layer: logits = weights * feature + bias.
class ClassifierHead {
 public:
  /// `weights` is row-major K x C.
  ClassifierHead(std::size_t classes, std::size_t features, std::vector<double> weights,
                 std::vector<double> bias);

  /// Weights must be 2-D (K x C) and bias 1-D (K).
  static ClassifierHead from_tensors(const Tensor& weights, const Tensor& bias);

  std::size_t classes() const noexcept { return classes_; }
  std::size_t features() const noexcept { return features_; }

  std::span<const double> row(std::size_t k) const;
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> bias() const noexcept { return bias_; }

  std::vector<double> logits(std::span<const double> feature) const;

 private:
  std::size_t classes_;
  std::size_t features_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

}  // namespace napood
