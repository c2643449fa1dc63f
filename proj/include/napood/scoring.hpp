#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "napood/tensor.hpp"

namespace napood {

struct NapConfig {
  /// Added to each channel mean before dividing; must be > 0 when any channel
  /// is entirely zero.
  double epsilon = 1.0;
};

/// C x H x W post-ReLU activations held in double precision.
///
/// Construction checks the shape and that every value is finite and >= 0.
class ActivationTensor {
 public:
  ActivationTensor(std::vector<double> values, std::size_t channels, std::size_t height,
                   std::size_t width);

  /// Accepts (C, H, W) or (1, C, H, W).
  static ActivationTensor from(const Tensor& t);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t spatial() const noexcept { return height_ * width_; }

  std::span<const double> channel(std::size_t j) const;
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
  std::size_t channels_;
  std::size_t height_;
  std::size_t width_;
};

double channel_max(const ActivationTensor& a, std::size_t channel);
double channel_mean(const ActivationTensor& a, std::size_t channel);

/// Mean over channels of (max / (mean + epsilon))^2, accumulated in double.
double nap_score(const ActivationTensor& a, const NapConfig& cfg = {});

struct FormerOptions {
  /// Drop entry 0 (the cls token's attention to itself) before taking the max.
  bool exclude_self = false;
};

/// Transformer variant: the largest cls-token attention weight. The vector
/// has l + 1 >= 2 non-negative entries summing to 1 within 1e-5.
double nap_former_score(std::span<const float> attention, const FormerOptions& opts = {});
double nap_former_score(std::span<const double> attention, const FormerOptions& opts = {});

/// Negative free energy, log(sum_i exp(z_i)), via max subtraction.
double energy_score(std::span<const double> logits);

/// Maximum softmax probability.
double msp_score(std::span<const double> logits);

}  // namespace napood
