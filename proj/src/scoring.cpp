#include "napood/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "napood/errors.hpp"

namespace napood {
namespace {

constexpr double kAttentionSumTolerance = 1e-5;

void check_logits(std::span<const double> z) {
  if (z.empty()) throw ArgumentError("logits are empty");
  for (double v : z) {
    if (!std::isfinite(v)) throw DataError("non-finite logit");
  }
}

template <typename T>
double former_score(std::span<const T> att, const FormerOptions& opts) {
  if (att.size() < 2) {
    throw ArgumentError("attention vector needs l + 1 >= 2 entries, got " + std::to_string(att.size()));
  }
  double sum = 0.0;
  for (T v : att) {
    if (!std::isfinite(v) || v < T(0)) {
      throw DataError("attention weights must be finite and non-negative");
    }
    sum += static_cast<double>(v);
  }
  if (std::abs(sum - 1.0) > kAttentionSumTolerance) {
    throw DataError("attention weights sum to " + std::to_string(sum) + ", expected 1");
  }
  const auto first = att.begin() + (opts.exclude_self ? 1 : 0);
  return static_cast<double>(*std::max_element(first, att.end()));
}

// Summing in ascending order makes the result independent of the input order.
double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

}  // namespace

ActivationTensor::ActivationTensor(std::vector<double> values, std::size_t channels,
                                   std::size_t height, std::size_t width)
    : values_(std::move(values)), channels_(channels), height_(height), width_(width) {
  if (channels_ == 0 || height_ == 0 || width_ == 0) {
    throw ArgumentError("activation tensor needs C >= 1 and H*W >= 1");
  }
  if (values_.size() != channels_ * height_ * width_) {
    throw ArgumentError("activation buffer size does not match C x H x W");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw DataError("activation at flat index " + std::to_string(i) +
                      " is negative or non-finite (expected post-ReLU values)");
    }
  }
}

ActivationTensor ActivationTensor::from(const Tensor& t) {
  const auto& d = t.dims();
  if (d.size() == 3) {
    return ActivationTensor(t.to_doubles(), d[0], d[1], d[2]);
  }
  if (d.size() == 4 && d[0] == 1) {
    return ActivationTensor(t.to_doubles(), d[1], d[2], d[3]);
  }
  throw DataError("activation tensor must be C x H x W, got shape " + t.shape_string());
}

std::span<const double> ActivationTensor::channel(std::size_t j) const {
  if (j >= channels_) {
    throw ArgumentError("channel " + std::to_string(j) + " out of range for C=" +
                        std::to_string(channels_));
  }
  return std::span<const double>(values_).subspan(j * spatial(), spatial());
}

double channel_max(const ActivationTensor& a, std::size_t channel) {
  const auto s = a.channel(channel);
  return *std::max_element(s.begin(), s.end());
}

double channel_mean(const ActivationTensor& a, std::size_t channel) {
  const auto s = a.channel(channel);
  return sorted_sum(std::vector<double>(s.begin(), s.end())) / static_cast<double>(s.size());
}

double nap_score(const ActivationTensor& a, const NapConfig& cfg) {
  if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon)) {
    throw ArgumentError("epsilon must be a finite value >= 0");
  }
  std::vector<double> terms(a.channels());
  for (std::size_t j = 0; j < a.channels(); ++j) {
    const double mx = channel_max(a, j);
    const double denom = channel_mean(a, j) + cfg.epsilon;
    if (denom == 0.0) {
      throw DataError("division by zero: channel " + std::to_string(j) +
                      " is all zero and epsilon is 0");
    }
    const double ratio = mx / denom;
    terms[j] = ratio * ratio;
  }
  return sorted_sum(std::move(terms)) / static_cast<double>(a.channels());
}

double nap_former_score(std::span<const float> attention, const FormerOptions& opts) {
  return former_score(attention, opts);
}

double nap_former_score(std::span<const double> attention, const FormerOptions& opts) {
  return former_score(attention, opts);
}

double energy_score(std::span<const double> logits) {
  check_logits(logits);
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  return mx + std::log(sum);
}

double msp_score(std::span<const double> logits) {
  check_logits(logits);
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  return 1.0 / sum;
}

}  // namespace napood
