#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace napood {

/// Dense row-major float32 array with at least one dimension.
///
/// Every dimension is >= 1 and every value is finite; construction enforces
/// both, so a Tensor in hand is always serializable.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::uint64_t> dims, std::vector<float> values);

  const std::vector<std::uint64_t>& dims() const noexcept { return dims_; }
  std::size_t ndim() const noexcept { return dims_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }

  /// Values widened to double, in storage order.
  std::vector<double> to_doubles() const;

  std::string shape_string() const;

  bool operator==(const Tensor&) const = default;

 private:
  std::vector<std::uint64_t> dims_;
  std::vector<float> values_;
};

/// Product of dims, throwing ArgumentError on zero dims or overflow.
std::size_t element_count(std::span<const std::uint64_t> dims);

}  // namespace napood
