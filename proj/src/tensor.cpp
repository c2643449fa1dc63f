#include "napood/tensor.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

#include "napood/errors.hpp"
#include "napood/text.hpp"

namespace napood {

std::size_t element_count(std::span<const std::uint64_t> dims) {
  if (dims.empty()) {
    throw ArgumentError("tensor must have at least one dimension");
  }
  std::size_t count = 1;
  for (auto d : dims) {
    if (d == 0) {
      throw ArgumentError("tensor dimension of size zero");
    }
    if (d > std::numeric_limits<std::size_t>::max() / count) {
      throw ArgumentError("tensor element count overflows");
    }
    count *= static_cast<std::size_t>(d);
  }
  return count;
}

Tensor::Tensor(std::vector<std::uint64_t> dims, std::vector<float> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
  const auto expected = element_count(dims_);
  if (expected != values_.size()) {
    throw ArgumentError("tensor of shape " + shape_string() + " needs " + std::to_string(expected) +
                        " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("non-finite tensor value at flat index " + std::to_string(i));
    }
  }
}

std::vector<double> Tensor::to_doubles() const {
  return {values_.begin(), values_.end()};
}

std::string Tensor::shape_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i != 0) out += ",";
    out += std::to_string(dims_[i]);
  }
  out += ")";
  return out;
}

std::string format_double(double value, int significant_digits) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general,
                                 significant_digits);
  if (ec != std::errc{}) {
    throw ArgumentError("cannot format number");
  }
  return {buf, end};
}

std::string format_double_shortest(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) {
    throw ArgumentError("cannot format number");
  }
  return {buf, end};
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace napood
