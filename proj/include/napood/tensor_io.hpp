#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "napood/tensor.hpp"

namespace napood {

// NAPD v1 layout, little-endian throughout:
//   magic "NAPD" | version u8 | dtype u8 | ndim u8 | pad u8 (0)
//   | ndim x u64 dims | row-major payload
inline constexpr std::array<char, 4> kNapdMagic{'N', 'A', 'P', 'D'};
inline constexpr std::uint8_t kNapdVersion = 1;
inline constexpr std::size_t kNapdFixedHeader = 8;

enum class DType : std::uint8_t {
  Float32 = 1,
};

inline constexpr std::string_view kTensorExtension = ".napd";

std::vector<std::byte> encode_tensor(const Tensor& t);

/// `origin` is only used in error messages.
Tensor decode_tensor(std::span<const std::byte> bytes, std::string_view origin = "<memory>");

Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const Tensor& t);

/// Whole-file helpers shared by the manifest and CSV readers.
std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes);
void write_file_text(const std::filesystem::path& path, std::string_view text);

}  // namespace napood
