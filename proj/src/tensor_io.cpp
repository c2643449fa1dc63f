#include "napood/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "napood/errors.hpp"

namespace napood {
namespace {

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffu));
  }
}

std::uint64_t get_u64(std::span<const std::byte> in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) {
    v = (v << 8) | std::to_integer<std::uint64_t>(in[static_cast<std::size_t>(i)]);
  }
  return v;
}

std::uint32_t get_u32(std::span<const std::byte> in) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) {
    v = (v << 8) | std::to_integer<std::uint32_t>(in[static_cast<std::size_t>(i)]);
  }
  return v;
}

std::string where(std::string_view origin) {
  return std::string(origin) + ": ";
}

}  // namespace

std::vector<std::byte> encode_tensor(const Tensor& t) {
  if (t.ndim() == 0 || t.ndim() > 255) {
    throw ArgumentError("tensor rank must be in [1, 255]");
  }
  std::vector<std::byte> out;
  out.reserve(kNapdFixedHeader + 8 * t.ndim() + 4 * t.size());
  for (char c : kNapdMagic) out.push_back(static_cast<std::byte>(c));
  out.push_back(static_cast<std::byte>(kNapdVersion));
  out.push_back(static_cast<std::byte>(DType::Float32));
  out.push_back(static_cast<std::byte>(t.ndim()));
  out.push_back(std::byte{0});
  for (auto d : t.dims()) put_u64(out, d);
  for (float f : t.values()) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) {
      out.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xffu));
    }
  }
  return out;
}

Tensor decode_tensor(std::span<const std::byte> bytes, std::string_view origin) {
  if (bytes.size() < kNapdFixedHeader) {
    throw LengthError(where(origin) + "file shorter than the NAPD header");
  }
  if (std::memcmp(bytes.data(), kNapdMagic.data(), kNapdMagic.size()) != 0) {
    throw FormatError(where(origin) + "bad magic, expected \"NAPD\"");
  }
  const auto version = std::to_integer<unsigned>(bytes[4]);
  const auto dtype = std::to_integer<unsigned>(bytes[5]);
  const auto ndim = std::to_integer<std::size_t>(bytes[6]);
  const auto pad = std::to_integer<unsigned>(bytes[7]);
  if (version != kNapdVersion) {
    throw FormatError(where(origin) + "unsupported NAPD version " + std::to_string(version));
  }
  if (dtype != static_cast<unsigned>(DType::Float32)) {
    throw FormatError(where(origin) + "unsupported dtype code " + std::to_string(dtype));
  }
  if (pad != 0) {
    throw FormatError(where(origin) + "non-zero header padding byte");
  }
  if (ndim == 0) {
    throw FormatError(where(origin) + "tensor rank is zero");
  }
  const std::size_t header = kNapdFixedHeader + 8 * ndim;
  if (bytes.size() < header) {
    throw LengthError(where(origin) + "truncated dimension table");
  }
  std::vector<std::uint64_t> dims(ndim);
  for (std::size_t i = 0; i < ndim; ++i) {
    dims[i] = get_u64(bytes.subspan(kNapdFixedHeader + 8 * i, 8));
  }
  std::size_t count = 0;
  try {
    count = element_count(dims);
  } catch (const ArgumentError& e) {
    throw FormatError(where(origin) + e.what());
  }
  const std::size_t payload = bytes.size() - header;
  if (count > payload / 4 || payload != count * 4) {
    throw LengthError(where(origin) + "payload is " + std::to_string(payload) + " bytes but the shape holds " +
                      std::to_string(count) + " float32 values");
  }
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<float>(get_u32(bytes.subspan(header + 4 * i, 4)));
    if (!std::isfinite(values[i])) {
      throw DataError(where(origin) + "non-finite value at flat index " + std::to_string(i));
    }
  }
  return Tensor(std::move(dims), std::move(values));
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("read failed for " + path.string());
  }
  std::vector<std::byte> out(raw.size());
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

std::string read_file_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

void write_file_text(const std::filesystem::path& path, std::string_view text) {
  write_file_bytes(path, std::as_bytes(std::span(text.data(), text.size())));
}

Tensor read_tensor(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_tensor(bytes, path.string());
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  write_file_bytes(path, encode_tensor(t));
}

}  // namespace napood
