#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "napood/head.hpp"
#include "napood/tensor.hpp"

namespace napood {

inline constexpr std::string_view kManifestExtension = ".manifest.json";

enum class SampleLabel {
  Id,
  Ood,
  PseudoOod,
};

std::string_view to_string(SampleLabel label) noexcept;
/// Accepts "id", "ood", "pseudo_ood".
SampleLabel parse_label(std::string_view text);

struct ManifestEntry {
  std::string sample_id;
  SampleLabel label = SampleLabel::Id;
  std::map<std::string, std::string> tensors;  // layer tag -> path
  std::string logits;
  std::optional<std::string> feature;

  bool operator==(const ManifestEntry&) const = default;
};

struct HeadRef {
  std::string weights;
  std::string bias;

  bool operator==(const HeadRef&) const = default;
};

/// On-disk description of a dataset; paths are relative to the manifest's
/// directory unless absolute.
struct Manifest {
  std::vector<ManifestEntry> entries;
  std::optional<HeadRef> head;
  std::map<std::string, std::string> meta;

  bool operator==(const Manifest&) const = default;
};

Manifest parse_manifest(std::string_view json_text);
/// Deterministic rendering: one entry per line, keys sorted.
std::string format_manifest(const Manifest& manifest);

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// One sample's artifacts with all referenced tensors resolved.
struct SampleRecord {
  std::string sample_id;
  SampleLabel label = SampleLabel::Id;
  std::map<std::string, Tensor, std::less<>> activations;
  std::vector<double> logits;
  std::optional<std::vector<double>> feature;

  /// Throws DataError naming the tag when absent.
  const Tensor& activation(std::string_view tag) const;
  bool has_activation(std::string_view tag) const;
};

struct Dataset {
  std::vector<SampleRecord> records;  // manifest order
  std::optional<ClassifierHead> head;
  std::map<std::string, std::string> meta;

  std::vector<const SampleRecord*> with_label(SampleLabel label) const;
};

struct LoadOptions {
  /// 0 means "use default_thread_count()".
  std::size_t threads = 0;
};

/// Loads a manifest and every tensor it references, validating each record.
///
/// The loaded record count always equals the manifest entry count; any
/// missing file, duplicate id, negative activation or shape disagreement
/// raises instead of dropping the entry.
Dataset load_manifest(const std::filesystem::path& path, const LoadOptions& options = {});

}  // namespace napood
