#include "napood/manifest.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "napood/errors.hpp"
#include "napood/parallel.hpp"
#include "napood/tensor_io.hpp"

namespace napood {
namespace {

using nlohmann::json;

constexpr int kManifestVersion = 1;

const json& require(const json& obj, const char* key, std::string_view context) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormatError("manifest " + std::string(context) + ": missing key '" + key + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key, std::string_view context) {
  const auto& v = require(obj, key, context);
  if (!v.is_string()) {
    throw FormatError("manifest " + std::string(context) + ": '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

json entry_to_json(const ManifestEntry& e) {
  json j;
  j["sample_id"] = e.sample_id;
  j["label"] = std::string(to_string(e.label));
  j["tensors"] = e.tensors;
  j["logits"] = e.logits;
  if (e.feature) j["feature"] = *e.feature;
  return j;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::vector<double> flat_vector(const Tensor& t) {
  return t.to_doubles();
}

}  // namespace

std::string_view to_string(SampleLabel label) noexcept {
  switch (label) {
    case SampleLabel::Id:
      return "id";
    case SampleLabel::Ood:
      return "ood";
    case SampleLabel::PseudoOod:
      return "pseudo_ood";
  }
  return "id";
}

SampleLabel parse_label(std::string_view text) {
  if (text == "id") return SampleLabel::Id;
  if (text == "ood") return SampleLabel::Ood;
  if (text == "pseudo_ood") return SampleLabel::PseudoOod;
  throw FormatError("unknown sample label '" + std::string(text) + "'");
}

Manifest parse_manifest(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw FormatError("manifest root must be an object");
  }
  if (auto v = root.find("version"); v != root.end()) {
    if (!v->is_number_integer() || v->get<int>() != kManifestVersion) {
      throw FormatError("unsupported manifest version");
    }
  }

  Manifest m;
  if (auto meta = root.find("meta"); meta != root.end()) {
    if (!meta->is_object()) throw FormatError("manifest 'meta' must be an object");
    for (const auto& [k, v] : meta->items()) {
      if (!v.is_string()) throw FormatError("manifest meta value '" + k + "' must be a string");
      m.meta.emplace(k, v.get<std::string>());
    }
  }
  if (auto head = root.find("head"); head != root.end() && !head->is_null()) {
    if (!head->is_object()) throw FormatError("manifest 'head' must be an object");
    m.head = HeadRef{require_string(*head, "weights", "head"), require_string(*head, "bias", "head")};
  }

  const auto& entries = require(root, "entries", "root");
  if (!entries.is_array()) throw FormatError("manifest 'entries' must be an array");
  m.entries.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const std::string ctx = "entry " + std::to_string(i);
    if (!e.is_object()) throw FormatError("manifest " + ctx + " must be an object");
    ManifestEntry entry;
    entry.sample_id = require_string(e, "sample_id", ctx);
    entry.label = parse_label(require_string(e, "label", ctx));
    const auto& tensors = require(e, "tensors", ctx);
    if (!tensors.is_object()) throw FormatError("manifest " + ctx + ": 'tensors' must be an object");
    for (const auto& [tag, path] : tensors.items()) {
      if (!path.is_string()) throw FormatError("manifest " + ctx + ": tensor path must be a string");
      entry.tensors.emplace(tag, path.get<std::string>());
    }
    entry.logits = require_string(e, "logits", ctx);
    if (auto f = e.find("feature"); f != e.end() && !f->is_null()) {
      if (!f->is_string()) throw FormatError("manifest " + ctx + ": 'feature' must be a string");
      entry.feature = f->get<std::string>();
    }
    m.entries.push_back(std::move(entry));
  }
  return m;
}

std::string format_manifest(const Manifest& manifest) {
  std::ostringstream out;
  out << "{\n";
  out << "\"version\": " << kManifestVersion << ",\n";
  out << "\"meta\": " << json(manifest.meta).dump() << ",\n";
  if (manifest.head) {
    json h;
    h["weights"] = manifest.head->weights;
    h["bias"] = manifest.head->bias;
    out << "\"head\": " << h.dump() << ",\n";
  }
  out << "\"entries\": [";
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    out << (i == 0 ? "\n" : ",\n") << entry_to_json(manifest.entries[i]).dump();
  }
  out << (manifest.entries.empty() ? "]\n" : "\n]\n");
  out << "}\n";
  return out.str();
}

Manifest read_manifest(const std::filesystem::path& path) {
  try {
    return parse_manifest(read_file_text(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  write_file_text(path, format_manifest(manifest));
}

const Tensor& SampleRecord::activation(std::string_view tag) const {
  auto it = activations.find(tag);
  if (it == activations.end()) {
    throw DataError("sample '" + sample_id + "' has no tensor tagged '" + std::string(tag) + "'");
  }
  return it->second;
}

bool SampleRecord::has_activation(std::string_view tag) const {
  return activations.find(tag) != activations.end();
}

std::vector<const SampleRecord*> Dataset::with_label(SampleLabel label) const {
  std::vector<const SampleRecord*> out;
  for (const auto& r : records) {
    if (r.label == label) out.push_back(&r);
  }
  return out;
}

Dataset load_manifest(const std::filesystem::path& path, const LoadOptions& options) {
  const Manifest manifest = read_manifest(path);
  const auto base = path.parent_path();

  std::set<std::string_view> seen;
  for (const auto& e : manifest.entries) {
    if (!seen.insert(e.sample_id).second) {
      throw DataError(path.string() + ": duplicate sample_id '" + e.sample_id + "'");
    }
  }

  Dataset ds;
  ds.meta = manifest.meta;
  if (manifest.head) {
    const auto w = read_tensor(resolve(base, manifest.head->weights));
    const auto b = read_tensor(resolve(base, manifest.head->bias));
    ds.head = ClassifierHead::from_tensors(w, b);
  }

  ds.records.resize(manifest.entries.size());
  parallel_for(manifest.entries.size(), options.threads, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    auto& r = ds.records[i];
    r.sample_id = e.sample_id;
    r.label = e.label;
    for (const auto& [tag, rel] : e.tensors) {
      auto t = read_tensor(resolve(base, rel));
      const auto vals = t.values();
      // -0.0f compares equal to zero and is accepted.
      auto neg = std::find_if(vals.begin(), vals.end(), [](float v) { return v < 0.0f; });
      if (neg != vals.end()) {
        throw DataError("sample '" + e.sample_id + "' layer '" + tag +
                        "': negative activation at flat index " +
                        std::to_string(neg - vals.begin()) + " violates the post-ReLU contract");
      }
      r.activations.emplace(tag, std::move(t));
    }
    r.logits = flat_vector(read_tensor(resolve(base, e.logits)));
    if (r.logits.size() < 2) {
      throw DataError("sample '" + e.sample_id + "': logits need K >= 2 entries");
    }
    if (e.feature) {
      r.feature = flat_vector(read_tensor(resolve(base, *e.feature)));
    }
  });

  std::optional<std::size_t> feature_dim;
  for (const auto& r : ds.records) {
    if (ds.head && r.logits.size() != ds.head->classes()) {
      throw DataError("sample '" + r.sample_id + "': " + std::to_string(r.logits.size()) +
                      " logits but head has K=" + std::to_string(ds.head->classes()));
    }
    if (!r.feature) continue;
    if (!feature_dim) feature_dim = r.feature->size();
    if (r.feature->size() != *feature_dim) {
      throw DataError("sample '" + r.sample_id + "': feature length " +
                      std::to_string(r.feature->size()) + " differs from " +
                      std::to_string(*feature_dim));
    }
    if (ds.head && r.feature->size() != ds.head->features()) {
      throw DataError("sample '" + r.sample_id + "': feature length does not match head C=" +
                      std::to_string(ds.head->features()));
    }
  }
  return ds;
}

}  // namespace napood
