#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

namespace napood {

/// SplitMix64: state advances by 0x9E3779B97F4A7C15 per draw and the output
/// is the standard (30, 27, 31) xor-shift-multiply finalizer.
///
/// uniform() = (next() >> 11) * 2^-53 in [0, 1).
/// normal()  = sqrt(-2 ln(1 - u1)) * cos(2 pi u2), consuming two uniforms.
/// below(n)  = min(n - 1, floor(uniform() * n)).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;
  double uniform() noexcept;
  double normal() noexcept;
  std::size_t below(std::size_t n) noexcept;

 private:
  std::uint64_t state_;
};

inline constexpr std::string_view kSynthActivationTag = "penultimate";
inline constexpr std::string_view kSynthAttentionTag = "cls_attention";
inline constexpr std::string_view kSynthManifestName = "synth.manifest.json";

/// Fixture where ID channels carry one strong spike over weak noise and OOD
/// channels carry stronger noise only, tuned so both have the same expected
/// channel mean.
struct SynthConfig {
  std::size_t n_id = 500;
  std::size_t n_ood = 500;
  std::size_t channels = 64;
  std::size_t height = 8;
  std::size_t width = 8;
  double spike_mean = 8.0;
  double spike_sd = 1.0;
  double noise_hi_id = 0.2;
  /// Unset means "match ID channel means": noise_hi_id + 2 * spike_mean / (H * W).
  std::optional<double> noise_hi_ood;
  std::uint64_t seed = 42;
  std::size_t k_classes = 10;
  /// When > 0, also emit a cls-attention vector of this length (l + 1) per sample.
  std::size_t attention_tokens = 0;

  double effective_noise_hi_ood() const;
  /// Throws ArgumentError on any violated invariant.
  void validate() const;
};

/// Writes NAPD tensors under out_dir and returns the manifest path. Output
/// bytes depend only on the config.
std::filesystem::path generate(const SynthConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace napood
