#include "napood/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <system_error>
#include <vector>

#include "napood/errors.hpp"
#include "napood/manifest.hpp"
#include "napood/tensor_io.hpp"
#include "napood/text.hpp"

namespace napood {

std::uint64_t SplitMix64::next() noexcept {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal() noexcept {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t SplitMix64::below(std::size_t n) noexcept {
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return std::min(i, n - 1);
}

double SynthConfig::effective_noise_hi_ood() const {
  if (noise_hi_ood) return *noise_hi_ood;
  return noise_hi_id + 2.0 * spike_mean / static_cast<double>(height * width);
}

void SynthConfig::validate() const {
  if (n_id < 1 || n_ood < 1) throw ArgumentError("synth needs n_id >= 1 and n_ood >= 1");
  if (channels < 1 || height < 1 || width < 1) throw ArgumentError("synth needs C, H, W >= 1");
  if (k_classes < 2) throw ArgumentError("synth needs k_classes >= 2");
  if (attention_tokens == 1) throw ArgumentError("attention vectors need at least 2 tokens");
  if (!(noise_hi_id > 0.0)) throw ArgumentError("noise_hi_id must be > 0");
  if (!(effective_noise_hi_ood() > 0.0)) throw ArgumentError("noise_hi_ood must be > 0");
  if (!(spike_sd >= 0.0)) throw ArgumentError("spike_sd must be >= 0");
  if (!(spike_mean > effective_noise_hi_ood())) {
    throw ArgumentError("spike_mean must exceed noise_hi_ood");
  }
}

namespace {

constexpr double kLogitMargin = 2.0;
constexpr double kAttentionTemperature = 0.5;
constexpr double kAttentionPeak = 3.0;

std::string sample_name(std::string_view prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu", i);
  return std::string(prefix) + "_" + buf;
}

std::vector<float> softmax(const std::vector<double>& raw) {
  const double mx = *std::max_element(raw.begin(), raw.end());
  double sum = 0.0;
  for (double v : raw) sum += std::exp(v - mx);
  std::vector<float> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = static_cast<float>(std::exp(raw[i] - mx) / sum);
  }
  return out;
}

// Logits come from the same distribution for ID and OOD, so energy carries
// no signal about the label.
std::vector<float> draw_logits(SplitMix64& rng, std::size_t k) {
  std::vector<float> z(k);
  for (auto& v : z) v = static_cast<float>(rng.normal());
  z[rng.below(k)] += static_cast<float>(kLogitMargin);
  return z;
}

std::vector<float> draw_attention(SplitMix64& rng, std::size_t tokens, bool peaked) {
  std::vector<double> raw(tokens);
  for (auto& v : raw) v = kAttentionTemperature * rng.normal();
  if (peaked) raw[rng.below(tokens)] += kAttentionPeak;
  return softmax(raw);
}

std::vector<float> channel_means(const std::vector<float>& act, std::size_t channels,
                                 std::size_t spatial) {
  std::vector<float> out(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (std::size_t p = 0; p < spatial; ++p) sum += static_cast<double>(act[c * spatial + p]);
    out[c] = static_cast<float>(sum / static_cast<double>(spatial));
  }
  return out;
}

}  // namespace

std::filesystem::path generate(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "samples", ec);
  std::filesystem::create_directories(out_dir / "head", ec);
  if (ec) throw IoError("cannot create fixture directory " + out_dir.string() + ": " + ec.message());

  SplitMix64 rng(cfg.seed);
  const std::size_t C = cfg.channels;
  const std::size_t HW = cfg.height * cfg.width;
  const std::size_t K = cfg.k_classes;

  std::vector<float> weights(K * C);
  const double w_scale = 1.0 / std::sqrt(static_cast<double>(C));
  for (auto& w : weights) w = static_cast<float>(w_scale * rng.normal());
  std::vector<float> bias(K);
  for (auto& b : bias) b = static_cast<float>(0.1 * rng.normal());
  write_tensor(out_dir / "head" / "weights.napd", Tensor({K, C}, std::move(weights)));
  write_tensor(out_dir / "head" / "bias.napd", Tensor({K}, std::move(bias)));

  Manifest m;
  m.head = HeadRef{"head/weights.napd", "head/bias.napd"};
  m.meta = {
      {"generator", "napood-synth"},
      {"seed", std::to_string(cfg.seed)},
      {"n_id", std::to_string(cfg.n_id)},
      {"n_ood", std::to_string(cfg.n_ood)},
      {"channels", std::to_string(C)},
      {"height", std::to_string(cfg.height)},
      {"width", std::to_string(cfg.width)},
      {"k_classes", std::to_string(K)},
      {"spike_mean", format_double_shortest(cfg.spike_mean)},
      {"spike_sd", format_double_shortest(cfg.spike_sd)},
      {"noise_hi_id", format_double_shortest(cfg.noise_hi_id)},
      {"noise_hi_ood", format_double_shortest(cfg.effective_noise_hi_ood())},
      {"attention_tokens", std::to_string(cfg.attention_tokens)},
  };

  const double noise_ood = cfg.effective_noise_hi_ood();
  auto emit = [&](bool in_dist, std::size_t index) {
    const std::string sid = sample_name(in_dist ? "id" : "ood", index);
    std::vector<float> act(C * HW);
    for (std::size_t c = 0; c < C; ++c) {
      float* ch = act.data() + c * HW;
      const double hi = in_dist ? cfg.noise_hi_id : noise_ood;
      for (std::size_t p = 0; p < HW; ++p) ch[p] = static_cast<float>(hi * rng.uniform());
      if (in_dist) {
        const std::size_t pos = rng.below(HW);
        const double spike = std::max(0.0, cfg.spike_mean + cfg.spike_sd * rng.normal());
        ch[pos] = static_cast<float>(static_cast<double>(ch[pos]) + spike);
      }
    }
    const auto feature = channel_means(act, C, HW);
    const auto logits = draw_logits(rng, K);

    ManifestEntry e;
    e.sample_id = sid;
    e.label = in_dist ? SampleLabel::Id : SampleLabel::Ood;
    const std::string stem = "samples/" + sid;
    write_tensor(out_dir / (stem + ".act.napd"), Tensor({C, cfg.height, cfg.width}, std::move(act)));
    write_tensor(out_dir / (stem + ".logits.napd"), Tensor({K}, logits));
    write_tensor(out_dir / (stem + ".feat.napd"), Tensor({C}, feature));
    e.tensors.emplace(std::string(kSynthActivationTag), stem + ".act.napd");
    e.logits = stem + ".logits.napd";
    e.feature = stem + ".feat.napd";
    if (cfg.attention_tokens > 0) {
      auto att = draw_attention(rng, cfg.attention_tokens, in_dist);
      write_tensor(out_dir / (stem + ".attn.napd"), Tensor({cfg.attention_tokens}, std::move(att)));
      e.tensors.emplace(std::string(kSynthAttentionTag), stem + ".attn.napd");
    }
    m.entries.push_back(std::move(e));
  };

  for (std::size_t i = 0; i < cfg.n_id; ++i) emit(true, i);
  for (std::size_t i = 0; i < cfg.n_ood; ++i) emit(false, i);

  const auto manifest_path = out_dir / kSynthManifestName;
  write_manifest(manifest_path, m);
  return manifest_path;
}

}  // namespace napood
