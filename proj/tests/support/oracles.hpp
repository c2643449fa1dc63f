#pragma once

// Reference implementations used only by tests. Each one follows the most
// direct reading of its definition (brute force, full sorts, extended
// precision) and shares no code with the library paths it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace napood::oracle {

inline double auroc_pairwise(std::span<const double> id, std::span<const double> ood) {
  std::uint64_t twice = 0;
  for (double a : id) {
    for (double b : ood) {
      if (a > b) {
        twice += 2;
      } else if (a == b) {
        twice += 1;
      }
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(id.size()) * static_cast<double>(ood.size()));
}

// Smallest m with m >= tpr * n (within 1e-9).
inline std::size_t needed_positives(double tpr, std::size_t n) {
  std::size_t m = 1;
  while (m < n && static_cast<double>(m) < tpr * static_cast<double>(n) - 1e-9) ++m;
  return m;
}

// Tries every distinct score as a threshold.
inline double fpr_sweep(std::span<const double> id, std::span<const double> ood, double tpr) {
  std::set<double> candidates(id.begin(), id.end());
  candidates.insert(ood.begin(), ood.end());
  const std::size_t need = needed_positives(tpr, id.size());
  double best_t = -INFINITY;
  bool found = false;
  for (double t : candidates) {
    std::size_t hits = 0;
    for (double a : id) hits += a >= t ? 1 : 0;
    if (hits >= need && (!found || t > best_t)) {
      best_t = t;
      found = true;
    }
  }
  std::size_t fp = 0;
  for (double b : ood) fp += b >= best_t ? 1 : 0;
  return static_cast<double>(fp) / static_cast<double>(ood.size());
}

inline double trapezoid_area(std::span<const std::pair<double, double>> pts) {
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
  }
  return area;
}

inline long double kahan_sum(std::span<const double> v) {
  long double sum = 0.0L;
  long double comp = 0.0L;
  for (double x : v) {
    const long double y = static_cast<long double>(x) - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// values is C x H x W row-major.
inline double nap_naive(std::span<const double> values, std::size_t C, std::size_t H, std::size_t W,
                        double eps) {
  long double total = 0.0L;
  for (std::size_t c = 0; c < C; ++c) {
    long double mx = 0.0L;
    long double sum = 0.0L;
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t w = 0; w < W; ++w) {
        const long double v = values[(c * H + h) * W + w];
        mx = std::max(mx, v);
        sum += v;
      }
    }
    const long double ratio = mx / (sum / static_cast<long double>(H * W) + eps);
    total += ratio * ratio;
  }
  return static_cast<double>(total / static_cast<long double>(C));
}

inline double logsumexp_direct(std::span<const double> z) {
  long double sum = 0.0L;
  for (double v : z) sum += std::exp(static_cast<long double>(v));
  return static_cast<double>(std::log(sum));
}

inline double softmax_max_direct(std::span<const double> z) {
  long double sum = 0.0L;
  long double best = 0.0L;
  for (double v : z) sum += std::exp(static_cast<long double>(v));
  for (double v : z) best = std::max(best, std::exp(static_cast<long double>(v)) / sum);
  return static_cast<double>(best);
}

// K x C row-major weights.
inline std::vector<double> matvec(std::span<const double> weights, std::span<const double> bias,
                                  std::span<const double> x) {
  const std::size_t K = bias.size();
  const std::size_t C = x.size();
  std::vector<double> out(K);
  for (std::size_t k = 0; k < K; ++k) {
    long double acc = bias[k];
    for (std::size_t c = 0; c < C; ++c) acc += static_cast<long double>(weights[k * C + c]) * x[c];
    out[k] = static_cast<double>(acc);
  }
  return out;
}

// Indices ordered by value descending then index ascending, via a full stable sort.
inline std::vector<std::size_t> rank_desc(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  return idx;
}

inline std::size_t ceil_count(double fraction, std::size_t n) {
  std::size_t m = 1;
  while (m < n && static_cast<double>(m) < fraction * static_cast<double>(n) - 1e-9) ++m;
  return m;
}

inline std::vector<double> ash_reference(std::span<const double> feat, double keep_percent, bool scale) {
  const std::size_t keep = ceil_count(keep_percent / 100.0, feat.size());
  const auto order = rank_desc(feat);
  std::vector<double> out(feat.size(), 0.0);
  long double s1 = 0.0L;
  long double s2 = 0.0L;
  for (double v : feat) s1 += v;
  for (std::size_t r = 0; r < keep; ++r) {
    out[order[r]] = feat[order[r]];
    s2 += feat[order[r]];
  }
  if (scale && s2 != 0.0L) {
    for (auto& v : out) v = static_cast<double>(v * std::exp(s1 / s2));
  }
  return out;
}

inline std::vector<double> normalized(std::span<const double> v) {
  long double n = 0.0L;
  for (double x : v) n += static_cast<long double>(x) * x;
  n = std::sqrt(n);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i] / n);
  return out;
}

inline std::vector<double> random_scores(std::mt19937_64& rng, std::size_t n, int distinct) {
  std::uniform_int_distribution<int> pick(0, distinct - 1);
  std::vector<double> out(n);
  for (auto& v : out) v = static_cast<double>(pick(rng)) * 0.25 - 3.0;
  return out;
}

}  // namespace napood::oracle
