#include "napood/tuning.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "napood/errors.hpp"

namespace napood {
namespace {

struct Candidate {
  double w;
  double g;
};

// Strictly better objective, or equal objective and closer to 0.5, or equally
// close and smaller.
bool better(const Candidate& a, const Candidate& b) {
  if (a.g != b.g) return a.g > b.g;
  const double da = std::abs(a.w - 0.5);
  const double db = std::abs(b.w - 0.5);
  if (da != db) return da < db;
  return a.w < b.w;
}

std::vector<ScoredSample> sorted_by_id(std::vector<ScoredSample> v) {
  std::sort(v.begin(), v.end(),
            [](const ScoredSample& a, const ScoredSample& b) { return a.sample_id < b.sample_id; });
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i].sample_id == v[i - 1].sample_id) {
      throw DataError("duplicate sample_id '" + v[i].sample_id + "' in tuning input");
    }
  }
  return v;
}

struct ReferenceWeight {
  std::string_view method;
  std::array<double, 3> w;  // cifar10, cifar100, imagenet
};

constexpr std::array<ReferenceWeight, 6> kReferenceWeights{{
    {"ash", {0.5, 0.6, 0.8}},
    {"dice", {0.5, 0.6, 0.6}},
    {"energy", {0.4, 0.4, 0.6}},
    {"knn", {0.8, 0.8, 0.6}},
    {"msp", {0.5, 0.3, 0.3}},
    {"react", {0.4, 0.5, 0.8}},
}};

}  // namespace

PairedScores pair_by_id(const std::vector<ScoredSample>& base, const std::vector<ScoredSample>& nap) {
  if (base.size() != nap.size()) {
    throw DataError("misaligned tuning input: " + std::to_string(base.size()) + " base scores vs " +
                    std::to_string(nap.size()) + " NAP scores");
  }
  const auto b = sorted_by_id(base);
  const auto n = sorted_by_id(nap);
  PairedScores out;
  out.base.reserve(b.size());
  out.nap.reserve(n.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i].sample_id != n[i].sample_id) {
      throw DataError("misaligned tuning input: sample '" + b[i].sample_id +
                      "' has no matching NAP score");
    }
    if (!std::isfinite(b[i].score) || !std::isfinite(n[i].score)) {
      throw DataError("non-finite score for sample '" + b[i].sample_id + "'");
    }
    if (n[i].score < 0.0) {
      throw DataError("negative NAP score for sample '" + n[i].sample_id + "'");
    }
    out.base.push_back(b[i].score);
    out.nap.push_back(n[i].score);
  }
  return out;
}

double combined_auroc(const PairedScores& id, const PairedScores& pseudo, double w, double floor) {
  const CombineConfig cfg{w, floor};
  auto combine_all = [&](const PairedScores& p) {
    std::vector<double> out(p.base.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = combine_geometric(p.base[i], p.nap[i], cfg);
    return out;
  };
  return auroc(combine_all(id), combine_all(pseudo));
}

TuneResult tune_w(const TuneInput& input, const TuneOptions& opts) {
  if (opts.iters < 1) throw ArgumentError("tuning needs iters >= 1");
  if (opts.grid_points < 3) throw ArgumentError("tuning needs grid_points >= 3");
  const auto id = pair_by_id(input.id_base, input.id_nap);
  const auto pseudo = pair_by_id(input.pseudo_base, input.pseudo_nap);
  if (id.base.empty() || pseudo.base.empty()) {
    throw DataError("tuning needs non-empty ID and pseudo-OOD sets");
  }

  TuneResult result;
  auto evaluate = [&](double w) {
    ++result.evaluations;
    return Candidate{w, combined_auroc(id, pseudo, w, opts.floor)};
  };

  const std::size_t n = opts.grid_points;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(n - 1);

  std::size_t best_index = 0;
  Candidate best = evaluate(grid[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const auto c = evaluate(grid[i]);
    if (better(c, best)) {
      best = c;
      best_index = i;
    }
  }

  double lo = grid[best_index == 0 ? 0 : best_index - 1];
  double hi = grid[std::min(best_index + 1, n - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t it = 0; it < opts.iters; ++it) {
    const double c = hi - inv_phi * (hi - lo);
    const double d = lo + inv_phi * (hi - lo);
    const auto fc = evaluate(c);
    const auto fd = evaluate(d);
    if (better(fc, best)) best = fc;
    if (better(fd, best)) best = fd;
    if (fc.g > fd.g) {
      hi = d;
    } else if (fc.g < fd.g) {
      lo = c;
    } else {
      lo = c;
      hi = d;
    }
  }

  result.w = best.w;
  result.auroc = best.g;
  return result;
}

std::optional<double> reference_weight(std::string_view method, std::string_view benchmark) {
  std::size_t column;
  if (benchmark == "cifar10") {
    column = 0;
  } else if (benchmark == "cifar100") {
    column = 1;
  } else if (benchmark == "imagenet") {
    column = 2;
  } else {
    return std::nullopt;
  }
  for (const auto& r : kReferenceWeights) {
    if (r.method == method) return r.w[column];
  }
  return std::nullopt;
}

}  // namespace napood
