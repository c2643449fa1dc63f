#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "napood/errors.hpp"
#include "napood/tuning.hpp"

using namespace napood;

namespace {

std::string sid(const char* prefix, std::size_t i) { return prefix + std::to_string(i); }

// Combined log score at weight w is (t - w) or (w - u) against pseudo-OOD
// points at the log origin, so AUROC peaks on a plateau around w0.
TuneInput peaked(double w0, std::size_t pairs) {
  TuneInput in;
  for (std::size_t k = 0; k < pairs; ++k) {
    const double t = w0 + 0.001 + 0.002 * static_cast<double>(k);
    const double u = w0 - 0.001 - 0.002 * static_cast<double>(k);
    if (t <= 1.0) {
      in.id_base.push_back({sid("t", k), std::exp(t - 1.0)});
      in.id_nap.push_back({sid("t", k), std::exp(t)});
    }
    if (u >= 0.0) {
      in.id_base.push_back({sid("u", k), std::exp(1.0 - u)});
      in.id_nap.push_back({sid("u", k), std::exp(-u)});
    }
  }
  in.pseudo_base = {{"p0", 1.0}, {"p1", 1.0}};
  in.pseudo_nap = {{"p0", 1.0}, {"p1", 1.0}};
  return in;
}

double grid_argmax(const TuneInput& in, std::size_t points) {
  const auto id = pair_by_id(in.id_base, in.id_nap);
  const auto ps = pair_by_id(in.pseudo_base, in.pseudo_nap);
  double best_w = 0.0;
  double best_g = -1.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double w = static_cast<double>(i) / static_cast<double>(points - 1);
    const double g = combined_auroc(id, ps, w);
    const bool closer = std::abs(w - 0.5) < std::abs(best_w - 0.5);
    if (g > best_g || (g == best_g && closer)) {
      best_g = g;
      best_w = w;
    }
  }
  return best_w;
}

}  // namespace

TEST_SUITE("tuning") {
  TEST_CASE("pairing by sample id") {
    const std::vector<ScoredSample> base{{"b", 2.0}, {"a", 1.0}};
    const std::vector<ScoredSample> nap{{"a", 10.0}, {"b", 20.0}};
    const auto p = pair_by_id(base, nap);
    CHECK(p.base == std::vector<double>{1.0, 2.0});
    CHECK(p.nap == std::vector<double>{10.0, 20.0});

    CHECK_THROWS_AS(pair_by_id(base, {{"a", 1.0}}), DataError);
    CHECK_THROWS_AS(pair_by_id(base, {{"a", 1.0}, {"c", 1.0}}), DataError);
    CHECK_THROWS_AS(pair_by_id({{"a", 1.0}, {"a", 2.0}}, {{"a", 1.0}, {"a", 2.0}}), DataError);
    CHECK_THROWS_AS(pair_by_id({{"a", 1.0}}, {{"a", -1.0}}), DataError);
  }

  TEST_CASE("peaked objective is located") {
    for (double w0 : {0.05, 0.37, 0.5, 0.62, 0.93}) {
      const auto in = peaked(w0, 40);
      const auto r = tune_w(in);
      CHECK(std::abs(r.w - w0) <= 0.02);
      CHECK(std::abs(r.w - grid_argmax(in, 1001)) <= 0.02);
      CHECK(r.auroc == 1.0);
      CHECK(r.evaluations == 11 + 2 * 30);
    }
  }

  TEST_CASE("result is consistent and no worse than the grid") {
    std::mt19937_64 rng(97);
    std::lognormal_distribution<double> ln(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      TuneInput in;
      for (std::size_t i = 0; i < 60; ++i) {
        in.id_base.push_back({sid("i", i), ln(rng) * 1.3});
        in.id_nap.push_back({sid("i", i), ln(rng)});
        in.pseudo_base.push_back({sid("p", i), ln(rng)});
        in.pseudo_nap.push_back({sid("p", i), ln(rng) * 1.3});
      }
      const auto r = tune_w(in);
      const auto id = pair_by_id(in.id_base, in.id_nap);
      const auto ps = pair_by_id(in.pseudo_base, in.pseudo_nap);
      CHECK(r.auroc == combined_auroc(id, ps, r.w));
      for (int i = 0; i <= 10; ++i) CHECK(r.auroc >= combined_auroc(id, ps, i / 10.0));
      CHECK(r.w >= 0.0);
      CHECK(r.w <= 1.0);
    }
  }

  TEST_CASE("endpoint objective values") {
    std::mt19937_64 rng(101);
    std::lognormal_distribution<double> ln(0.0, 1.0);
    TuneInput in;
    std::vector<double> bi, ni, bo, no;
    for (std::size_t i = 0; i < 30; ++i) {
      bi.push_back(ln(rng));
      ni.push_back(ln(rng));
      bo.push_back(ln(rng));
      no.push_back(ln(rng));
      in.id_base.push_back({sid("i", i), bi.back()});
      in.id_nap.push_back({sid("i", i), ni.back()});
      in.pseudo_base.push_back({sid("p", i), bo.back()});
      in.pseudo_nap.push_back({sid("p", i), no.back()});
    }
    const auto id = pair_by_id(in.id_base, in.id_nap);
    const auto ps = pair_by_id(in.pseudo_base, in.pseudo_nap);
    CHECK(combined_auroc(id, ps, 1.0) == auroc(bi, bo));
    CHECK(combined_auroc(id, ps, 0.0) == auroc(ni, no));
  }

  TEST_CASE("flat objective prefers the middle") {
    TuneInput in;
    in.id_base = {{"a", 1.0}};
    in.id_nap = {{"a", 1.0}};
    in.pseudo_base = {{"b", 1.0}};
    in.pseudo_nap = {{"b", 1.0}};
    const auto r = tune_w(in);
    CHECK(r.w == 0.5);
    CHECK(r.auroc == 0.5);
  }

  TEST_CASE("options and empty input") {
    const auto in = peaked(0.4, 5);
    TuneOptions opts;
    opts.iters = 0;
    CHECK_THROWS_AS(tune_w(in, opts), ArgumentError);
    opts.iters = 5;
    opts.grid_points = 2;
    CHECK_THROWS_AS(tune_w(in, opts), ArgumentError);
    CHECK_THROWS_AS(tune_w(TuneInput{}), DataError);
  }

  TEST_CASE("reference weights") {
    CHECK(reference_weight("energy", "cifar10") == 0.4);
    CHECK(reference_weight("react", "imagenet") == 0.8);
    CHECK(reference_weight("msp", "cifar100") == 0.3);
    CHECK(reference_weight("knn", "cifar10") == 0.8);
    CHECK_FALSE(reference_weight("nap", "cifar10").has_value());
    CHECK_FALSE(reference_weight("energy", "svhn").has_value());
  }
}
