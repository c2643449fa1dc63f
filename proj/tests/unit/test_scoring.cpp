#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "../support/oracles.hpp"
#include "napood/errors.hpp"
#include "napood/scoring.hpp"

using namespace napood;

namespace {

ActivationTensor random_activation(std::mt19937_64& rng, std::size_t C, std::size_t H, std::size_t W,
                                   double zero_fraction = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::exponential_distribution<double> mag(0.5);
  std::vector<double> v(C * H * W);
  for (auto& x : v) x = u(rng) < zero_fraction ? 0.0 : mag(rng);
  return ActivationTensor(std::move(v), C, H, W);
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min());
}

}  // namespace

TEST_SUITE("scoring") {
  TEST_CASE("channel max and mean of the reference slice") {
    const ActivationTensor a({4, 0, 0, 0}, 1, 2, 2);
    CHECK(channel_max(a, 0) == 4.0);
    CHECK(channel_mean(a, 0) == 1.0);

    const ActivationTensor zeros(std::vector<double>(8, 0.0), 2, 2, 2);
    CHECK(channel_max(zeros, 1) == 0.0);
    CHECK(channel_mean(zeros, 1) == 0.0);

    const ActivationTensor constant(std::vector<double>(9, 2.75), 1, 3, 3);
    CHECK(channel_mean(constant, 0) == 2.75);
  }

  TEST_CASE("channel index out of range") {
    const ActivationTensor a({4, 0, 0, 0}, 1, 2, 2);
    CHECK_THROWS_AS(channel_max(a, 1), ArgumentError);
    CHECK_THROWS_AS(channel_mean(a, 7), ArgumentError);
  }

  TEST_CASE("construction contract") {
    CHECK_THROWS_AS(ActivationTensor({1, -1, 0, 0}, 1, 2, 2), DataError);
    CHECK_THROWS_AS(ActivationTensor({1, 0, 0}, 1, 2, 2), ArgumentError);
    CHECK_THROWS_AS(ActivationTensor({}, 0, 1, 1), ArgumentError);
    CHECK_THROWS_AS(ActivationTensor::from(Tensor({4}, {1, 2, 3, 4})), DataError);
    const auto batched = ActivationTensor::from(Tensor({1, 2, 1, 2}, {1, 2, 3, 4}));
    CHECK(batched.channels() == 2);
    CHECK(batched.spatial() == 2);
  }

  TEST_CASE("random slices against scan and compensated sum") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_activation(rng, 3, 16, 16);
      for (std::size_t j = 0; j < 3; ++j) {
        const auto s = a.channel(j);
        double mx = 0.0;
        for (std::size_t h = 0; h < 16; ++h) {
          for (std::size_t w = 0; w < 16; ++w) mx = std::max(mx, s[h * 16 + w]);
        }
        CHECK(channel_max(a, j) == mx);
        const double mean = static_cast<double>(oracle::kahan_sum(s) / 256.0L);
        CHECK(rel_err(channel_mean(a, j), mean) <= 1e-9);
        CHECK(channel_mean(a, j) <= channel_max(a, j));
      }
    }
  }

  TEST_CASE("nap score reference values") {
    const ActivationTensor a({4, 0, 0, 0}, 1, 2, 2);
    CHECK(nap_score(a) == doctest::Approx(4.0).epsilon(1e-15));
    const ActivationTensor zeros(std::vector<double>(64 * 4, 0.0), 64, 2, 2);
    CHECK(nap_score(zeros) == 0.0);
    CHECK(NapConfig{}.epsilon == 1.0);
  }

  TEST_CASE("nap score against naive loop") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_activation(rng, 64, 8, 8);
      const double expect = oracle::nap_naive(a.values(), 64, 8, 8, 1.0);
      CHECK(rel_err(nap_score(a), expect) <= 1e-6);
    }
  }

  TEST_CASE("epsilon zero") {
    const ActivationTensor a({0, 0, 0, 0, 1, 1, 1, 1}, 2, 2, 2);
    CHECK_THROWS_AS(nap_score(a, NapConfig{0.0}), DataError);
    const ActivationTensor b({3, 1, 0, 0, 1, 1, 1, 1}, 2, 2, 2);
    // channel 0: (3 / 1)^2 = 9, channel 1: 1
    CHECK(nap_score(b, NapConfig{0.0}) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK_THROWS_AS(nap_score(b, NapConfig{-1.0}), ArgumentError);
  }

  TEST_CASE("all-zero channel contributes zero when epsilon > 0") {
    const ActivationTensor a({0, 0, 0, 0, 4, 0, 0, 0}, 2, 2, 2);
    CHECK(nap_score(a) == doctest::Approx(2.0).epsilon(1e-15));
  }

  TEST_CASE("spatial and channel permutation invariance is exact") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t C = 1 + rng() % 40;
      const std::size_t H = 1 + rng() % 9;
      const std::size_t W = 1 + rng() % 9;
      const auto a = random_activation(rng, C, H, W, 0.2);
      const double base = nap_score(a);

      std::vector<double> spatial(a.values().begin(), a.values().end());
      for (std::size_t c = 0; c < C; ++c) {
        std::shuffle(spatial.begin() + static_cast<long>(c * H * W),
                     spatial.begin() + static_cast<long>((c + 1) * H * W), rng);
      }
      CHECK(nap_score(ActivationTensor(spatial, C, H, W)) == base);

      std::vector<std::size_t> perm(C);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<double> channels(C * H * W);
      for (std::size_t c = 0; c < C; ++c) {
        std::copy_n(a.values().begin() + static_cast<long>(perm[c] * H * W), H * W,
                    channels.begin() + static_cast<long>(c * H * W));
      }
      CHECK(nap_score(ActivationTensor(channels, C, H, W)) == base);
    }
  }

  TEST_CASE("scale covariance and monotonicity") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_activation(rng, 16, 4, 4, 0.0);
      auto scaled = [&](double alpha) {
        std::vector<double> v(a.values().begin(), a.values().end());
        for (auto& x : v) x *= alpha;
        return ActivationTensor(std::move(v), 16, 4, 4);
      };
      const double base0 = nap_score(a, NapConfig{0.0});
      double prev = 0.0;
      for (double alpha : {0.01, 0.5, 1.0, 3.0, 100.0}) {
        CHECK(rel_err(nap_score(scaled(alpha), NapConfig{0.0}), base0) <= 1e-9);
        const double eps1 = nap_score(scaled(alpha));
        CHECK(eps1 >= prev);
        prev = eps1;
      }
    }
  }

  TEST_CASE("per-channel bound") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_activation(rng, 8, 3, 5, 0.0);
      const double hw = 15.0;
      for (std::size_t j = 0; j < 8; ++j) CHECK(channel_max(a, j) <= hw * channel_mean(a, j) * (1 + 1e-12));
      CHECK(nap_score(a, NapConfig{0.0}) <= hw * hw * (1 + 1e-12));
      CHECK(nap_score(a) <= hw * hw);
    }
    // single spike attains the bound exactly
    std::vector<double> spike(15, 0.0);
    spike[7] = 2.0;
    CHECK(nap_score(ActivationTensor(spike, 1, 3, 5), NapConfig{0.0}) == doctest::Approx(225.0));
  }
}

TEST_SUITE("scoring") {
  TEST_CASE("former score") {
    const std::vector<double> att{0.5, 0.25, 0.25};
    CHECK(nap_former_score(att) == 0.5);
    const std::vector<double> uniform(4, 0.25);
    CHECK(nap_former_score(uniform) == 0.25);
    const std::vector<float> f{0.5f, 0.25f, 0.25f};
    CHECK(nap_former_score(f) == 0.5);
  }

  TEST_CASE("former exclude-self option") {
    const std::vector<double> att{0.6, 0.3, 0.1};
    CHECK(nap_former_score(att, FormerOptions{true}) == 0.3);
    CHECK(nap_former_score(att, FormerOptions{false}) == 0.6);
  }

  TEST_CASE("former errors") {
    CHECK_THROWS_AS(nap_former_score(std::vector<double>{}), ArgumentError);
    CHECK_THROWS_AS(nap_former_score(std::vector<double>{1.0}), ArgumentError);
    CHECK_THROWS_AS(nap_former_score(std::vector<double>{0.5, 0.6}), DataError);
    CHECK_THROWS_AS(nap_former_score(std::vector<double>{1.2, -0.2}), DataError);
  }

  TEST_CASE("former random softmax against scan, lower bound") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t len = 2 + rng() % 200;
      std::vector<double> v(len);
      double sum = 0.0;
      for (auto& x : v) {
        x = std::exp(n(rng));
        sum += x;
      }
      for (auto& x : v) x /= sum;
      double mx = 0.0;
      for (double x : v) mx = std::max(mx, x);
      const double s = nap_former_score(v);
      CHECK(s == mx);
      CHECK(s >= 1.0 / static_cast<double>(len));
      CHECK(s > 1.0 / static_cast<double>(len));  // non-uniform draws
    }
  }

  TEST_CASE("energy") {
    const std::vector<double> z{0.0, 0.0};
    CHECK(energy_score(z) == doctest::Approx(0.693147180559945).epsilon(1e-14));
    const std::vector<double> single{3.5};
    CHECK(energy_score(single) == 3.5);

    std::mt19937_64 rng(29);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> logits(10);
      for (auto& x : logits) x = n(rng);
      CHECK(rel_err(energy_score(logits), oracle::logsumexp_direct(logits)) <= 1e-9);
      CHECK(energy_score(logits) >= *std::max_element(logits.begin(), logits.end()));
      const double c = n(rng);
      auto shifted = logits;
      for (auto& x : shifted) x += c;
      CHECK(std::abs(energy_score(shifted) - (energy_score(logits) + c)) <= 1e-12);
    }
  }

  TEST_CASE("energy does not overflow") {
    const std::vector<double> big{1000.0, 1000.0};
    CHECK(energy_score(big) == doctest::Approx(1000.0 + std::log(2.0)));
    const std::vector<double> small{-1000.0, -1001.0};
    CHECK(std::isfinite(energy_score(small)));
  }

  TEST_CASE("msp") {
    CHECK(msp_score(std::vector<double>{0, 0, 0, 0}) == 0.25);
    CHECK(std::abs(msp_score(std::vector<double>{100, 0}) - 1.0) <= 1e-9);

    std::mt19937_64 rng(31);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t K = 2 + rng() % 20;
      std::vector<double> logits(K);
      for (auto& x : logits) x = n(rng);
      const double s = msp_score(logits);
      CHECK(std::abs(s - oracle::softmax_max_direct(logits)) <= 1e-9);
      CHECK(s >= 1.0 / static_cast<double>(K));
      CHECK(s <= 1.0);
      auto shifted = logits;
      for (auto& x : shifted) x += 50.0;
      CHECK(std::abs(msp_score(shifted) - s) <= 1e-12);
    }
  }

  TEST_CASE("logit errors") {
    CHECK_THROWS_AS(energy_score(std::vector<double>{}), ArgumentError);
    CHECK_THROWS_AS(energy_score(std::vector<double>{0.0, std::numeric_limits<double>::infinity()}),
                    DataError);
    CHECK_THROWS_AS(msp_score(std::vector<double>{std::nan("")}), DataError);
  }
}
