#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "upimh/math_util.hpp"
#include "upimh/resampling.hpp"

using namespace upimh;

namespace {

std::vector<double> log_weights(std::vector<double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  std::vector<double> lw(w.size());
  for (size_t i = 0; i < w.size(); ++i)
    lw[i] = w[i] > 0.0 ? std::log(w[i] / total) : kNegInf;
  return lw;
}

}  // namespace

TEST_CASE("multinomial degenerate weight") {
  Rng rng(1);
  const auto lw = log_weights({1.0, 0.0, 0.0});
  const auto idx = resample_multinomial(lw, 3, rng);
  CHECK(idx == std::vector<int>{0, 0, 0});
}

TEST_CASE("resampling is deterministic given the seed") {
  const auto lw = log_weights({0.2, 0.3, 0.1, 0.4});
  Rng a(77), b(77);
  CHECK(resample_multinomial(lw, 6, a) == resample_multinomial(lw, 6, b));
  Rng c(78), d(78);
  CHECK(resample_systematic(lw, 6, c) == resample_systematic(lw, 6, d));
}

TEST_CASE("multinomial empirical unbiasedness at uniform weights") {
  const int n = 4;
  const auto lw = log_weights({1.0, 1.0, 1.0, 1.0});
  Rng rng(5);
  const int reps = 100000;
  std::vector<double> count_sum(n, 0.0);
  for (int rep = 0; rep < reps; ++rep) {
    for (int i : resample_multinomial(lw, n, rng)) count_sum[i] += 1.0;
  }
  // Each count is Binomial(4, 1/4) per draw: variance 3/4.
  const double se = std::sqrt(0.75 / reps);
  for (int k = 0; k < n; ++k)
    CHECK(std::abs(count_sum[k] / reps - 1.0) < 3.0 * se);
}

TEST_CASE("systematic hits uniform strata exactly") {
  const int n = 6;
  const auto lw = log_weights(std::vector<double>(n, 1.0));
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
    Rng rng(seed);
    const auto idx = resample_systematic(lw, n, rng);
    std::vector<int> count(n, 0);
    for (int i : idx) ++count[i];
    for (int k = 0; k < n; ++k) CHECK(count[k] == 1);
  }
}

TEST_CASE("systematic degenerate weight") {
  Rng rng(4);
  const auto lw = log_weights({1.0, 0.0});
  CHECK(resample_systematic(lw, 2, rng) == std::vector<int>{0, 0});
}

TEST_CASE("systematic empirical unbiasedness at random weights") {
  Rng wrng(11);
  std::vector<double> w(5);
  for (double& x : w) x = wrng.exponential(1.0);
  const auto lw = log_weights(w);
  double total = 0.0;
  for (double x : w) total += x;

  const int n_out = 5;
  Rng rng(12);
  const int reps = 100000;
  std::vector<double> count_sum(5, 0.0), count_sq(5, 0.0);
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<int> count(5, 0);
    for (int i : resample_systematic(lw, n_out, rng)) ++count[i];
    for (int k = 0; k < 5; ++k) {
      count_sum[k] += count[k];
      count_sq[k] += static_cast<double>(count[k]) * count[k];
    }
  }
  for (int k = 0; k < 5; ++k) {
    const double mean = count_sum[k] / reps;
    const double var = count_sq[k] / reps - mean * mean;
    const double se = std::sqrt(std::max(var, 1e-12) / reps);
    CHECK(std::abs(mean - n_out * w[k] / total) < 3.0 * se + 1e-9);
  }
}

TEST_CASE("error paths") {
  Rng rng(1);
  std::vector<double> all_dead = {kNegInf, kNegInf};
  CHECK_THROWS_AS(resample_multinomial(all_dead, 2, rng), std::domain_error);
  CHECK_THROWS_AS(resample_systematic(all_dead, 2, rng), std::domain_error);
  const auto lw = log_weights({0.5, 0.5});
  CHECK_THROWS(resample_multinomial(lw, 0, rng));
  CHECK_THROWS(resample_multinomial(std::vector<double>{}, 2, rng));
}
