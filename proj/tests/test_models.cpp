#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "upimh/ar1.hpp"
#include "upimh/kinetic.hpp"
#include "upimh/math_util.hpp"
#include "upimh/sv.hpp"

using namespace upimh;

TEST_CASE("simulate_ssm basics") {
  Ar1Model model(LinearGaussianParams{0.5, 10.0});

  SUBCASE("T=1 yields one pair") {
    Rng rng(3);
    auto [x, y] = simulate_ssm(model, 1, rng);
    CHECK(x.horizon == 1);
    CHECK(y.horizon == 1);
    CHECK(std::isfinite(x.state(0)[0]));
    CHECK(std::isfinite(y.row(0)[0]));
  }

  SUBCASE("same seed, same output") {
    Rng r1(11), r2(11);
    auto [x1, y1] = simulate_ssm(model, 50, r1);
    auto [x2, y2] = simulate_ssm(model, 50, r2);
    CHECK(x1.data == x2.data);
    CHECK(y1.values == y2.values);
  }

  SUBCASE("T must be positive") {
    Rng rng(1);
    CHECK_THROWS(simulate_ssm(model, 0, rng));
  }
}

TEST_CASE("AR(1) lag-1 autocorrelation matches stationary theory") {
  const double a = 0.5;
  Ar1Model model(LinearGaussianParams{a, 10.0});
  Rng rng(99);
  const int T = 100000;
  auto [x, y] = simulate_ssm(model, T, rng);

  double mean = 0.0;
  for (int t = 0; t < T; ++t) mean += x.state(t)[0];
  mean /= T;
  double c0 = 0.0, c1 = 0.0;
  for (int t = 0; t < T; ++t) {
    const double d = x.state(t)[0] - mean;
    c0 += d * d;
    if (t + 1 < T) c1 += d * (x.state(t + 1)[0] - mean);
  }
  const double rho1 = c1 / c0;
  // SE of the lag-1 autocorrelation estimate for AR(1) is about
  // sqrt((1 - a^2)/T).
  const double se = std::sqrt((1.0 - a * a) / T);
  CHECK(std::abs(rho1 - a) < 3.0 * se);
}

TEST_CASE("kalman oracle") {
  SUBCASE("a=0 decouples the smoother") {
    LinearGaussianParams params{0.0, 10.0};
    ObservationSeries obs(4, 1);
    obs.values = {1.0, -2.0, 0.5, 3.0};
    const auto res = kalman_oracle(params, obs);
    for (int t = 0; t < 4; ++t) {
      CHECK(res.smooth_mean[t] ==
            doctest::Approx(obs.values[t] / (1.0 + params.sigma_y2)).epsilon(1e-12));
      CHECK(res.filter_mean[t] == doctest::Approx(res.smooth_mean[t]).epsilon(1e-12));
    }
  }

  SUBCASE("T=1 log-likelihood is a Gaussian convolution") {
    LinearGaussianParams params{0.5, 10.0};
    ObservationSeries obs(1, 1);
    obs.values = {2.5};
    const auto res = kalman_oracle(params, obs);
    const double v0 = params.stationary_var();
    CHECK(res.log_lik ==
          doctest::Approx(normal_logpdf(2.5, 0.0, v0 + params.sigma_y2)).epsilon(1e-13));
    CHECK(res.log_lik_prefix[0] == res.log_lik);
  }

  SUBCASE("finite log-likelihood on simulated data") {
    Ar1Model model(LinearGaussianParams{0.5, 10.0});
    Rng rng(5);
    auto [x, y] = simulate_ssm(model, 100, rng);
    const auto res = kalman_oracle(model.params(), y);
    CHECK(std::isfinite(res.log_lik));
    for (double v : res.smooth_var) CHECK(v > 0.0);
  }

  SUBCASE("non-finite observation is rejected") {
    ObservationSeries obs(2, 1);
    obs.values = {1.0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS(kalman_oracle(LinearGaussianParams{0.5, 10.0}, obs));
  }
}

TEST_CASE("gillespie direct method") {
  const KineticParams params;
  const std::array<long, 4> x0 = {8, 8, 8, 5};

  SUBCASE("zero duration leaves the state unchanged") {
    Rng rng(1);
    CHECK(gillespie_step(x0, params, 0.0, rng) == x0);
  }

  SUBCASE("single events move the state by one stoichiometry column") {
    Rng rng(17);
    int checked = 0;
    for (int rep = 0; rep < 2000 && checked < 200; ++rep) {
      long events = 0;
      const auto x = gillespie_step(x0, params, 0.002, rng, &events);
      if (events != 1) continue;
      ++checked;
      bool matches_column = false;
      for (int r = 0; r < 8 && !matches_column; ++r) {
        bool same = true;
        for (int q = 0; q < 4; ++q)
          same = same && (x[q] - x0[q] == kKineticStoichiometry[q][r]);
        matches_column = matches_column || same;
      }
      CHECK(matches_column);
    }
    CHECK(checked > 0);
  }

  SUBCASE("short-time mean event count is duration times total hazard") {
    const double duration = 0.002;
    const auto hazards = kinetic_hazards(x0, params);
    double total_hazard = 0.0;
    for (double h : hazards) total_hazard += h;

    Rng rng(23);
    const int reps = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      long events = 0;
      gillespie_step(x0, params, duration, rng, &events);
      sum += static_cast<double>(events);
      sum_sq += static_cast<double>(events) * static_cast<double>(events);
    }
    const double mean = sum / reps;
    const double var = (sum_sq - reps * mean * mean) / (reps - 1);
    const double se = std::sqrt(var / reps);
    // First-order expansion; the O((duration * hazard)^2) remainder is an
    // order of magnitude below the Monte Carlo band.
    CHECK(std::abs(mean - duration * total_hazard) < 3.0 * se + 1e-4);
  }

  SUBCASE("invariants along a long path") {
    KineticModel model(params);
    Rng rng(7);
    auto [x, y] = simulate_ssm(model, 100, rng);
    for (int t = 0; t < x.horizon; ++t) {
      for (int q = 0; q < 4; ++q) {
        const double v = x.state(t)[q];
        CHECK(v >= 0.0);
        CHECK(v == std::floor(v));
      }
      CHECK(x.state(t)[3] <= params.capacity);
    }
  }

  SUBCASE("event cap guards runaway simulations") {
    KineticParams capped = params;
    capped.max_events_per_step = 3;
    Rng rng(2);
    CHECK_THROWS_AS(gillespie_step(x0, capped, 10.0, rng), std::runtime_error);
  }
}

TEST_CASE("sv transition") {
  const SvParams theta;  // reference MLE values

  SUBCASE("no-jump branch in closed form") {
    SvParams nojump = theta;
    nojump.xi = 1e-9;  // Poisson mean ~ 1e-17, so K = 0 a.s.
    Rng rng(3);
    const double w0 = 1.7;
    const auto [w1, v1] = sv_transition(w0, nojump, rng);
    CHECK(w1 == doctest::Approx(std::exp(-nojump.lambda) * w0).epsilon(1e-12));
    CHECK(v1 ==
          doctest::Approx(w0 * (1.0 - std::exp(-nojump.lambda)) / nojump.lambda)
              .epsilon(1e-12));
  }

  SUBCASE("positivity") {
    Rng rng(9);
    double w = 0.5;
    for (int t = 0; t < 2000; ++t) {
      const auto [w_next, v] = sv_transition(w, theta, rng);
      CHECK(w_next >= 0.0);
      CHECK(v > 0.0);
      w = w_next;
    }
  }

  SUBCASE("stationary moments at the reference parameters") {
    Rng rng(31);
    const int n = 200000;
    const int n_batches = 50;
    const int batch = n / n_batches;
    std::vector<double> batch_means(n_batches, 0.0), batch_vars(n_batches, 0.0);
    double w = theta.xi;
    for (int b = 0; b < n_batches; ++b) {
      double s = 0.0, s2 = 0.0;
      for (int i = 0; i < batch; ++i) {
        w = sv_transition(w, theta, rng).first;
        s += w;
        s2 += w * w;
      }
      batch_means[b] = s / batch;
      batch_vars[b] = s2 / batch - batch_means[b] * batch_means[b];
    }
    auto mean_and_se = [&](const std::vector<double>& xs) {
      double m = 0.0;
      for (double x : xs) m += x;
      m /= xs.size();
      double v = 0.0;
      for (double x : xs) v += (x - m) * (x - m);
      v /= (xs.size() - 1);
      return std::pair{m, std::sqrt(v / xs.size())};
    };
    const auto [mean_w, se_mean] = mean_and_se(batch_means);
    const auto [var_w, se_var] = mean_and_se(batch_vars);
    CHECK(std::abs(mean_w - theta.xi) < 3.0 * se_mean);
    CHECK(std::abs(var_w - theta.omega2) < 3.0 * se_var);
  }

  SUBCASE("negative spot volatility is rejected") {
    Rng rng(1);
    CHECK_THROWS(sv_transition(-0.1, theta, rng));
  }
}

TEST_CASE("sv observation density") {
  SvParams p;
  p.mu = 0.0;
  p.beta = 0.0;
  CHECK(sv_obs_logdensity(1.0, 0.0, p) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-14));
  CHECK(sv_obs_logdensity(0.0, 0.3, p) == kNegInf);
  CHECK(sv_obs_logdensity(-1.0, 0.3, p) == kNegInf);

  const SvParams theta;
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const double v = 0.01 + rng.uniform() * 3.0;
    const double y = rng.normal(0.0, 2.0);
    const double direct =
        -0.5 * std::log(2.0 * M_PI * v) -
        0.5 * (y - theta.mu - theta.beta * v) * (y - theta.mu - theta.beta * v) / v;
    CHECK(sv_obs_logdensity(v, y, theta) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(Ar1Model(LinearGaussianParams{1.0, 10.0}));
  CHECK_THROWS(Ar1Model(LinearGaussianParams{0.5, 0.0}));
  KineticParams bad;
  bad.initial_state = {8, 8, 8, 11};
  CHECK_THROWS(KineticModel(bad));
  SvParams sv;
  sv.omega2 = -1.0;
  CHECK_THROWS(SvModel(sv));
}
