#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "upimh/math_util.hpp"
#include "upimh/smc_sampler.hpp"

using namespace upimh;

namespace {

// Conjugate pair: N(0,1) prior, likelihood N(y0; x, 1). The evidence is
// N(y0; 0, 2) in closed form.
TemperedTarget conjugate_target(double y0, int temperatures) {
  TemperedTarget t;
  t.dim = 1;
  t.prior_sampler = [](Rng& rng, std::span<double> x) { x[0] = rng.normal(); };
  t.log_prior = [](std::span<const double> x) { return -0.5 * x[0] * x[0]; };
  t.log_likelihood = [y0](std::span<const double> x) {
    return normal_logpdf(y0, x[0], 1.0);
  };
  t.betas = tempering_schedule(temperatures);
  t.mh_proposal_scale = 1.0;
  t.mh_steps_per_temperature = 1;
  return t;
}

}  // namespace

TEST_CASE("tempering schedule") {
  CHECK(tempering_schedule(2) == std::vector<double>{0.0, 1.0});
  const auto b200 = tempering_schedule(200);
  CHECK(b200[1] == doctest::Approx(1.0 / (199.0 * 199.0)).epsilon(1e-14));
  CHECK(b200.back() == 1.0);
  for (int T : {2, 3, 17, 200}) {
    const auto b = tempering_schedule(T);
    CHECK(b.front() == 0.0);
    CHECK(b.back() == 1.0);
    for (size_t t = 1; t < b.size(); ++t) CHECK(b[t] > b[t - 1]);
  }
  CHECK_THROWS(tempering_schedule(1));
}

TEST_CASE("mixture log-likelihood") {
  MixtureTarget target;
  target.data = {0.3, -1.2, 2.4};
  target.num_components = 1;
  target.component_sd = 1.0;

  SUBCASE("single component reduces to a plain Gaussian product") {
    std::vector<double> x = {0.7};
    double direct = 0.0;
    for (double y : target.data) direct += normal_logpdf(y, 0.7, 1.0);
    CHECK(mixture_loglik(x, target) == doctest::Approx(direct).epsilon(1e-14));
  }

  SUBCASE("permutation invariance to the last bit") {
    MixtureTarget four = target;
    four.num_components = 4;
    std::vector<double> x = {-3.0, 0.1, 2.9, 6.2};
    const double base = mixture_loglik(x, four);
    std::sort(x.begin(), x.end());
    do {
      CHECK(mixture_loglik(x, four) == base);
    } while (std::next_permutation(x.begin(), x.end()));
  }

  SUBCASE("matches an independently coded double loop") {
    MixtureTarget four = target;
    four.num_components = 4;
    four.component_sd = 0.8;
    Rng rng(5);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> x(4);
      for (double& xi : x) xi = rng.normal(0.0, 3.0);
      double direct = 0.0;
      for (double y : four.data) {
        double mix = 0.0;
        for (double xi : x) {
          const double d = y - xi;
          mix += std::exp(-0.5 * d * d / (0.8 * 0.8)) /
                 (std::sqrt(2.0 * M_PI) * 0.8);
        }
        direct += std::log(mix / 4.0);
      }
      CHECK(mixture_loglik(x, four) == doctest::Approx(direct).epsilon(1e-12));
    }
  }

  SUBCASE("dimension mismatch") {
    std::vector<double> x = {0.0, 1.0};
    CHECK_THROWS(mixture_loglik(x, target));
  }
}

TEST_CASE("random-walk metropolis move") {
  SUBCASE("zero scale leaves the point unchanged") {
    std::vector<double> x = {0.4, -0.7};
    auto target = [](std::span<const double>) { return 0.0; };
    Rng rng(3);
    rw_mh_move(x, target, 0.0, 25, rng);
    CHECK(x == std::vector<double>{0.4, -0.7});
  }

  SUBCASE("uniform box acceptance rate equals the in-box probability") {
    const double box = 1.0, scale = 1.0;
    auto target = [box](std::span<const double> x) {
      return (x[0] >= -box && x[0] <= box) ? 0.0 : kNegInf;
    };
    Rng rng(7);
    const int reps = 100000;
    int accepted = 0;
    double mc_inside = 0.0;
    for (int i = 0; i < reps; ++i) {
      std::vector<double> x = {rng.uniform(-box, box)};
      accepted += rw_mh_move(x, target, scale, 1, rng);
      // Direct Monte Carlo of P(x + scale eps stays inside).
      const double prop = rng.uniform(-box, box) + scale * rng.normal();
      if (prop >= -box && prop <= box) mc_inside += 1.0;
    }
    const double rate = static_cast<double>(accepted) / reps;
    const double direct = mc_inside / reps;
    const double se = std::sqrt(2.0 * direct * (1.0 - direct) / reps);
    CHECK(std::abs(rate - direct) < 3.0 * se);
  }

  SUBCASE("standard normal target moments") {
    auto target = [](std::span<const double> x) { return -0.5 * x[0] * x[0]; };
    Rng rng(11);
    std::vector<double> x = {0.0};
    const int n = 400000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      rw_mh_move(x, target, 2.4, 1, rng);
      s += x[0];
      s2 += x[0] * x[0];
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.05);
  }

  SUBCASE("zero-density start is rejected") {
    std::vector<double> x = {5.0};
    auto target = [](std::span<const double> x) {
      return x[0] > 0.0 ? kNegInf : 0.0;
    };
    Rng rng(1);
    CHECK_THROWS(rw_mh_move(x, target, 1.0, 1, rng));
  }
}

TEST_CASE("smc sampler evidence") {
  SUBCASE("flat likelihood gives log Z exactly zero") {
    TemperedTarget t = conjugate_target(0.0, 8);
    t.log_likelihood = [](std::span<const double>) { return 0.0; };
    for (bool resample : {true, false}) {
      Rng rng(2);
      const auto out = run_smc_sampler(t, 16, resample, rng);
      CHECK(out.log_evidence == 0.0);
    }
  }

  SUBCASE("conjugate gaussian evidence is unbiased in both modes") {
    const double y0 = 1.3;
    const double truth = std::log(0.1848866908416275);  // N(1.3; 0, 2)
    TemperedTarget t = conjugate_target(y0, 10);
    for (bool resample : {true, false}) {
      Rng rng(resample ? 31 : 32);
      const int reps = 4000;
      double s = 0.0, s2 = 0.0;
      for (int r = 0; r < reps; ++r) {
        const auto out = run_smc_sampler(t, 32, resample, rng);
        const double ratio = std::exp(out.log_evidence - truth);
        s += ratio;
        s2 += ratio * ratio;
      }
      const double mean = s / reps;
      const double se = std::sqrt((s2 / reps - mean * mean) / reps);
      INFO("resample=", resample, " mean ratio=", mean);
      CHECK(std::abs(mean - 1.0) < 3.0 * se);
    }
  }

  SUBCASE("an impossible likelihood kills the sampler") {
    TemperedTarget t = conjugate_target(0.0, 5);
    t.log_likelihood = [](std::span<const double>) { return kNegInf; };
    Rng rng(9);
    const auto out = run_smc_sampler(t, 8, true, rng);
    CHECK(out.log_evidence == kNegInf);
  }
}

TEST_CASE("coupled pimh over the smc proposal source") {
  const double y0 = 0.6;
  TemperedTarget t = conjugate_target(y0, 10);
  SmcProposalSource source(t, 32, true);

  // Posterior is N(y0/2, 1/2); check unbiasedness of the RB estimator.
  EstimatorRequest request;
  request.h = [](const Trajectory& x) { return std::vector<double>{x.state(0)[0]}; };
  request.k = 0;
  request.m = 2;
  request.rao_blackwell = true;

  const int reps = 2000;
  double s = 0.0, s2 = 0.0;
  std::vector<int> taus;
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::stream(4242, r);
    const auto rec = run_coupled_pimh(source, request, rng);
    s += rec.estimate[0];
    s2 += rec.estimate[0] * rec.estimate[0];
    taus.push_back(rec.tau);
  }
  const double mean = s / reps;
  const double se = std::sqrt((s2 / reps - mean * mean) / reps);
  CHECK(std::abs(mean - y0 / 2.0) < 3.0 * se);
  // Meeting structure carries over to this proposal source.
  const double met_at_one =
      static_cast<double>(std::count(taus.begin(), taus.end(), 1)) / reps;
  CHECK(met_at_one >= 0.5 - 3.0 * std::sqrt(0.25 / reps));
}

TEST_CASE("mixture posterior label symmetry" * doctest::timeout(600)) {
  MixtureTarget mix;
  mix.num_components = 4;
  mix.component_sd = 1.0;
  Rng data_rng(88);
  mix.data = simulate_mixture_data(std::vector<double>{-3.0, 0.0, 3.0, 6.0}, 1.0, 30,
                                   data_rng);
  TemperedTarget target = make_tempered_mixture(mix, 50, 1.0, 1);
  SmcProposalSource source(target, 50, true);

  EstimatorRequest request;
  request.h = [](const Trajectory& x) {
    return std::vector<double>{x.state(0)[0], x.state(0)[1], x.state(0)[2],
                               x.state(0)[3]};
  };
  request.k = 0;
  request.m = 4;
  request.rao_blackwell = true;

  const int reps = 300;
  std::vector<double> s(4, 0.0), s2(4, 0.0);
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::stream(5353, r);
    const auto rec = run_coupled_pimh(source, request, rng);
    for (int c = 0; c < 4; ++c) {
      s[c] += rec.estimate[c];
      s2[c] += rec.estimate[c] * rec.estimate[c];
    }
  }
  // Exchangeable posterior: every component mean estimates the same value.
  std::vector<double> mean(4), se(4);
  for (int c = 0; c < 4; ++c) {
    mean[c] = s[c] / reps;
    se[c] = std::sqrt((s2[c] / reps - mean[c] * mean[c]) / reps);
  }
  for (int c = 1; c < 4; ++c) {
    const double gap = std::abs(mean[c] - mean[0]);
    CHECK(gap < 3.0 * std::sqrt(se[c] * se[c] + se[0] * se[0]));
  }
}

TEST_CASE("variance shrinks with m and large burn-in hurts") {
  TemperedTarget t = conjugate_target(0.9, 10);
  SmcProposalSource source(t, 32, true);
  auto variance_at = [&](int k, int m, std::uint64_t seed) {
    EstimatorRequest request;
    request.h = [](const Trajectory& x) { return std::vector<double>{x.state(0)[0]}; };
    request.k = k;
    request.m = m;
    request.rao_blackwell = true;
    const int reps = 2000;
    double s = 0.0, s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      Rng rng = Rng::stream(seed, r);
      const double est = run_coupled_pimh(source, request, rng).estimate[0];
      s += est;
      s2 += est * est;
    }
    const double mean = s / reps;
    return (s2 - reps * mean * mean) / (reps - 1);
  };
  const double v_m4 = variance_at(0, 4, 61);
  const double v_m16 = variance_at(0, 16, 62);
  const double v_k_late = variance_at(15, 16, 63);
  CHECK(v_m16 < v_m4);
  CHECK(v_m16 < v_k_late);
}

TEST_CASE("target validation") {
  TemperedTarget bad = conjugate_target(0.0, 5);
  bad.betas[2] = bad.betas[1];  // not strictly increasing
  CHECK_THROWS(bad.validate());
  TemperedTarget tail = conjugate_target(0.0, 5);
  tail.betas.back() = 0.9;
  CHECK_THROWS(tail.validate());
  MixtureTarget empty;
  empty.data.clear();
  CHECK_THROWS(empty.validate());
}
